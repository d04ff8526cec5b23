#pragma once

// JSON boundary: the "ttj" tensor format and a pointer-tracking view used to
// read config documents with precise error locations.
//
// ttj: {"m":int,"n":int,"p":int,"field":"real"|"complex","data":[...]}
// with data in (slice, row, col) order; complex entries are [re, im] pairs.
// Spectra add "domain":"frequency" and store block j as slice j.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tprod/errors.hpp"
#include "tprod/spectral.hpp"
#include "tprod/tensor.hpp"

namespace tprod {

using json = nlohmann::json;

// Read-only view of a JSON node that remembers its pointer and source file.
class JsonView {
 public:
  JsonView(const json& node, std::string pointer = {}, std::string source = {})
      : node_(&node), pointer_(std::move(pointer)), source_(std::move(source)) {}

  const json& node() const noexcept { return *node_; }
  const std::string& pointer() const noexcept { return pointer_; }
  const std::string& source() const noexcept { return source_; }

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, pointer_, source_); }

  bool has(const std::string& key) const { return node_->is_object() && node_->contains(key); }

  JsonView at(const std::string& key) const {
    if (!node_->is_object()) fail("expected an object");
    auto it = node_->find(key);
    if (it == node_->end()) throw ConfigError("missing required field", pointer_ + "/" + key, source_);
    return JsonView(*it, pointer_ + "/" + key, source_);
  }

  JsonView at(std::size_t index) const {
    if (!node_->is_array() || index >= node_->size()) fail("index out of range");
    return JsonView((*node_)[index], pointer_ + "/" + std::to_string(index), source_);
  }

  std::size_t size() const {
    if (!node_->is_array()) fail("expected an array");
    return node_->size();
  }

  double as_double() const {
    if (!node_->is_number()) fail("expected a number");
    const double v = node_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  long long as_int() const {
    if (!node_->is_number_integer()) fail("expected an integer");
    return node_->get<long long>();
  }

  std::size_t as_positive() const {
    const long long v = as_int();
    if (v < 1) fail("expected a positive integer");
    return static_cast<std::size_t>(v);
  }

  std::uint64_t as_u64() const {
    if (!node_->is_number_unsigned() && !(node_->is_number_integer() && node_->get<long long>() >= 0))
      fail("expected a nonnegative integer");
    return node_->get<std::uint64_t>();
  }

  bool as_bool() const {
    if (!node_->is_boolean()) fail("expected a boolean");
    return node_->get<bool>();
  }

  std::string as_string() const {
    if (!node_->is_string()) fail("expected a string");
    return node_->get<std::string>();
  }

  std::vector<double> as_doubles() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).as_double();
    return out;
  }

  double get_double(const std::string& key, double fallback) const { return has(key) ? at(key).as_double() : fallback; }
  std::size_t get_positive(const std::string& key, std::size_t fallback) const {
    return has(key) ? at(key).as_positive() : fallback;
  }
  std::string get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? at(key).as_string() : fallback;
  }
  bool get_bool(const std::string& key, bool fallback) const { return has(key) ? at(key).as_bool() : fallback; }

  // Reject keys outside `allowed` so typos do not pass silently.
  void require_keys(std::initializer_list<const char*> allowed) const {
    if (!node_->is_object()) fail("expected an object");
    for (auto it = node_->begin(); it != node_->end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) throw ConfigError("unknown field", pointer_ + "/" + it.key(), source_);
    }
  }

 private:
  const json* node_;
  std::string pointer_;
  std::string source_;
};

inline json complex_to_json(Complex v) { return json::array({v.real(), v.imag()}); }

inline json to_ttj(const TTensor& t) {
  json data = json::array();
  for (const auto& v : t.data()) {
    if (t.is_real()) {
      data.push_back(v.real());
    } else {
      data.push_back(complex_to_json(v));
    }
  }
  return json{{"m", t.rows()}, {"n", t.cols()}, {"p", t.slices()}, {"field", to_string(t.field())}, {"data", data}};
}

namespace detail {

struct TtjHeader {
  std::size_t m, n, p;
  Field field;
};

inline TtjHeader read_ttj_header(const JsonView& v) {
  const std::string field = v.at("field").as_string();
  if (field != "real" && field != "complex") v.at("field").fail("field must be \"real\" or \"complex\"");
  return {v.at("m").as_positive(), v.at("n").as_positive(), v.at("p").as_positive(),
          field == "real" ? Field::real : Field::complex};
}

inline std::vector<Complex> read_ttj_data(const JsonView& v, const TtjHeader& h) {
  const JsonView data = v.at("data");
  const std::size_t expect = h.m * h.n * h.p;
  if (data.size() != expect) data.fail("expected " + std::to_string(expect) + " entries, got " + std::to_string(data.size()));
  std::vector<Complex> out(expect);
  for (std::size_t i = 0; i < expect; ++i) {
    const JsonView e = data.at(i);
    if (e.node().is_number()) {
      out[i] = Complex(e.as_double(), 0.0);
    } else if (e.node().is_array() && e.node().size() == 2) {
      out[i] = Complex(e.at(0).as_double(), e.at(1).as_double());
      if (h.field == Field::real && out[i].imag() != 0.0) e.fail("real-tagged tensor has a nonzero imaginary part");
    } else {
      e.fail("expected a number or a [re, im] pair");
    }
  }
  return out;
}

}  // namespace detail

inline TTensor from_ttj(const JsonView& v) {
  if (v.has("domain") && v.at("domain").as_string() != "spatial") v.at("domain").fail("expected a spatial-domain tensor");
  const auto h = detail::read_ttj_header(v);
  return TTensor::from_complex(h.m, h.n, h.p, detail::read_ttj_data(v, h), h.field);
}

inline TTensor from_ttj(const json& j) { return from_ttj(JsonView(j)); }

inline json to_ttj(const BlockSpectrum& s) {
  json data = json::array();
  for (const auto& b : s.blocks())
    for (Eigen::Index i = 0; i < b.rows(); ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j) data.push_back(complex_to_json(b(i, j)));
  return json{{"m", s.m()},          {"n", s.m()},       {"p", s.p()},
              {"field", "complex"}, {"domain", "frequency"}, {"conjugate_symmetric", s.real_source()},
              {"data", data}};
}

inline BlockSpectrum spectrum_from_ttj(const JsonView& v) {
  if (v.at("domain").as_string() != "frequency") v.at("domain").fail("expected \"frequency\"");
  const auto h = detail::read_ttj_header(v);
  if (h.m != h.n) v.fail("frequency blocks must be square");
  const auto data = detail::read_ttj_data(v, h);
  std::vector<BlockMatrix> blocks(h.p, BlockMatrix(static_cast<Eigen::Index>(h.m), static_cast<Eigen::Index>(h.m)));
  for (std::size_t k = 0; k < h.p; ++k)
    for (std::size_t i = 0; i < h.m; ++i)
      for (std::size_t j = 0; j < h.m; ++j)
        blocks[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[(k * h.m + i) * h.m + j];
  return BlockSpectrum(std::move(blocks), v.get_bool("conjugate_symmetric", false));
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file", "", path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what(), "", path);
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot write file: " + path);
  out << text;
  if (!out) throw ResourceError("write failed: " + path);
}

}  // namespace tprod

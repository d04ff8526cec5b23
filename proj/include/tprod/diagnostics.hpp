#pragma once

#include <functional>
#include <iostream>
#include <string>
#include <utility>

namespace tprod {

using WarningSink = std::function<void(const std::string&)>;

inline WarningSink& warning_sink_storage() {
  static WarningSink sink = [](const std::string& msg) { std::cerr << "tprod warning: " << msg << '\n'; };
  return sink;
}

// Replace the warning sink (tests capture warnings through this). Returns the
// previous sink. Not synchronized: install before starting worker threads.
inline WarningSink set_warning_sink(WarningSink sink) {
  return std::exchange(warning_sink_storage(), std::move(sink));
}

inline void warn(const std::string& msg) {
  if (auto& sink = warning_sink_storage()) sink(msg);
}

}  // namespace tprod

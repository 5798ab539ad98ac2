#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>

namespace gaar::log {

enum class Level { kInfo, kWarning, kError };

using Sink = std::function<void(Level, std::string_view)>;

namespace detail {

struct State {
  std::mutex mu;
  Sink sink;
};

inline State& state() {
  static State s;
  return s;
}

inline std::string_view level_name(Level level) {
  switch (level) {
    case Level::kInfo:
      return "info";
    case Level::kWarning:
      return "warning";
    case Level::kError:
      return "error";
  }
  return "?";
}

}  // namespace detail

// Replaces the process-wide sink and returns the previous one. An empty sink
// restores the default (stderr).
inline Sink set_sink(Sink sink) {
  auto& s = detail::state();
  std::lock_guard lock(s.mu);
  return std::exchange(s.sink, std::move(sink));
}

inline void write(Level level, std::string_view message) {
  auto& s = detail::state();
  std::lock_guard lock(s.mu);
  if (s.sink) {
    s.sink(level, message);
    return;
  }
  std::cerr << "[gaar " << detail::level_name(level) << "] " << message
            << '\n';
}

inline void info(std::string_view message) { write(Level::kInfo, message); }
inline void warn(std::string_view message) { write(Level::kWarning, message); }
inline void error(std::string_view message) { write(Level::kError, message); }

}  // namespace gaar::log

#include "swa/log.h"

#include <iostream>
#include <mutex>

namespace swa::log {

namespace {
std::mutex g_mutex;
Sink g_sink;
}  // namespace

void warn(std::string_view message) {
  std::lock_guard lock(g_mutex);
  if (g_sink) {
    g_sink(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

Sink set_warning_sink(Sink sink) {
  std::lock_guard lock(g_mutex);
  Sink prev = std::move(g_sink);
  g_sink = std::move(sink);
  return prev;
}

}  // namespace swa::log

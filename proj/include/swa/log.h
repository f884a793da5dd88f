#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace swa::log {

using Sink = std::function<void(std::string_view)>;

// Thread-safe. Default sink prints "warning: <msg>" to stderr.
void warn(std::string_view message);

// Replaces the sink and returns the previous one. Pass {} to restore stderr.
Sink set_warning_sink(Sink sink);

}  // namespace swa::log

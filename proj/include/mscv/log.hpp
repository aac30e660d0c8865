#pragma once

#include <functional>
#include <string>

namespace mscv {

// Non-fatal diagnostics (mass loss, solver fallbacks). Default sink is stderr.
using WarningHandler = std::function<void(const std::string&)>;

WarningHandler set_warning_handler(WarningHandler h);
void warn(const std::string& msg);

}  // namespace mscv

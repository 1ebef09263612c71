#pragma once

#include <functional>
#include <string>

namespace spcv {

using WarningHandler = std::function<void(const std::string&)>;

// Default handler writes "warning: <msg>" to stderr.
void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace spcv

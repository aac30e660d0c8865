#include "mscv/log.hpp"

#include <iostream>
#include <mutex>

namespace mscv {

namespace {
std::mutex g_mu;
WarningHandler g_handler;
}  // namespace

WarningHandler set_warning_handler(WarningHandler h) {
    std::lock_guard lk(g_mu);
    std::swap(g_handler, h);
    return h;
}

void warn(const std::string& msg) {
    std::lock_guard lk(g_mu);
    if (g_handler)
        g_handler(msg);
    else
        std::cerr << "warning: " << msg << "\n";
}

}  // namespace mscv

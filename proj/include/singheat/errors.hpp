#pragma once

#include <stdexcept>
#include <string>

namespace singheat {

// Argument magnitude would overflow exp(); callers that can clamp should do
// so before calling into the nonlinearity.
struct overflow_error : std::runtime_error {
    explicit overflow_error(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed to meet its own tolerance or certificate
// (non-contraction, tail budget violation, bisection failure, ...).
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration or usage.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace singheat

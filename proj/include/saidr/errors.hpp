#pragma once

#include <stdexcept>

namespace saidr {

// Malformed files, configs or out-of-domain arguments.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An iterative numerical procedure failed its contract (non-convergence,
// step-size too large, ...).
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace saidr

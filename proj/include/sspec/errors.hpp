#pragma once

#include <stdexcept>
#include <string>

namespace sspec {

/// Invalid input (bad grid, bad parameters, out-of-domain arguments).
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A series or iteration failed to reach its tolerance within the cap.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A root/eigenvalue search window did not contain the expected root count.
struct bracketing_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive integrator stalled (step-size underflow) or diverged.
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sspec

#pragma once

#include <stdexcept>
#include <string>

namespace dscale {

/// Enumeration or series work exceeded its configured budget. Callers can
/// distinguish "too big" from "wrong".
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative solve hit its cap; carries the best bounds reached so far.
struct ConvergenceFailure : std::runtime_error {
    ConvergenceFailure(const std::string& what, double lower, double upper)
        : std::runtime_error(what), lower_bound(lower), upper_bound(upper) {}
    double lower_bound;
    double upper_bound;
};

struct InfeasiblePolytope : std::runtime_error {
    explicit InfeasiblePolytope(const std::string& what) : std::runtime_error(what) {}
};

struct UnboundedDirection : std::runtime_error {
    explicit UnboundedDirection(const std::string& what) : std::runtime_error(what) {}
};

struct InternalInvariantFailure : std::logic_error {
    explicit InternalInvariantFailure(const std::string& what) : std::logic_error(what) {}
};

}  // namespace dscale

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace dscale {

/// f(t) = c * t^q with c >= 0, q >= 1. Convex, nondecreasing, f(0) = 0.
struct PowerCost {
    double scale = 1.0;
    double exponent = 1.0;

    PowerCost() = default;
    PowerCost(double c, double q) : scale(c), exponent(q) {
        if (!(c >= 0.0)) throw std::invalid_argument("PowerCost: scale must be nonnegative");
        if (!(q >= 1.0)) throw std::domain_error("PowerCost: exponent must be >= 1");
    }

    double operator()(double t) const {
        if (t <= 0.0) return 0.0;
        return scale * std::pow(t, exponent);
    }
};

/// Piecewise-linear function given by breakpoints starting at 0, extended to
/// the right with the slope of the last segment. Convexity/concavity is a
/// property of the secant slopes, validated by the wrappers below.
struct PiecewiseLinear {
    std::vector<double> breakpoints;  // ascending, breakpoints[0] == 0
    std::vector<double> values;       // values[0] == 0

    double operator()(double t) const;
    double right_slope_at_end() const;

    /// Secant slopes of consecutive segments.
    std::vector<double> secant_slopes() const;

    void validate_basic() const;
};

inline void PiecewiseLinear::validate_basic() const {
    if (breakpoints.size() < 2 || breakpoints.size() != values.size())
        throw std::invalid_argument("PiecewiseLinear: need >= 2 matching breakpoints/values");
    if (breakpoints.front() != 0.0) throw std::invalid_argument("PiecewiseLinear: breakpoints must start at 0");
    if (values.front() != 0.0) throw std::invalid_argument("PiecewiseLinear: values[0] must be 0");
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw std::invalid_argument("PiecewiseLinear: breakpoints must be strictly ascending");
        if (values[i] < values[i - 1])
            throw std::invalid_argument("PiecewiseLinear: values must be nondecreasing");
        if (values[i] < 0.0)
            throw std::invalid_argument("PiecewiseLinear: values must be nonnegative");
    }
}

inline std::vector<double> PiecewiseLinear::secant_slopes() const {
    std::vector<double> s;
    s.reserve(breakpoints.size() - 1);
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        s.push_back((values[i] - values[i - 1]) / (breakpoints[i] - breakpoints[i - 1]));
    return s;
}

inline double PiecewiseLinear::right_slope_at_end() const {
    std::size_t m = breakpoints.size();
    return (values[m - 1] - values[m - 2]) / (breakpoints[m - 1] - breakpoints[m - 2]);
}

inline double PiecewiseLinear::operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= breakpoints.back())
        return values.back() + right_slope_at_end() * (t - breakpoints.back());
    // binary search for the segment containing t
    std::size_t lo = 0, hi = breakpoints.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (breakpoints[mid] <= t) lo = mid; else hi = mid;
    }
    double frac = (t - breakpoints[lo]) / (breakpoints[hi] - breakpoints[lo]);
    return values[lo] + frac * (values[hi] - values[lo]);
}

/// Tabulated convex nondecreasing cost with f(0) = 0.
struct TabulatedConvex {
    PiecewiseLinear table;

    explicit TabulatedConvex(PiecewiseLinear t) : table(std::move(t)) {
        table.validate_basic();
        auto slopes = table.secant_slopes();
        for (std::size_t i = 1; i < slopes.size(); ++i)
            if (slopes[i] < slopes[i - 1] - 1e-12)
                throw std::invalid_argument("TabulatedConvex: secant slopes must be nondecreasing");
    }

    double operator()(double t) const { return table(t); }
};

/// Tabulated concave nondecreasing gain with g(0) = 0 (for the maximization
/// side constant B(f)).
struct TabulatedConcave {
    PiecewiseLinear table;

    explicit TabulatedConcave(PiecewiseLinear t) : table(std::move(t)) {
        table.validate_basic();
        auto slopes = table.secant_slopes();
        for (std::size_t i = 1; i < slopes.size(); ++i)
            if (slopes[i] > slopes[i - 1] + 1e-12)
                throw std::invalid_argument("TabulatedConcave: secant slopes must be nonincreasing");
    }

    double operator()(double t) const { return table(t); }
};

/// Per-term cost function of the objective.
class CostFunction {
public:
    CostFunction(PowerCost p) : impl_(p) {}
    CostFunction(TabulatedConvex t) : impl_(std::move(t)) {}

    static CostFunction power(double scale, double exponent) { return CostFunction(PowerCost(scale, exponent)); }

    double operator()(double t) const {
        return std::visit([t](const auto& f) { return f(t); }, impl_);
    }

    bool is_power() const { return std::holds_alternative<PowerCost>(impl_); }
    const PowerCost& as_power() const { return std::get<PowerCost>(impl_); }
    const TabulatedConvex& as_tabulated() const { return std::get<TabulatedConvex>(impl_); }

    /// Bound P with t (log f(t))' <= P on the domain of interest; q for powers,
    /// caller-supplied for tabulated costs (no general recipe).
    std::optional<double> smoothness_bound() const {
        if (is_power()) return as_power().exponent;
        return std::nullopt;
    }

private:
    std::variant<PowerCost, TabulatedConvex> impl_;
};

}  // namespace dscale

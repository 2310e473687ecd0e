#include "dscale/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dscale {

double poisson_log_pmf(int t) {
    return -1.0 - std::lgamma(static_cast<double>(t) + 1.0);
}

double poisson_pmf(int t) { return std::exp(poisson_log_pmf(t)); }

double poisson_log_pmf(int t, double lambda) {
    if (lambda <= 0.0) return t == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return -lambda + t * std::log(lambda) - std::lgamma(static_cast<double>(t) + 1.0);
}

double poisson_pmf(int t, double lambda) { return std::exp(poisson_log_pmf(t, lambda)); }

PoissonTruncation truncate_for_growth(double growth, double bound) {
    if (!(bound > 0.0)) throw std::invalid_argument("truncate_for_growth: bound must be positive");
    double g = std::max(growth, 0.0);
    int t = std::max(4, static_cast<int>(std::ceil(g / std::log(2.0))) + 1);
    auto tail = [g](int T) {
        // sum_{t>T} t^g pmf(t) <= sup_{t>T} (t^g / 2^t) * E[2^P]
        //                       = e * (T+1)^g / 2^(T+1)  once t^g/2^t is decreasing.
        return std::exp(1.0 + g * std::log(static_cast<double>(T) + 1.0) -
                        (static_cast<double>(T) + 1.0) * std::log(2.0));
    };
    while (tail(t) >= bound && t < 4000) ++t;
    if (tail(t) >= bound)
        throw std::invalid_argument("truncate_for_growth: bound unreachable within support cap");
    return PoissonTruncation{t, tail(t)};
}

double fractional_bell(double q, double tol) {
    if (!(q >= 1.0)) throw std::domain_error("fractional_bell: q must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("fractional_bell: tol must be positive");
    PoissonTruncation trunc = truncate_for_growth(q, tol / 2.0);
    double sum = 0.0;
    for (int t = trunc.max_support; t >= 1; --t)
        sum += std::exp(q * std::log(static_cast<double>(t)) + poisson_log_pmf(t));
    return sum;
}

double expected_cost_of_scaled_poisson(const CostFunction& f, double t, double tail_bound) {
    if (t < 0.0) throw std::invalid_argument("expected_cost_of_scaled_poisson: t must be >= 0");
    if (t == 0.0) return f(0.0);
    if (f.is_power()) {
        const PowerCost& p = f.as_power();
        return p.scale * std::pow(t, p.exponent) * fractional_bell(p.exponent, tail_bound / std::max(1.0, p.scale));
    }
    // Tabulated: beyond the last breakpoint f(x) <= a + b x, so the neglected
    // tail of E[f(tP)] is at most a * Pr(P > T) + b t * E[P 1{P > T}], and
    // E[P 1{P>T}] = Pr(P >= T). Bound both with the growth-1 truncation.
    const PiecewiseLinear& tab = f.as_tabulated().table;
    double b = tab.right_slope_at_end();
    double a = tab.values.back();  // f(x) <= a + b*x for x >= 0 by convexity
    double scale = std::max(1.0, a + b * t);
    PoissonTruncation trunc = truncate_for_growth(1.0, tail_bound / (2.0 * scale));
    double sum = 0.0;
    for (int k = 1; k <= trunc.max_support; ++k)
        sum += f(t * static_cast<double>(k)) * poisson_pmf(k);
    return sum;
}

namespace {

// Ratio r(t) = E[f(tP)] / f(t) evaluated over a geometric grid of the
// positive t with f(t) > 0, refined until two refinement levels agree.
template <typename Ratio, typename Better>
std::pair<double, double> grid_opt(double t_max, double tol, Ratio ratio, Better better) {
    if (!(t_max > 0.0)) throw std::invalid_argument("grid search: t_max must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("grid search: tol must be positive");
    double best = 0.0, best_t = 0.0;
    bool have_any = false;
    double prev = 0.0;
    // Geometric grid spanning four decades below t_max, doubling density.
    for (int level = 0; level < 12; ++level) {
        int points = 32 << level;
        double lo = t_max * 1e-4;
        for (int i = 0; i <= points; ++i) {
            double t = lo * std::pow(t_max / lo, static_cast<double>(i) / points);
            auto r = ratio(t);
            if (!r.has_value()) continue;
            if (!have_any || better(*r, best)) { best = *r; best_t = t; }
            have_any = true;
        }
        if (level > 0 && have_any && std::abs(best - prev) < tol / 2.0) return {best, best_t};
        prev = best;
    }
    if (!have_any)
        throw std::invalid_argument("grid search: function vanishes at every sampled t (degenerate)");
    return {best, best_t};
}

}  // namespace

AmplificationResult amplification_factor(const CostFunction& f, double t_max, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("amplification_factor: tol must be positive");
    if (f.is_power()) {
        // A(c t^q) = A_q: both c and t^q cancel in the ratio.
        return AmplificationResult{fractional_bell(f.as_power().exponent, tol), 0.0};
    }
    auto ratio = [&](double t) -> std::optional<double> {
        double ft = f(t);
        if (!(ft > 0.0)) return std::nullopt;
        return expected_cost_of_scaled_poisson(f, t, tol * ft / 4.0) / ft;
    };
    auto [value, argmax] = grid_opt(t_max, tol, ratio, [](double a, double b) { return a > b; });
    return AmplificationResult{value, argmax};
}

ConcaveGainResult concave_gain(const TabulatedConcave& g, double t_max, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("concave_gain: tol must be positive");
    auto ratio = [&](double t) -> std::optional<double> {
        double gt = g(t);
        if (!(gt > 0.0)) return std::nullopt;
        // Concave g with g(0)=0 is subadditive, g(x) <= slope0 * x.
        double slope0 = g.table.secant_slopes().front();
        PoissonTruncation trunc = truncate_for_growth(1.0, tol * gt / (4.0 * std::max(1.0, slope0 * t)));
        double sum = 0.0;
        for (int k = 1; k <= trunc.max_support; ++k) sum += g(t * k) * poisson_pmf(k);
        return sum / gt;
    };
    auto [value, argmin] = grid_opt(t_max, tol, ratio, [](double a, double b) { return a < b; });
    return ConcaveGainResult{value, argmin};
}

}  // namespace dscale

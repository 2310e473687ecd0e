#pragma once

#include <cstdint>
#include <vector>

#include "dscale/cost_function.hpp"

namespace dscale {

/// Truncation of the unit-rate Poisson series: pmf terms for t = 0..max_support
/// plus a certified bound on the mass (and growth-weighted mass) beyond.
struct PoissonTruncation {
    int max_support = 0;
    double tail_mass_bound = 0.0;
};

/// log pmf of Poisson(1) at t: -1 - log(t!).
double poisson_log_pmf(int t);
double poisson_pmf(int t);

/// General-rate Poisson pmf (used by the Bernoulli and conditional checks).
double poisson_log_pmf(int t, double lambda);
double poisson_pmf(int t, double lambda);

/// Smallest truncation T such that sum_{t>T} t^growth * pmf(t) < bound,
/// certified via E[2^P] = e: the tail is at most e * (T+1)^growth / 2^(T+1)
/// once (T+1) >= growth / ln 2.
PoissonTruncation truncate_for_growth(double growth, double bound);

/// Fractional Bell number A_q = E[P^q] = sum_{t>=1} t^q e^{-1} / t!, within
/// +-tol. A_1 = 1, A_2 = 2; integer q gives the classical Bell numbers.
double fractional_bell(double q, double tol);

/// E[f(t P)] for Poisson(1) P, truncated so the neglected tail is below
/// tail_bound. For tabulated f the linear right extension makes the tail
/// growth at most linear.
double expected_cost_of_scaled_poisson(const CostFunction& f, double t, double tail_bound);

/// A(f) = sup_{t>0} E[f(tP)] / f(t). Closed form A_q for powers (scale and t
/// cancel); grid search over (0, t_max] for tabulated costs, geometric grid
/// refined until two refinements agree within tol.
struct AmplificationResult {
    double value = 1.0;
    double argmax_t = 0.0;  // grid point attaining the max (0 for powers)
};
AmplificationResult amplification_factor(const CostFunction& f, double t_max, double tol);

/// B(g) = inf_{t>0} E[g(tP)] / g(t) for concave nondecreasing g, g(0)=0.
/// Always in [1 - 1/e, 1].
struct ConcaveGainResult {
    double value = 1.0;
    double argmin_t = 0.0;
};
ConcaveGainResult concave_gain(const TabulatedConcave& g, double t_max, double tol);

}  // namespace dscale

// numerics.hpp - incomplete beta, beta posterior tails and bisection.
#pragma once

#include <cmath>
#include <stdexcept>

#include "glrdose/glr.hpp"

namespace glrdose {

/// Shape parameters of a Beta distribution; both strictly positive and not
/// necessarily integral.
struct BetaParams {
    double a = 1.0;
    double b = 1.0;
};

/// Regularized incomplete beta I_t(a, b), i.e. the Beta(a, b) CDF at t.
/// Continued fraction with the symmetry switch at t = (a + 1) / (a + b + 2).
double reg_inc_beta(BetaParams params, double t);

/// Probability that a Beta(a, b) variate falls in [lo, hi].
double beta_interval_mass(BetaParams params, double lo, double hi);

/// Posterior Pr(p > phi | n, x) under a uniform prior, i.e. 1 - I_phi(x + 1, n - x + 1).
double beta_tail_probability(DoseData data, TargetRate phi);

/// True iff the uniform-prior posterior tail Pr(p > phi | n, x) exceeds `threshold`.
bool beta_tail_exceeds(DoseData data, TargetRate phi, double threshold);

/// Default posterior tail threshold for dose elimination in interval designs.
inline constexpr double kBayesEliminationThreshold = 0.95;

/// Bisection for a root of `f` in [lo, hi]. `f(lo)` and `f(hi)` must have
/// opposite signs (or one of them be zero). Works for step functions too:
/// the result is then within `tol` of the sign change.
template <class F>
double bisect(F&& f, double lo, double hi, double tol, int max_iter = 200) {
    if (!(tol > 0.0)) throw std::invalid_argument("bisect: tolerance must be positive");
    if (!(lo < hi)) throw std::invalid_argument("bisect: need lo < hi");
    double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo < 0.0) == (f_hi < 0.0)) throw std::domain_error("bisect: no sign change in bracket");
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= 2.0 * tol) return mid;
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    throw std::runtime_error("bisect: no convergence within iteration limit");
}

}  // namespace glrdose

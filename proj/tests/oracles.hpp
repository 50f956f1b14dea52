// Independent reference computations used only by the tests.
#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "glrdose/glr.hpp"
#include "glrdose/isotonic.hpp"

namespace oracle {

/// Beta(a, b) CDF by composite Simpson quadrature of the density (a, b >= 1).
inline double beta_cdf_quadrature(double a, double b, double t, int intervals = 20000) {
    if (t <= 0.0) return 0.0;
    const long double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    auto density = [&](long double u) -> long double {
        if (u <= 0.0L || u >= 1.0L) {
            if ((u <= 0.0L && a == 1.0) || (u >= 1.0L && b == 1.0)) return std::exp(log_norm);
            return 0.0L;
        }
        return std::exp(log_norm + (a - 1) * std::log(u) + (b - 1) * std::log1p(-u));
    };
    const long double h = static_cast<long double>(t) / intervals;
    long double sum = density(0.0L) + density(t);
    for (int i = 1; i < intervals; ++i) sum += density(i * h) * (i % 2 ? 4.0L : 2.0L);
    return static_cast<double>(sum * h / 3.0L);
}

/// I_t(a, b) for integer a, b via the binomial tail sum.
inline double beta_cdf_binomial_sum(int a, int b, double t) {
    const int m = a + b - 1;
    long double total = 0.0L;
    for (int j = a; j <= m; ++j) {
        const long double log_choose = std::lgamma(m + 1.0L) - std::lgamma(j + 1.0L) - std::lgamma(m - j + 1.0L);
        total += std::exp(log_choose + j * std::log((long double)t) + (m - j) * std::log1p(-(long double)t));
    }
    return static_cast<double>(total);
}

/// Exhaustive maximisation of the joint log-likelihood over monotone rate
/// vectors on the grid {0, step, 2 step, ..., 1}, with p_c restricted to one
/// side of phi (side: -1 for p_c <= phi, +1 for p_c >= phi, 0 for none).
/// Dynamic programming over the chain gives the exact grid maximum.
inline double grid_sup_loglik(std::span<const glrdose::DoseData> data, int dose, double phi, int side,
                              double step = 1e-4) {
    const int g = static_cast<int>(std::lround(1.0 / step));
    std::vector<double> grid(g + 1);
    for (int k = 0; k <= g; ++k) grid[k] = static_cast<double>(k) / g;
    // phi must be representable; snap the closest node onto it.
    const int phi_node = static_cast<int>(std::lround(phi * g));
    grid[phi_node] = phi;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    auto term = [&](const glrdose::DoseData& d, double p) {
        if (d.n == 0) return 0.0;
        double v = 0.0;
        if (d.x > 0) v += p > 0.0 ? d.x * std::log(p) : neg_inf;
        if (d.n - d.x > 0) v += p < 1.0 ? (d.n - d.x) * std::log1p(-p) : neg_inf;
        return v;
    };
    std::vector<double> best(g + 1, 0.0);  // best value of the prefix ending at grid node k
    for (std::size_t i = 0; i < data.size(); ++i) {
        double running = neg_inf;
        std::vector<double> next(g + 1);
        for (int k = 0; k <= g; ++k) {
            running = std::max(running, best[k]);
            double own = term(data[i], grid[k]);
            if (static_cast<int>(i) + 1 == dose) {
                if (side < 0 && k > phi_node) own = neg_inf;
                if (side > 0 && k < phi_node) own = neg_inf;
            }
            next[k] = running + own;
        }
        best = std::move(next);
    }
    double out = neg_inf;
    for (double v : best) out = std::max(out, v);
    return out;
}

}  // namespace oracle

#include "glrdose/numerics.hpp"

#include <algorithm>
#include <limits>

namespace glrdose {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Modified Lentz evaluation of the continued fraction for I_t(a, b).
double beta_continued_fraction(double a, double b, double t) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * t / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * t / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * t / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("incomplete beta: continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(BetaParams params, double t) {
    const double a = params.a;
    const double b = params.b;
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("incomplete beta: shape parameters must be positive");
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("incomplete beta: t must lie in [0, 1]");
    if (t == 0.0) return 0.0;
    if (t == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(t) +
                             b * std::log1p(-t);
    const double front = std::exp(log_front);
    double value;
    if (t < (a + 1.0) / (a + b + 2.0)) {
        value = front * beta_continued_fraction(a, b, t) / a;
    } else {
        value = 1.0 - front * beta_continued_fraction(b, a, 1.0 - t) / b;
    }
    return std::clamp(value, 0.0, 1.0);
}

double beta_interval_mass(BetaParams params, double lo, double hi) {
    if (lo > hi) throw std::domain_error("beta interval: lo > hi");
    return std::max(0.0, reg_inc_beta(params, hi) - reg_inc_beta(params, lo));
}

double beta_tail_probability(DoseData data, TargetRate phi) {
    data.validate();
    if (data.n == 0) throw std::invalid_argument("posterior tail needs at least one patient");
    const BetaParams posterior{data.x + 1.0, static_cast<double>(data.n - data.x) + 1.0};
    return 1.0 - reg_inc_beta(posterior, phi.value());
}

bool beta_tail_exceeds(DoseData data, TargetRate phi, double threshold) {
    return beta_tail_probability(data, phi) > threshold;
}

}  // namespace glrdose

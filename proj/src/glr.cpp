#include "glrdose/glr.hpp"

#include <stdexcept>

#include "glrdose/format.hpp"

namespace glrdose {

namespace {

// count * log(p) with 0 log 0 = 0.
double xlogy(double count, double p) {
    if (count == 0.0) return 0.0;
    return count * std::log(p);
}

}  // namespace

void DoseData::validate() const {
    if (n < 0 || x < 0 || x > n) {
        throw std::invalid_argument("dose data requires 0 <= x <= n (got n=" + std::to_string(n) +
                                    ", x=" + std::to_string(x) + ")");
    }
}

TargetRate::TargetRate(double phi) : phi_(phi) {
    if (!(phi > 0.0 && phi < 1.0)) {
        throw std::invalid_argument("target DLT rate must lie in (0, 1)");
    }
}

EvidenceCutoffs::EvidenceCutoffs(double k1, double k2) : k1_(k1), k2_(k2) {
    if (!(k1 >= 1.0) || !(k2 >= 1.0)) {
        throw std::invalid_argument("evidence cut-offs k1 and k2 must both be >= 1");
    }
}

std::string_view to_string(Action action) {
    switch (action) {
        case Action::Escalate: return "Escalate";
        case Action::Stay: return "Stay";
        case Action::DeEscalate: return "DeEscalate";
    }
    return "?";
}

double log_glr_continuous(double p_hat, double n, TargetRate phi) {
    if (!(n > 0.0)) throw std::invalid_argument("log GLR needs n > 0");
    if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw std::invalid_argument("observed rate must lie in [0, 1]");
    const double events = n * p_hat;
    const double non_events = n * (1.0 - p_hat);
    const double at_mle = xlogy(events, p_hat) + xlogy(non_events, 1.0 - p_hat);
    const double at_target = xlogy(events, phi.value()) + xlogy(non_events, 1.0 - phi.value());
    // The supremum over the hypothesis containing p_hat is L(p_hat); the
    // other side is pinned at the boundary phi.
    return p_hat <= phi.value() ? at_mle - at_target : at_target - at_mle;
}

GlrValue glr_single(DoseData data, TargetRate phi) {
    data.validate();
    if (data.n == 0) throw std::invalid_argument("GLR is undefined without patients (n = 0)");
    const double p_hat = data.observed_rate();
    if (p_hat == phi.value()) return GlrValue{0.0};
    return GlrValue{log_glr_continuous(p_hat, data.n, phi)};
}

TransitionDecision transition_decision(GlrValue glr, const EvidenceCutoffs& cuts) {
    // Compared on the log scale: GLR >= k1 and GLR <= 1/k2.
    if (glr.log_value >= std::log(cuts.k1())) return {Action::Escalate, false};
    if (glr.log_value <= -std::log(cuts.k2())) return {Action::DeEscalate, false};
    return {Action::Stay, false};
}

bool eliminate_glr(DoseData data, TargetRate phi) {
    return glr_single(data, phi).log_value <= -std::log(kGlrEliminationRatio);
}

std::string format_glr(GlrValue glr, int decimals) {
    if (glr.log_value >= 0.0) return format_fixed(glr.value(), decimals < 0 ? 2 : decimals);
    const double reciprocal = std::exp(-glr.log_value);
    if (reciprocal > 100.0) return "<1/100";
    int places = decimals;
    if (places < 0) places = reciprocal >= 10.0 ? 1 : 2;
    return "1/" + format_fixed(reciprocal, places);
}

}  // namespace glrdose

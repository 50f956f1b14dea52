#include "glrdose/designs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "glrdose/numerics.hpp"

namespace glrdose {

namespace {

constexpr double kBoundarySlack = 1e-12;

void require_patients(DoseData data) {
    data.validate();
    if (data.n < 1) throw std::invalid_argument("a transition decision needs at least one patient");
}

}  // namespace

EquivalenceInterval::EquivalenceInterval(double lower, double upper) : lower_(lower), upper_(upper) {
    if (!(lower > 0.0 && lower < upper && upper < 1.0)) {
        throw std::invalid_argument("equivalence interval requires 0 < lower < upper < 1");
    }
}

EquivalenceInterval EquivalenceInterval::around(TargetRate phi, double half_width) {
    return {phi.value() - half_width, phi.value() + half_width};
}

BoinParams BoinParams::defaults(TargetRate phi) { return {0.6 * phi.value(), 1.4 * phi.value()}; }

void BoinParams::validate(TargetRate phi) const {
    if (!(phi1 > 0.0 && phi1 < phi.value() && phi.value() < phi2 && phi2 < 1.0)) {
        throw std::invalid_argument("BOIN requires 0 < phi1 < phi < phi2 < 1");
    }
}

Action classify_rate(double p_hat, const DecisionBoundaries& bounds) {
    if (p_hat <= bounds.escalate_at_or_below + kBoundarySlack) return Action::Escalate;
    if (p_hat >= bounds.deescalate_at_or_above - kBoundarySlack) return Action::DeEscalate;
    return Action::Stay;
}

DecisionBoundaries boin_boundaries(TargetRate phi, const BoinParams& params) {
    params.validate(phi);
    const double p = phi.value();
    const double p1 = params.phi1;
    const double p2 = params.phi2;
    const double lambda_e = std::log((1.0 - p1) / (1.0 - p)) / std::log(p * (1.0 - p1) / (p1 * (1.0 - p)));
    const double lambda_d = std::log((1.0 - p) / (1.0 - p2)) / std::log(p2 * (1.0 - p) / (p * (1.0 - p2)));
    return {lambda_e, lambda_d};
}

TransitionDecision boin_decision(DoseData data, const DecisionBoundaries& bounds) {
    require_patients(data);
    return {classify_rate(data.observed_rate(), bounds), false};
}

DecisionBoundaries teqr_boundaries(const EquivalenceInterval& ei) { return {ei.lower(), ei.upper()}; }

TransitionDecision teqr_decision(DoseData data, const EquivalenceInterval& ei) {
    require_patients(data);
    const double p_hat = data.observed_rate();
    if (p_hat < ei.lower() - kBoundarySlack) return {Action::Escalate, false};
    if (p_hat > ei.upper() + kBoundarySlack) return {Action::DeEscalate, false};
    return {Action::Stay, false};
}

DecisionBoundaries i3plus3_boundaries(int n, const EquivalenceInterval& ei) {
    if (n < 1) throw std::invalid_argument("i3+3 boundaries need n >= 1");
    return {ei.lower(), std::max(ei.upper(), ei.lower() + 1.0 / n)};
}

TransitionDecision i3plus3_decision(DoseData data, const EquivalenceInterval& ei) {
    require_patients(data);
    const double n = data.n;
    const double p_hat = data.x / n;
    if (p_hat < ei.lower() - kBoundarySlack) return {Action::Escalate, false};
    if (p_hat <= ei.upper() + kBoundarySlack) return {Action::Stay, false};
    // Above the interval: one fewer DLT would have meant escalation, so stay.
    if ((data.x - 1) / n < ei.lower() - kBoundarySlack) return {Action::Stay, false};
    return {Action::DeEscalate, false};
}

Action UnitProbabilityMass::argmax() const {
    // Exact ties (e.g. n = 2, x = 1 with (0.2, 0.3)) come out of the beta
    // function with rounding noise, so compare with a relative tolerance.
    const double best = std::max({upm[0], upm[1], upm[2]});
    auto ties_best = [best](double v) { return v >= best * (1.0 - 1e-12); };
    if (ties_best(upm[1])) return Action::Stay;
    if (ties_best(upm[0])) return Action::Escalate;
    return Action::DeEscalate;
}

UnitProbabilityMass mtpi_upm(double events, double non_events, const EquivalenceInterval& ei) {
    if (events < 0.0 || non_events < 0.0) throw std::invalid_argument("mTPI: negative counts");
    const BetaParams posterior{events + 1.0, non_events + 1.0};
    const double below = reg_inc_beta(posterior, ei.lower());
    const double upto_upper = reg_inc_beta(posterior, ei.upper());
    UnitProbabilityMass out;
    out.mass = {below, std::max(0.0, upto_upper - below), 1.0 - upto_upper};
    out.upm = {out.mass[0] / ei.lower(), out.mass[1] / (ei.upper() - ei.lower()), out.mass[2] / (1.0 - ei.upper())};
    return out;
}

TransitionDecision mtpi_decision(DoseData data, const EquivalenceInterval& ei) {
    require_patients(data);
    return {mtpi_upm(data.x, data.n - data.x, ei).argmax(), false};
}

Action mtpi_action_continuous(double p_hat, int n, const EquivalenceInterval& ei) {
    return mtpi_upm(n * p_hat, n * (1.0 - p_hat), ei).argmax();
}

DecisionBoundaries mtpi_boundaries(int n, const EquivalenceInterval& ei, double tol) {
    if (n < 1) throw std::invalid_argument("mTPI boundaries need n >= 1");
    // Indicators are -1 before the switch and +1 after it.
    auto past_escalation = [&](double p) {
        return mtpi_action_continuous(p, n, ei) == Action::Escalate ? -1.0 : 1.0;
    };
    auto in_deescalation = [&](double p) {
        return mtpi_action_continuous(p, n, ei) == Action::DeEscalate ? 1.0 : -1.0;
    };
    return {bisect(past_escalation, 0.0, 1.0, tol), bisect(in_deescalation, 0.0, 1.0, tol)};
}

EffectiveK effective_k(const DecisionBoundaries& bounds, int n, TargetRate phi) {
    if (n < 1) throw std::invalid_argument("effective k needs n >= 1");
    if (bounds.escalate_at_or_below > phi.value() || bounds.deescalate_at_or_above < phi.value()) {
        throw std::invalid_argument("effective k needs boundaries on either side of phi");
    }
    return {std::exp(log_glr_continuous(bounds.escalate_at_or_below, n, phi)),
            std::exp(-log_glr_continuous(bounds.deescalate_at_or_above, n, phi))};
}

TransitionDecision three_plus_three_decision(DoseData data) {
    data.validate();
    if (data.n == 3) {
        if (data.x == 0) return {Action::Escalate, false};
        if (data.x == 1) return {Action::Stay, false};
        return {Action::DeEscalate, false};
    }
    if (data.n == 6) {
        return {data.x <= 1 ? Action::Escalate : Action::DeEscalate, false};
    }
    throw std::invalid_argument("3+3 decisions are defined for n = 3 or n = 6 only");
}

KRange three_plus_three_k_ranges(TargetRate phi) {
    // Escalate iff GLR >= k1:   k1 <= min GLR(escalate), k1 > max GLR(otherwise).
    // De-escalate iff GLR <= 1/k2: k2 <= min 1/GLR(de-escalate), k2 > max 1/GLR(otherwise).
    KRange out;
    double k1_high = std::numeric_limits<double>::infinity();
    double k1_low = 1.0;
    double k2_high = std::numeric_limits<double>::infinity();
    double k2_low = 1.0;
    for (int n : {3, 6}) {
        for (int x = 0; x <= n; ++x) {
            const DoseData outcome{n, x};
            const double glr = glr_single(outcome, phi).value();
            const Action action = three_plus_three_decision(outcome).action;
            if (action == Action::Escalate) {
                if (glr < k1_high) { k1_high = glr; out.k1_high_driver = outcome; }
            } else if (glr > k1_low) {
                k1_low = glr;
                out.k1_low_driver = outcome;
            }
            if (action == Action::DeEscalate) {
                if (1.0 / glr < k2_high) { k2_high = 1.0 / glr; out.k2_high_driver = outcome; }
            } else if (1.0 / glr > k2_low) {
                k2_low = 1.0 / glr;
                out.k2_low_driver = outcome;
            }
        }
    }
    if (!(k1_low < k1_high) || !(k2_low < k2_high)) {
        throw std::runtime_error("no GLR design reproduces the 3+3 decisions at this target rate");
    }
    out.k1 = {k1_low, k1_high};
    out.k2 = {k2_low, k2_high};
    return out;
}

}  // namespace glrdose

// designs.hpp - transition rules of the common interval designs, their
// decision boundaries in the observed DLT rate, and the GLR cut-offs that
// reproduce those boundaries.
#pragma once

#include <array>
#include <string>

#include "glrdose/glr.hpp"

namespace glrdose {

/// The "stay" interval of TEQR, mTPI and i3+3. Requires 0 < lower < upper < 1.
class EquivalenceInterval {
public:
    EquivalenceInterval(double lower, double upper);

    /// (phi - half_width, phi + half_width); 0.05 is the customary width.
    static EquivalenceInterval around(TargetRate phi, double half_width = 0.05);

    double lower() const { return lower_; }
    double upper() const { return upper_; }

private:
    double lower_;
    double upper_;
};

/// BOIN's alternative rates phi1 < phi < phi2.
struct BoinParams {
    double phi1 = 0.0;
    double phi2 = 0.0;

    /// phi1 = 0.6 phi, phi2 = 1.4 phi.
    static BoinParams defaults(TargetRate phi);
    void validate(TargetRate phi) const;
};

/// Escalate when p_hat <= escalate_at_or_below, de-escalate when
/// p_hat >= deescalate_at_or_above, stay in between.
struct DecisionBoundaries {
    double escalate_at_or_below = 0.0;
    double deescalate_at_or_above = 1.0;
};

struct EffectiveK {
    double k1 = 1.0;
    double k2 = 1.0;
};

/// Half-open interval (low, high].
struct RangeOpenClosed {
    double low = 1.0;
    double high = 1.0;
};

struct KRange {
    RangeOpenClosed k1;
    RangeOpenClosed k2;
    // Outcomes (n, x) that pin each endpoint, for reporting.
    DoseData k1_low_driver, k1_high_driver, k2_low_driver, k2_high_driver;
};

/// Applies `bounds` to an observed rate. Comparisons allow 1e-12 slack so
/// rates that sit on a boundary in exact arithmetic resolve inclusively.
Action classify_rate(double p_hat, const DecisionBoundaries& bounds);

// BOIN ---------------------------------------------------------------------

DecisionBoundaries boin_boundaries(TargetRate phi, const BoinParams& params);
TransitionDecision boin_decision(DoseData data, const DecisionBoundaries& bounds);

// TEQR ---------------------------------------------------------------------

DecisionBoundaries teqr_boundaries(const EquivalenceInterval& ei);
/// Escalate below the interval, de-escalate above it, stay inside it.
TransitionDecision teqr_decision(DoseData data, const EquivalenceInterval& ei);

// i3+3 ---------------------------------------------------------------------

/// Continuous form: escalation at ei.lower, de-escalation at
/// max(ei.upper, ei.lower + 1/n).
DecisionBoundaries i3plus3_boundaries(int n, const EquivalenceInterval& ei);
TransitionDecision i3plus3_decision(DoseData data, const EquivalenceInterval& ei);

// mTPI (uniform prior) -------------------------------------------------------

/// Unit probability masses of the under-dosing, equivalence and over-dosing
/// intervals under a Beta(events + 1, non_events + 1) posterior.
struct UnitProbabilityMass {
    std::array<double, 3> mass{};  // interval probabilities
    std::array<double, 3> upm{};   // mass / interval length

    Action argmax() const;  // ties resolve toward Stay
};

UnitProbabilityMass mtpi_upm(double events, double non_events, const EquivalenceInterval& ei);
TransitionDecision mtpi_decision(DoseData data, const EquivalenceInterval& ei);

/// Action of the continuous extension at rate p_hat with n patients.
Action mtpi_action_continuous(double p_hat, int n, const EquivalenceInterval& ei);

/// Switch points of the mTPI argmax as p_hat sweeps [0, 1], found by bisection.
DecisionBoundaries mtpi_boundaries(int n, const EquivalenceInterval& ei, double tol = 1e-10);

// Effective evidence ---------------------------------------------------------

/// k1 = GLR at the escalation boundary, k2 = 1 / GLR at the de-escalation boundary.
EffectiveK effective_k(const DecisionBoundaries& bounds, int n, TargetRate phi);

// 3+3 ----------------------------------------------------------------------

/// Classical rule for n = 3 and n = 6; throws std::invalid_argument otherwise.
TransitionDecision three_plus_three_decision(DoseData data);

/// GLR cut-offs that reproduce every 3+3 decision at n = 3 and n = 6.
/// Throws std::runtime_error when no GLR design can (empty range).
KRange three_plus_three_k_ranges(TargetRate phi);

}  // namespace glrdose

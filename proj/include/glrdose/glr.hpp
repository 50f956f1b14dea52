// glr.hpp - single-dose generalized likelihood ratio evidence and the
// three-way dose transition rule built on it.
#pragma once

#include <cmath>
#include <string>
#include <string_view>

namespace glrdose {

/// Patients treated at one dose and how many of them had a DLT.
struct DoseData {
    int n = 0;
    int x = 0;

    /// Throws std::invalid_argument unless 0 <= x <= n.
    void validate() const;
    double observed_rate() const { return static_cast<double>(x) / n; }

    friend bool operator==(const DoseData&, const DoseData&) = default;
};

/// Target DLT probability, strictly inside (0, 1).
class TargetRate {
public:
    explicit TargetRate(double phi);
    double value() const { return phi_; }

private:
    double phi_;
};

/// Evidence required to escalate (k1) and to de-escalate (k2); both >= 1.
class EvidenceCutoffs {
public:
    EvidenceCutoffs(double k1, double k2);
    double k1() const { return k1_; }
    double k2() const { return k2_; }

private:
    double k1_;
    double k2_;
};

/// A GLR kept on the log scale. Values above 1 favour p <= phi.
struct GlrValue {
    double log_value = 0.0;

    double value() const { return std::exp(log_value); }
};

enum class Action { Escalate, Stay, DeEscalate };

struct TransitionDecision {
    Action action = Action::Stay;
    bool eliminate_current = false;

    friend bool operator==(const TransitionDecision&, const TransitionDecision&) = default;
};

std::string_view to_string(Action action);

/// GLR for H1: p <= phi against H2: p > phi from binomial data at one dose.
/// Evaluated in log space with 0 log 0 = 0. Requires n >= 1.
GlrValue glr_single(DoseData data, TargetRate phi);

/// log GLR with x replaced by n * p_hat, so p_hat may be any value in [0, 1].
/// Strictly decreasing in p_hat and zero at p_hat = phi. `n` may be fractional.
double log_glr_continuous(double p_hat, double n, TargetRate phi);

/// Escalate if GLR >= k1, de-escalate if GLR <= 1/k2, otherwise stay.
TransitionDecision transition_decision(GlrValue glr, const EvidenceCutoffs& cuts);

/// GLR cut-off below which a dose (and everything above it) is dropped.
inline constexpr double kGlrEliminationRatio = 3.87;

/// True iff glr_single(data, phi) <= 1 / 3.87.
bool eliminate_glr(DoseData data, TargetRate phi);

/// Renders a GLR in reciprocal form: "2.37" for values >= 1, "1/5.53" for
/// values below 1 and "<1/100" once the reciprocal exceeds 100. With the
/// default `decimals` (-1) values carry two decimals, except reciprocals of
/// 10 or more which keep three significant digits ("1/91.4"). A non-negative
/// `decimals` fixes the number of decimals everywhere.
std::string format_glr(GlrValue glr, int decimals = -1);

}  // namespace glrdose

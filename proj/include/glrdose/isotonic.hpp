// isotonic.hpp - joint binomial likelihood across doses under a monotone
// dose-toxicity curve.
//
// Dose indices in this header are 1-based; 0 means "no dose".
#pragma once

#include <span>
#include <vector>

#include "glrdose/glr.hpp"

namespace glrdose {

using TrialData = std::vector<DoseData>;
using RateVector = std::vector<double>;

enum class Side { AtMost, AtLeast };

/// sum_i x_i log p_i + (n_i - x_i) log(1 - p_i), with 0 log 0 = 0.
/// Returns -infinity when a rate of 0 or 1 contradicts the data.
double joint_loglik(std::span<const double> rates, std::span<const DoseData> data);

/// Weighted pool-adjacent-violators fit of the raw rates x_i / n_i with
/// weights n_i. This is the monotone maximum likelihood estimate.
///
/// Doses with n_i = 0 carry no likelihood. They take the value of the
/// nearest tried dose below them (or above, for leading gaps), which is one
/// of the maximisers. Throws if every dose is untried.
RateVector pava_mle(std::span<const DoseData> data);

/// Maximum joint log-likelihood over monotone rate vectors with
/// p_c <= phi (AtMost) or p_c >= phi (AtLeast).
double constrained_sup_loglik(std::span<const DoseData> data, int dose, TargetRate phi, Side side);

/// The maximiser behind constrained_sup_loglik.
RateVector constrained_mle(std::span<const DoseData> data, int dose, TargetRate phi, Side side);

/// Joint-likelihood GLR for p_c <= phi against p_c >= phi.
GlrValue glr_iso(std::span<const DoseData> data, int dose, TargetRate phi);

/// max{i : fitted p_i <= phi} over tried doses (n_i > 0); 0 if none qualifies.
int estimate_mtd(std::span<const DoseData> data, TargetRate phi);

/// The same rule applied to an already fitted curve; every entry is eligible.
int mtd_from_rates(std::span<const double> fitted, TargetRate phi);

}  // namespace glrdose

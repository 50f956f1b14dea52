// engine.hpp - dose-finding trial state machine and Monte Carlo study runner.
//
// Doses are numbered 1..D.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "glrdose/designs.hpp"
#include "glrdose/glr.hpp"
#include "glrdose/isotonic.hpp"

namespace glrdose {

enum class DesignKind { GlrSd, GlrIso, Boin, Teqr, Mtpi, I3plus3 };

std::string_view to_string(DesignKind kind);
/// Accepts the canonical names ("GlrSd", ...) and the usual spellings
/// ("GLR.sd", "glr-iso", "boin", "i3+3", ...). Throws std::invalid_argument.
DesignKind parse_design_kind(std::string_view name);

/// Which design drives the trial, with the parameters that design needs.
struct DesignSpec {
    DesignKind kind = DesignKind::GlrSd;
    std::optional<EvidenceCutoffs> cuts;    // GlrSd, GlrIso
    std::optional<EquivalenceInterval> ei;  // Teqr, Mtpi, I3plus3
    std::optional<BoinParams> boin;         // Boin

    static DesignSpec glr_sd(double k1, double k2);
    static DesignSpec glr_iso(double k1, double k2);
    /// Interval design with the customary settings for `phi`: BOIN with
    /// phi1 = 0.6 phi and phi2 = 1.4 phi, the others with (phi - 0.05, phi + 0.05).
    static DesignSpec interval(DesignKind kind, TargetRate phi);

    bool uses_glr() const { return kind == DesignKind::GlrSd || kind == DesignKind::GlrIso; }
    /// Throws std::invalid_argument when the parameters for `kind` are missing or invalid.
    void validate(TargetRate phi) const;
    /// Short label such as "GLR.sd" or "BOIN".
    std::string label() const;
};

/// Fixed settings of one trial.
struct TrialSettings {
    DesignSpec design;
    int doses = 6;
    TargetRate phi{0.25};
    int cohort_size = 3;
    int max_cohorts = 12;

    void validate() const;
};

struct CohortEntry {
    int dose = 1;
    int size = 0;
    int dlt = 0;
    Action action = Action::Stay;  // recommendation after this cohort
    bool eliminated = false;
    std::optional<double> log_glr;
};

struct TrialState {
    int current_dose = 1;
    TrialData per_dose;
    std::optional<int> eliminated_at_or_above;
    int cohorts_treated = 0;
    bool stopped = false;
    std::vector<CohortEntry> history;

    /// Highest dose that may still be assigned (0 once dose 1 is eliminated).
    int highest_available(int doses) const;
    int total_treated() const;
};

TrialState initial_state(const TrialSettings& settings);

struct StepResult {
    TrialState state;
    TransitionDecision design_decision;  // before elimination and clamping
    TransitionDecision decision;         // what the trial actually does next
    std::optional<GlrValue> glr;         // GLR designs only
    int next_dose = 1;
};

/// Adds one cohort's outcome at the current dose, applies the design's rule,
/// elimination and the range clamps, then moves the dose. Throws
/// std::logic_error on a stopped trial and std::invalid_argument on bad counts.
StepResult step(const TrialState& state, const TrialSettings& settings, int cohort_size, int dlt_count);

/// Design rule alone on accumulated data at the current dose (no elimination,
/// no clamping). `dose` is 1-based.
TransitionDecision design_rule(const DesignSpec& spec, std::span<const DoseData> per_dose, int dose,
                               TargetRate phi, std::optional<GlrValue>* glr_out = nullptr);

/// Overdose control: GLR designs drop a dose at GLR <= 1/3.87, the others
/// when the uniform-prior posterior Pr(p > phi) exceeds 0.95.
bool should_eliminate(const DesignSpec& spec, DoseData current, TargetRate phi);

/// MTD reported at the end of a trial: 0 if dose 1 was eliminated, otherwise
/// the isotonic estimate over tried doses, restricted to doses below any
/// eliminated level.
int final_mtd(const TrialState& state, TargetRate phi);

// Simulation -----------------------------------------------------------------

using Rng = std::mt19937_64;

/// Stream for trial `index` of a study seeded with `seed`.
Rng trial_rng(std::uint64_t seed, std::uint64_t index);

/// Uniform on the open interval (0, 1) from 53 random bits.
double uniform_open(Rng& rng);

struct Scenario {
    std::vector<double> true_rates;
    TargetRate phi{0.25};
    int true_mtd = 0;
};

/// Sorted sample of `doses` uniforms on (0, 2 phi).
Scenario scenario_gen(int doses, TargetRate phi, Rng& rng);
Scenario make_scenario(std::vector<double> rates, TargetRate phi);

struct TrialRecord {
    TrialData per_dose;
    std::vector<int> assignments;  // dose of each cohort in order
    int estimated_mtd = 0;
    int estimated_mtd_untried_eligible = 0;  // alternative convention, for sensitivity
    int true_mtd = 0;
    int over_treated = 0;
    int total_treated = 0;
    bool stopped_early = false;
};

TrialRecord run_trial(const TrialSettings& settings, const Scenario& scenario, Rng& rng);

struct StudyConfig {
    TrialSettings trial;
    int n_trials = 10000;
    std::uint64_t seed = 20240101;
    int threads = 0;  // 0: hardware concurrency
};

struct StudyMetrics {
    double pct_mtd = 0.0;
    double pct_ot = 0.0;                // pooled over all patients
    double pct_ot_per_trial_avg = 0.0;  // averaged per trial
    double n_ave = 0.0;
    double pct_stopped_early = 0.0;
    int n_trials = 0;
};

/// Runs `n_trials` independent trials, each on a fresh scenario. Results are
/// identical for a given seed whatever the thread count.
StudyMetrics run_study(const StudyConfig& config);

}  // namespace glrdose

#include "glrdose/engine.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <thread>

#include "glrdose/numerics.hpp"

namespace glrdose {

namespace {

std::string normalize(std::string_view name) {
    std::string out;
    for (char ch : name) {
        if (ch == '.' || ch == '-' || ch == '_' || ch == ' ') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

int binomial_draw(int size, double p, Rng& rng) {
    int events = 0;
    for (int i = 0; i < size; ++i) {
        if (uniform_open(rng) < p) ++events;
    }
    return events;
}

}  // namespace

std::string_view to_string(DesignKind kind) {
    switch (kind) {
        case DesignKind::GlrSd: return "GlrSd";
        case DesignKind::GlrIso: return "GlrIso";
        case DesignKind::Boin: return "Boin";
        case DesignKind::Teqr: return "Teqr";
        case DesignKind::Mtpi: return "Mtpi";
        case DesignKind::I3plus3: return "I3plus3";
    }
    return "?";
}

DesignKind parse_design_kind(std::string_view name) {
    const std::string key = normalize(name);
    if (key == "glrsd" || key == "glr") return DesignKind::GlrSd;
    if (key == "glriso") return DesignKind::GlrIso;
    if (key == "boin") return DesignKind::Boin;
    if (key == "teqr") return DesignKind::Teqr;
    if (key == "mtpi") return DesignKind::Mtpi;
    if (key == "i3plus3" || key == "i3+3") return DesignKind::I3plus3;
    throw std::invalid_argument("unknown design '" + std::string(name) + "'");
}

DesignSpec DesignSpec::glr_sd(double k1, double k2) {
    return {DesignKind::GlrSd, EvidenceCutoffs{k1, k2}, std::nullopt, std::nullopt};
}

DesignSpec DesignSpec::glr_iso(double k1, double k2) {
    return {DesignKind::GlrIso, EvidenceCutoffs{k1, k2}, std::nullopt, std::nullopt};
}

DesignSpec DesignSpec::interval(DesignKind kind, TargetRate phi) {
    switch (kind) {
        case DesignKind::Boin:
            return {kind, std::nullopt, std::nullopt, BoinParams::defaults(phi)};
        case DesignKind::Teqr:
        case DesignKind::Mtpi:
        case DesignKind::I3plus3:
            return {kind, std::nullopt, EquivalenceInterval::around(phi), std::nullopt};
        default:
            throw std::invalid_argument("DesignSpec::interval: not an interval design");
    }
}

void DesignSpec::validate(TargetRate phi) const {
    switch (kind) {
        case DesignKind::GlrSd:
        case DesignKind::GlrIso:
            if (!cuts) throw std::invalid_argument("GLR designs need k1 and k2");
            break;
        case DesignKind::Boin:
            if (!boin) throw std::invalid_argument("BOIN needs phi1 and phi2");
            boin->validate(phi);
            break;
        case DesignKind::Teqr:
        case DesignKind::Mtpi:
        case DesignKind::I3plus3:
            if (!ei) throw std::invalid_argument(std::string(to_string(kind)) + " needs an equivalence interval");
            if (!(ei->lower() < phi.value() && phi.value() < ei->upper())) {
                throw std::invalid_argument("equivalence interval must contain phi");
            }
            break;
    }
}

std::string DesignSpec::label() const {
    switch (kind) {
        case DesignKind::GlrSd: return "GLR.sd";
        case DesignKind::GlrIso: return "GLR.iso";
        case DesignKind::Boin: return "BOIN";
        case DesignKind::Teqr: return "TEQR";
        case DesignKind::Mtpi: return "mTPI";
        case DesignKind::I3plus3: return "i3+3";
    }
    return "?";
}

void TrialSettings::validate() const {
    if (doses < 1) throw std::invalid_argument("need at least one dose");
    if (cohort_size < 1) throw std::invalid_argument("cohort size must be >= 1");
    if (max_cohorts < 1) throw std::invalid_argument("max cohorts must be >= 1");
    design.validate(phi);
}

int TrialState::highest_available(int doses) const {
    return eliminated_at_or_above ? *eliminated_at_or_above - 1 : doses;
}

int TrialState::total_treated() const {
    int total = 0;
    for (const DoseData& d : per_dose) total += d.n;
    return total;
}

TrialState initial_state(const TrialSettings& settings) {
    settings.validate();
    TrialState state;
    state.per_dose.assign(static_cast<std::size_t>(settings.doses), DoseData{});
    return state;
}

TransitionDecision design_rule(const DesignSpec& spec, std::span<const DoseData> per_dose, int dose,
                               TargetRate phi, std::optional<GlrValue>* glr_out) {
    const DoseData current = per_dose[static_cast<std::size_t>(dose - 1)];
    switch (spec.kind) {
        case DesignKind::GlrSd: {
            const GlrValue glr = glr_single(current, phi);
            if (glr_out) *glr_out = glr;
            return transition_decision(glr, *spec.cuts);
        }
        case DesignKind::GlrIso: {
            const GlrValue glr = glr_iso(per_dose, dose, phi);
            if (glr_out) *glr_out = glr;
            return transition_decision(glr, *spec.cuts);
        }
        case DesignKind::Boin:
            return boin_decision(current, boin_boundaries(phi, *spec.boin));
        case DesignKind::Teqr:
            return teqr_decision(current, *spec.ei);
        case DesignKind::Mtpi:
            return mtpi_decision(current, *spec.ei);
        case DesignKind::I3plus3:
            return i3plus3_decision(current, *spec.ei);
    }
    throw std::logic_error("unhandled design kind");
}

bool should_eliminate(const DesignSpec& spec, DoseData current, TargetRate phi) {
    // Checked once the dose holds at least one standard cohort of 3.
    if (current.n < 3) return false;
    if (spec.uses_glr()) return eliminate_glr(current, phi);
    return beta_tail_exceeds(current, phi, kBayesEliminationThreshold);
}

StepResult step(const TrialState& state, const TrialSettings& settings, int cohort_size, int dlt_count) {
    if (state.stopped) throw std::logic_error("trial has already stopped");
    if (cohort_size < 1) throw std::invalid_argument("cohort size must be >= 1");
    if (dlt_count < 0 || dlt_count > cohort_size) throw std::invalid_argument("DLT count must lie in [0, cohort size]");

    StepResult out{state, {}, {}, std::nullopt, state.current_dose};
    TrialState& next = out.state;
    const int dose = state.current_dose;
    DoseData& current = next.per_dose[static_cast<std::size_t>(dose - 1)];
    current.n += cohort_size;
    current.x += dlt_count;
    ++next.cohorts_treated;

    out.design_decision = design_rule(settings.design, next.per_dose, dose, settings.phi, &out.glr);
    TransitionDecision decision = out.design_decision;

    if (should_eliminate(settings.design, current, settings.phi)) {
        next.eliminated_at_or_above = std::min(dose, next.eliminated_at_or_above.value_or(dose));
        decision = {Action::DeEscalate, true};
    } else {
        const int top = next.highest_available(settings.doses);
        if (decision.action == Action::Escalate && dose >= top) decision.action = Action::Stay;
        if (decision.action == Action::DeEscalate && dose <= 1) decision.action = Action::Stay;
    }
    out.decision = decision;

    int next_dose = dose;
    if (decision.action == Action::Escalate) ++next_dose;
    if (decision.action == Action::DeEscalate) --next_dose;
    next_dose = std::min(next_dose, next.highest_available(settings.doses));

    next.history.push_back({dose, cohort_size, dlt_count, decision.action, decision.eliminate_current,
                            out.glr ? std::optional<double>(out.glr->log_value) : std::nullopt});
    if (next_dose < 1) {
        next.stopped = true;
        next_dose = 1;
    }
    if (next.cohorts_treated >= settings.max_cohorts) next.stopped = true;
    next.current_dose = next_dose;
    out.next_dose = next_dose;
    return out;
}

int final_mtd(const TrialState& state, TargetRate phi) {
    const int ceiling = state.eliminated_at_or_above ? *state.eliminated_at_or_above - 1
                                                     : static_cast<int>(state.per_dose.size());
    if (ceiling < 1) return 0;
    const bool any_tried = std::any_of(state.per_dose.begin(), state.per_dose.end(),
                                       [](const DoseData& d) { return d.n > 0; });
    if (!any_tried) return 0;
    return std::min(estimate_mtd(state.per_dose, phi), ceiling);
}

Rng trial_rng(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t a = splitmix64(seed ^ splitmix64(index));
    const std::uint64_t b = splitmix64(a + index);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

double uniform_open(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

Scenario make_scenario(std::vector<double> rates, TargetRate phi) {
    if (rates.empty()) throw std::invalid_argument("scenario needs at least one dose");
    if (!std::is_sorted(rates.begin(), rates.end())) throw std::invalid_argument("true rates must be nondecreasing");
    Scenario s{std::move(rates), phi, 0};
    s.true_mtd = mtd_from_rates(s.true_rates, phi);
    return s;
}

Scenario scenario_gen(int doses, TargetRate phi, Rng& rng) {
    if (doses < 1) throw std::invalid_argument("scenario needs at least one dose");
    std::vector<double> rates(static_cast<std::size_t>(doses));
    for (double& p : rates) p = 2.0 * phi.value() * uniform_open(rng);
    std::sort(rates.begin(), rates.end());
    return make_scenario(std::move(rates), phi);
}

TrialRecord run_trial(const TrialSettings& settings, const Scenario& scenario, Rng& rng) {
    if (static_cast<int>(scenario.true_rates.size()) != settings.doses) {
        throw std::invalid_argument("scenario and settings disagree on the number of doses");
    }
    TrialState state = initial_state(settings);
    TrialRecord record;
    record.true_mtd = scenario.true_mtd;
    while (!state.stopped) {
        const int dose = state.current_dose;
        const int dlt = binomial_draw(settings.cohort_size, scenario.true_rates[static_cast<std::size_t>(dose - 1)], rng);
        record.assignments.push_back(dose);
        if (dose > scenario.true_mtd) record.over_treated += settings.cohort_size;
        state = step(state, settings, settings.cohort_size, dlt).state;
    }
    record.per_dose = state.per_dose;
    record.total_treated = state.total_treated();
    record.stopped_early = state.cohorts_treated < settings.max_cohorts;
    record.estimated_mtd = final_mtd(state, settings.phi);
    if (state.eliminated_at_or_above && *state.eliminated_at_or_above == 1) {
        record.estimated_mtd_untried_eligible = 0;
    } else {
        record.estimated_mtd_untried_eligible =
            std::min(mtd_from_rates(pava_mle(state.per_dose), settings.phi), state.highest_available(settings.doses));
    }
    return record;
}

StudyMetrics run_study(const StudyConfig& config) {
    config.trial.validate();
    if (config.n_trials < 1) throw std::invalid_argument("a study needs at least one trial");

    struct Summary {
        bool correct = false;
        bool stopped_early = false;
        int over_treated = 0;
        int treated = 0;
    };
    std::vector<Summary> summaries(static_cast<std::size_t>(config.n_trials));

    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng = trial_rng(config.seed, i);
            const Scenario scenario = scenario_gen(config.trial.doses, config.trial.phi, rng);
            const TrialRecord rec = run_trial(config.trial, scenario, rng);
            summaries[i] = {rec.estimated_mtd == rec.true_mtd, rec.stopped_early, rec.over_treated, rec.total_treated};
        }
    };

    unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
    threads = std::clamp(threads, 1u, static_cast<unsigned>(config.n_trials));
    if (threads == 1) {
        worker(0, summaries.size());
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (summaries.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(summaries.size(), begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
    }

    // Sequential reduction in trial order keeps floating-point sums reproducible.
    long correct = 0, stopped = 0, over = 0, treated = 0;
    double ot_fraction_sum = 0.0;
    for (const Summary& s : summaries) {
        correct += s.correct;
        stopped += s.stopped_early;
        over += s.over_treated;
        treated += s.treated;
        ot_fraction_sum += s.treated > 0 ? static_cast<double>(s.over_treated) / s.treated : 0.0;
    }
    const double trials = config.n_trials;
    StudyMetrics m;
    m.n_trials = config.n_trials;
    m.pct_mtd = 100.0 * correct / trials;
    m.pct_ot = treated > 0 ? 100.0 * static_cast<double>(over) / static_cast<double>(treated) : 0.0;
    m.pct_ot_per_trial_avg = 100.0 * ot_fraction_sum / trials;
    m.n_ave = static_cast<double>(treated) / trials;
    m.pct_stopped_early = 100.0 * stopped / trials;
    return m;
}

}  // namespace glrdose

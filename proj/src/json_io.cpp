#include "glrdose/json_io.hpp"

#include <stdexcept>

namespace glrdose {

namespace {

template <class T>
T required(const Json& j, const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw std::invalid_argument(std::string("field '") + key + "' has the wrong type");
    }
}

template <class T>
T optional_field(const Json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw std::invalid_argument(std::string("field '") + key + "' has the wrong type");
    }
}

}  // namespace

Json design_to_json(const DesignSpec& spec) {
    Json j{{"kind", std::string(to_string(spec.kind))}};
    if (spec.cuts) {
        j["k1"] = spec.cuts->k1();
        j["k2"] = spec.cuts->k2();
    }
    if (spec.ei) j["ei"] = {{"lower", spec.ei->lower()}, {"upper", spec.ei->upper()}};
    if (spec.boin) j["boin"] = {{"phi1", spec.boin->phi1}, {"phi2", spec.boin->phi2}};
    return j;
}

DesignSpec design_from_json(const Json& j, TargetRate phi) {
    if (!j.is_object()) throw std::invalid_argument("design must be a JSON object");
    const DesignKind kind = parse_design_kind(required<std::string>(j, "kind"));
    DesignSpec spec;
    spec.kind = kind;
    switch (kind) {
        case DesignKind::GlrSd:
        case DesignKind::GlrIso:
            spec.cuts = EvidenceCutoffs{required<double>(j, "k1"), required<double>(j, "k2")};
            break;
        case DesignKind::Boin:
            if (j.contains("boin")) {
                spec.boin = BoinParams{required<double>(j["boin"], "phi1"), required<double>(j["boin"], "phi2")};
            } else {
                spec.boin = BoinParams::defaults(phi);
            }
            break;
        case DesignKind::Teqr:
        case DesignKind::Mtpi:
        case DesignKind::I3plus3:
            if (j.contains("ei")) {
                spec.ei = EquivalenceInterval{required<double>(j["ei"], "lower"), required<double>(j["ei"], "upper")};
            } else {
                spec.ei = EquivalenceInterval::around(phi, optional_field<double>(j, "ei_half_width", 0.05));
            }
            break;
    }
    spec.validate(phi);
    return spec;
}

Json settings_to_json(const TrialSettings& s) {
    return {{"design", design_to_json(s.design)},
            {"doses", s.doses},
            {"phi", s.phi.value()},
            {"cohort_size", s.cohort_size},
            {"max_cohorts", s.max_cohorts}};
}

TrialSettings settings_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("trial settings must be a JSON object");
    const TargetRate phi{required<double>(j, "phi")};
    const int doses = required<int>(j, "doses");
    TrialSettings s{design_from_json(required<Json>(j, "design"), phi), doses, phi,
                    optional_field<int>(j, "cohort_size", 3), optional_field<int>(j, "max_cohorts", 2 * doses)};
    s.validate();
    return s;
}

Json metrics_to_json(const StudyMetrics& m) {
    return {{"pct_mtd", m.pct_mtd},
            {"pct_ot", m.pct_ot},
            {"pct_ot_per_trial_avg", m.pct_ot_per_trial_avg},
            {"n_ave", m.n_ave},
            {"pct_stopped_early", m.pct_stopped_early},
            {"n_trials", m.n_trials}};
}

void StudyGrid::validate() const {
    if (designs.empty()) throw std::invalid_argument("study grid lists no designs");
    if (phis.empty()) throw std::invalid_argument("study grid lists no target rates");
    if (doses.empty()) throw std::invalid_argument("study grid lists no dose counts");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (cohort_size < 1) throw std::invalid_argument("cohort size must be >= 1");
    if (max_cohorts <= 0 && max_cohorts_per_dose < 1) throw std::invalid_argument("max cohorts must be >= 1");
}

std::vector<StudyConfig> StudyGrid::expand() const {
    validate();
    std::vector<StudyConfig> out;
    for (int d : doses) {
        for (double p : phis) {
            const TargetRate phi{p};
            for (const Json& dj : designs) {
                StudyConfig c;
                c.trial = TrialSettings{design_from_json(dj, phi), d, phi, cohort_size,
                                        max_cohorts > 0 ? max_cohorts : max_cohorts_per_dose * d};
                c.trial.validate();
                c.n_trials = trials;
                c.seed = seed;
                c.threads = threads;
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

StudyGrid grid_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("study config must be a JSON object");
    StudyGrid g;
    g.designs = required<std::vector<Json>>(j, "designs");
    const Json& phi = required<Json>(j, "phi");
    g.phis = phi.is_array() ? phi.get<std::vector<double>>() : std::vector<double>{phi.get<double>()};
    const Json& doses = required<Json>(j, "doses");
    g.doses = doses.is_array() ? doses.get<std::vector<int>>() : std::vector<int>{doses.get<int>()};
    g.trials = optional_field<int>(j, "trials", g.trials);
    g.seed = optional_field<std::uint64_t>(j, "seed", g.seed);
    g.cohort_size = optional_field<int>(j, "cohort_size", g.cohort_size);
    g.max_cohorts_per_dose = optional_field<int>(j, "max_cohorts_per_dose", g.max_cohorts_per_dose);
    g.max_cohorts = optional_field<int>(j, "max_cohorts", 0);
    g.threads = optional_field<int>(j, "threads", 0);
    g.validate();
    return g;
}

StudyGrid reference_grid() {
    StudyGrid g;
    g.designs = {Json{{"kind", "Boin"}},
                 Json{{"kind", "Teqr"}},
                 Json{{"kind", "Mtpi"}},
                 Json{{"kind", "I3plus3"}},
                 Json{{"kind", "GlrSd"}, {"k1", 1.5}, {"k2", 1.05}},
                 Json{{"kind", "GlrSd"}, {"k1", 1.5}, {"k2", 1.1}},
                 Json{{"kind", "GlrIso"}, {"k1", 1.5}, {"k2", 1.05}},
                 Json{{"kind", "GlrIso"}, {"k1", 1.5}, {"k2", 1.1}}};
    g.phis = {0.2, 0.25, 0.3};
    g.doses = {4, 6, 8};
    return g;
}

}  // namespace glrdose

#include "glrdose/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <stdexcept>

#include "glrdose/format.hpp"

namespace glrdose {

namespace {

constexpr int kMaxTableN = 50;

void check_n_range(int n_min, int n_max) {
    if (n_min < 1 || n_max < n_min || n_max > kMaxTableN) {
        throw std::invalid_argument("need 1 <= n_min <= n_max <= 50");
    }
}

std::string lower(std::string s) {
    for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

Cell maybe_count(int value) { return value < 0 ? Cell{std::string("-")} : Cell{static_cast<long long>(value)}; }

}  // namespace

OutputTable glr_report(DoseData data, TargetRate phi, const EvidenceCutoffs& cuts) {
    const GlrValue glr = glr_single(data, phi);
    OutputTable t;
    t.headers = {"n", "x", "phi", "glr", "log_glr", "display", "decision", "eliminate"};
    t.add_row({static_cast<long long>(data.n), static_cast<long long>(data.x), Number{phi.value(), 2},
               Number{glr.value(), 4}, Number{glr.log_value, 4}, format_glr(glr),
               std::string(to_string(transition_decision(glr, cuts).action)),
               std::string(eliminate_glr(data, phi) ? "yes" : "no")});
    return t;
}

OutputTable glr_table(const std::vector<double>& phis, int n_min, int n_max) {
    check_n_range(n_min, n_max);
    if (phis.empty()) throw std::invalid_argument("glr table needs at least one target rate");
    std::vector<TargetRate> rates;
    for (double p : phis) rates.emplace_back(p);
    OutputTable t;
    t.headers = {"n", "x"};
    for (double p : phis) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "phi=%g", p);
        t.headers.emplace_back(buf);
    }
    for (int n = n_min; n <= n_max; ++n) {
        for (int x = 0; x <= n; ++x) {
            std::vector<Cell> row{static_cast<long long>(n), static_cast<long long>(x)};
            for (TargetRate phi : rates) row.emplace_back(format_glr(glr_single({n, x}, phi)));
            t.add_row(std::move(row));
        }
    }
    return t;
}

OutputTable decision_table(const DesignSpec& design, TargetRate phi, int n_min, int n_max) {
    check_n_range(n_min, n_max);
    design.validate(phi);
    if (design.kind == DesignKind::GlrIso) {
        throw std::invalid_argument("GLR.iso decisions depend on other doses and cannot be tabulated");
    }
    OutputTable t;
    t.headers = {"n", "escalate_max_x", "stay_x", "deescalate_min_x", "eliminate_min_x"};
    for (int n = n_min; n <= n_max; ++n) {
        int escalate_max = -1, stay_min = -1, stay_max = -1, deescalate_min = -1, eliminate_min = -1;
        for (int x = 0; x <= n; ++x) {
            const DoseData data{n, x};
            const std::vector<DoseData> single{data};
            const Action a = design_rule(design, single, 1, phi).action;
            if (a == Action::Escalate) escalate_max = x;
            if (a == Action::Stay) {
                if (stay_min < 0) stay_min = x;
                stay_max = x;
            }
            if (a == Action::DeEscalate && deescalate_min < 0) deescalate_min = x;
            if (eliminate_min < 0 && should_eliminate(design, data, phi)) eliminate_min = x;
        }
        std::string stay = "-";
        if (stay_min >= 0) stay = stay_min == stay_max ? std::to_string(stay_min)
                                                        : std::to_string(stay_min) + "-" + std::to_string(stay_max);
        t.add_row({static_cast<long long>(n), maybe_count(escalate_max), stay, maybe_count(deescalate_min),
                   maybe_count(eliminate_min)});
    }
    return t;
}

OutputTable effective_k_table(const std::vector<std::string>& designs, const std::vector<double>& phis, int n_min,
                              int n_max, double ei_half_width) {
    check_n_range(n_min, n_max);
    OutputTable t;
    t.headers = {"design", "phi", "n", "k1", "k2"};
    for (const std::string& raw : designs) {
        const std::string name = lower(raw);
        for (double p : phis) {
            const TargetRate phi{p};
            if (name == "3+3" || name == "3plus3") {
                const KRange r = three_plus_three_k_ranges(phi);
                t.add_row({std::string("3+3"), Number{p, 2}, std::string("3,6"),
                           format_fixed(r.k1.low, 2) + "-" + format_fixed(r.k1.high, 2),
                           format_fixed(r.k2.low, 2) + "-" + format_fixed(r.k2.high, 2)});
                continue;
            }
            const DesignKind kind = parse_design_kind(name);
            if (kind == DesignKind::GlrSd || kind == DesignKind::GlrIso) {
                throw std::invalid_argument("effective k is defined for interval designs and 3+3");
            }
            const EquivalenceInterval ei = EquivalenceInterval::around(phi, ei_half_width);
            const std::string label = DesignSpec::interval(kind, phi).label();
            for (int n = n_min; n <= n_max; ++n) {
                DecisionBoundaries bounds;
                switch (kind) {
                    case DesignKind::Boin: bounds = boin_boundaries(phi, BoinParams::defaults(phi)); break;
                    case DesignKind::Teqr: bounds = teqr_boundaries(ei); break;
                    case DesignKind::Mtpi: bounds = mtpi_boundaries(n, ei); break;
                    case DesignKind::I3plus3: bounds = i3plus3_boundaries(n, ei); break;
                    default: break;
                }
                const EffectiveK k = effective_k(bounds, n, phi);
                t.add_row({label, Number{p, 2}, static_cast<long long>(n), Number{k.k1, 2}, Number{k.k2, 2}});
            }
        }
    }
    return t;
}

OutputTable simulate_table(const StudyGrid& grid) {
    OutputTable t;
    t.headers = {"doses", "design", "k1", "k2", "phi", "pct_mtd", "pct_ot", "n_ave"};
    for (const StudyConfig& config : grid.expand()) {
        const StudyMetrics m = run_study(config);
        const DesignSpec& d = config.trial.design;
        const Cell k1 = d.cuts ? Cell{Number{d.cuts->k1(), 2}} : Cell{std::string()};
        const Cell k2 = d.cuts ? Cell{Number{d.cuts->k2(), 2}} : Cell{std::string()};
        t.add_row({static_cast<long long>(config.trial.doses), d.label(), k1, k2, Number{config.trial.phi.value(), 2},
                   Number{m.pct_mtd, 1}, Number{m.pct_ot, 1}, Number{m.n_ave, 1}});
    }
    return t;
}

OutputTable log_glr_curves(TargetRate phi, const std::vector<int>& ns, int points) {
    if (points < 2) throw std::invalid_argument("need at least two points per curve");
    OutputTable t;
    t.headers = {"n", "p_hat", "log_glr"};
    for (int n : ns) {
        if (n < 1) throw std::invalid_argument("curve needs n >= 1");
        for (int i = 0; i < points; ++i) {
            const double p_hat = static_cast<double>(i) / (points - 1);
            t.add_row({static_cast<long long>(n), Number{p_hat, 4}, Number{log_glr_continuous(p_hat, n, phi), 6}});
        }
    }
    return t;
}

OutputTable scenario_sample(int doses, TargetRate phi, int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("need at least one scenario");
    OutputTable t;
    t.headers = {"scenario", "dose", "true_rate", "true_mtd"};
    for (int s = 0; s < count; ++s) {
        Rng rng = trial_rng(seed, static_cast<std::uint64_t>(s));
        const Scenario sc = scenario_gen(doses, phi, rng);
        for (int d = 0; d < doses; ++d) {
            t.add_row({static_cast<long long>(s + 1), static_cast<long long>(d + 1),
                       Number{sc.true_rates[static_cast<std::size_t>(d)], 6}, static_cast<long long>(sc.true_mtd)});
        }
    }
    return t;
}

}  // namespace glrdose

// glrdose - command-line front end for GLR dose-finding tools.
#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "glrdose/commands.hpp"
#include "glrdose/service.hpp"

namespace {

using namespace glrdose;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("GLRDOSE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::invalid_argument("GLRDOSE_SEED must be a non-negative integer");
        }
    }
    return 20240101;
}

struct OutputOptions {
    std::string format = "csv";
    int precision = -1;

    void attach(CLI::App* app) {
        app->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));
        app->add_option("--precision", precision, "Decimals for every numeric cell (default: per column)");
    }
    void print(const OutputTable& table) const {
        std::optional<int> decimals;
        if (precision >= 0) decimals = precision;
        std::cout << render(table, parse_output_format(format), decimals);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GLR-based dose-finding: evidence, decision tables, design comparison, simulation and trial conduct"};
    app.require_subcommand(1);

    // glr
    auto* glr = app.add_subcommand("glr", "GLR for one dose's data");
    int glr_n = 0, glr_x = 0;
    double glr_phi = 0.25, glr_k1 = 1.5, glr_k2 = 1.05;
    OutputOptions glr_out;
    glr->add_option("--n", glr_n, "Patients treated")->required();
    glr->add_option("--x", glr_x, "Patients with a DLT")->required();
    glr->add_option("--phi", glr_phi, "Target DLT rate");
    glr->add_option("--k1", glr_k1, "Evidence required to escalate");
    glr->add_option("--k2", glr_k2, "Evidence required to de-escalate");
    glr_out.attach(glr);

    // glr-table
    auto* table = app.add_subcommand("glr-table", "GLR grid over (n, x) for one or more target rates");
    std::vector<double> table_phi{0.2, 0.25, 0.3};
    int table_n_min = 3, table_n_max = 6;
    OutputOptions table_out;
    table->add_option("--phi", table_phi, "Target DLT rates");
    table->add_option("--n-min", table_n_min);
    table->add_option("--n-max", table_n_max, "At most 50");
    table_out.attach(table);

    // decision-table
    auto* dtable = app.add_subcommand("decision-table", "Pre-computed dose transition rule");
    std::string dt_design = "GLR.sd";
    double dt_phi = 0.25, dt_k1 = 1.5, dt_k2 = 1.05;
    int dt_n_min = 1, dt_n_max = 12;
    OutputOptions dt_out;
    dtable->add_option("--design", dt_design, "GLR.sd, BOIN, TEQR, mTPI or i3+3");
    dtable->add_option("--phi", dt_phi);
    dtable->add_option("--k1", dt_k1);
    dtable->add_option("--k2", dt_k2);
    dtable->add_option("--n-min", dt_n_min);
    dtable->add_option("--n-max", dt_n_max, "At most 50");
    dt_out.attach(dtable);

    // effective-k
    auto* ek = app.add_subcommand("effective-k", "GLR cut-offs equivalent to other designs");
    std::vector<std::string> ek_designs{"3+3", "boin", "teqr", "mtpi", "i3+3"};
    std::vector<double> ek_phi{0.2, 0.25, 0.3};
    int ek_n_min = 3, ek_n_max = 6;
    double ek_half_width = 0.05;
    OutputOptions ek_out;
    ek->add_option("--design", ek_designs, "Designs: 3+3 boin teqr mtpi i3+3");
    ek->add_option("--phi", ek_phi);
    ek->add_option("--n-min", ek_n_min);
    ek->add_option("--n-max", ek_n_max);
    ek->add_option("--ei-half-width", ek_half_width, "Half width of the equivalence interval");
    ek_out.attach(ek);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo operating characteristics");
    std::string sim_config;
    bool sim_reference = false;
    std::vector<std::string> sim_designs;
    double sim_k1 = 1.5, sim_k2 = 1.05;
    std::vector<double> sim_phi;
    std::vector<int> sim_doses;
    std::optional<int> sim_trials, sim_threads, sim_cohort, sim_max_cohorts;
    std::optional<std::uint64_t> sim_seed;
    OutputOptions sim_out;
    sim->add_option("--config", sim_config, "JSON study grid file");
    sim->add_flag("--reference-grid", sim_reference, "All 8 designs x phi {0.2,0.25,0.3} x D {4,6,8}");
    sim->add_option("--design", sim_designs, "Designs (GLR designs take --k1/--k2)");
    sim->add_option("--k1", sim_k1);
    sim->add_option("--k2", sim_k2);
    sim->add_option("--phi", sim_phi);
    sim->add_option("--doses", sim_doses, "Number of doses D");
    sim->add_option("--trials", sim_trials, "Trials per study");
    sim->add_option("--seed", sim_seed, "Study seed (default: $GLRDOSE_SEED or 20240101)");
    sim->add_option("--threads", sim_threads, "Worker threads (0: all cores)");
    sim->add_option("--cohort-size", sim_cohort);
    sim->add_option("--max-cohorts", sim_max_cohorts, "Fixed M (default 2 D)");
    sim_out.attach(sim);

    // figure
    auto* fig = app.add_subcommand("figure", "Figure data as CSV");
    std::string fig_which = "log-glr";
    double fig_phi = 0.25;
    std::vector<int> fig_ns{3, 6};
    int fig_points = 101, fig_doses = 6, fig_count = 10;
    std::optional<std::uint64_t> fig_seed;
    OutputOptions fig_out;
    fig->add_option("--which", fig_which, "log-glr or scenarios")->check(CLI::IsMember({"log-glr", "scenarios"}));
    fig->add_option("--phi", fig_phi);
    fig->add_option("--n", fig_ns, "Sample sizes for log-glr curves");
    fig->add_option("--points", fig_points, "Points per curve");
    fig->add_option("--doses", fig_doses, "Doses per scenario");
    fig->add_option("--count", fig_count, "Number of scenarios");
    fig->add_option("--seed", fig_seed);
    fig_out.attach(fig);

    // serve
    auto* srv = app.add_subcommand("serve", "Run the trial-conduct HTTP service");
    std::string srv_host = "127.0.0.1", srv_data = "glrdose-data";
    int srv_port = 8080;
    srv->add_option("--host", srv_host);
    srv->add_option("--port", srv_port);
    srv->add_option("--data-dir", srv_data, "Directory for trial event logs");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*glr) {
            glr_out.print(glr_report({glr_n, glr_x}, TargetRate{glr_phi}, EvidenceCutoffs{glr_k1, glr_k2}));
        } else if (*table) {
            table_out.print(glr_table(table_phi, table_n_min, table_n_max));
        } else if (*dtable) {
            const TargetRate phi{dt_phi};
            const DesignKind kind = parse_design_kind(dt_design);
            const DesignSpec spec = (kind == DesignKind::GlrSd || kind == DesignKind::GlrIso)
                                        ? DesignSpec{kind, EvidenceCutoffs{dt_k1, dt_k2}, std::nullopt, std::nullopt}
                                        : DesignSpec::interval(kind, phi);
            dt_out.print(decision_table(spec, phi, dt_n_min, dt_n_max));
        } else if (*ek) {
            ek_out.print(effective_k_table(ek_designs, ek_phi, ek_n_min, ek_n_max, ek_half_width));
        } else if (*sim) {
            StudyGrid grid;
            if (!sim_config.empty()) {
                std::ifstream in(sim_config);
                if (!in) throw std::invalid_argument("cannot read config file '" + sim_config + "'");
                grid = grid_from_json(Json::parse(in));
            } else if (sim_reference) {
                grid = reference_grid();
            } else {
                if (sim_designs.empty()) throw std::invalid_argument("give --design, --config or --reference-grid");
                for (const std::string& d : sim_designs) {
                    Json j{{"kind", d}};
                    const DesignKind kind = parse_design_kind(d);
                    if (kind == DesignKind::GlrSd || kind == DesignKind::GlrIso) {
                        j["k1"] = sim_k1;
                        j["k2"] = sim_k2;
                    }
                    grid.designs.push_back(j);
                }
                grid.phis = sim_phi.empty() ? std::vector<double>{0.25} : sim_phi;
                grid.doses = sim_doses.empty() ? std::vector<int>{6} : sim_doses;
                grid.seed = default_seed();
            }
            if (sim_config.empty() && !sim_seed) grid.seed = default_seed();
            if (!sim_phi.empty()) grid.phis = sim_phi;
            if (!sim_doses.empty()) grid.doses = sim_doses;
            if (sim_trials) grid.trials = *sim_trials;
            if (sim_seed) grid.seed = *sim_seed;
            if (sim_threads) grid.threads = *sim_threads;
            if (sim_cohort) grid.cohort_size = *sim_cohort;
            if (sim_max_cohorts) grid.max_cohorts = *sim_max_cohorts;
            grid.validate();
            sim_out.print(simulate_table(grid));
        } else if (*fig) {
            const TargetRate phi{fig_phi};
            if (fig_which == "log-glr") {
                fig_out.print(log_glr_curves(phi, fig_ns, fig_points));
            } else {
                fig_out.print(scenario_sample(fig_doses, phi, fig_count, fig_seed.value_or(default_seed())));
            }
        } else if (*srv) {
            return serve(srv_host, srv_port, srv_data);
        }
    } catch (const std::exception& e) {
        std::cerr << "glrdose: error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

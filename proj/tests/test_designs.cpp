#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "glrdose/designs.hpp"
#include "oracles.hpp"
#include "reference_values.hpp"

using namespace glrdose;

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

// mTPI decision from UPMs built on the binomial-sum beta CDF.
Action mtpi_native(int n, int x, double lo, double hi) {
    const double below = oracle::beta_cdf_binomial_sum(x + 1, n - x + 1, lo);
    const double upto = oracle::beta_cdf_binomial_sum(x + 1, n - x + 1, hi);
    const double u1 = below / lo, u2 = (upto - below) / (hi - lo), u3 = (1.0 - upto) / (1.0 - hi);
    const double slack = 1e-12 * std::max({u1, u2, u3});
    if (u2 + slack >= u1 && u2 + slack >= u3) return Action::Stay;
    return u1 + slack >= u3 ? Action::Escalate : Action::DeEscalate;
}

DecisionBoundaries bounds_for(std::string_view design, int n, TargetRate phi) {
    const auto ei = EquivalenceInterval::around(phi);
    if (design == "BOIN") return boin_boundaries(phi, BoinParams::defaults(phi));
    if (design == "TEQR") return teqr_boundaries(ei);
    if (design == "mTPI") return mtpi_boundaries(n, ei);
    return i3plus3_boundaries(n, ei);
}

}  // namespace

TEST_CASE("BOIN boundaries") {
    const auto b = boin_boundaries(TargetRate{0.25}, BoinParams::defaults(TargetRate{0.25}));
    CHECK(b.escalate_at_or_below == doctest::Approx(0.1968).epsilon(1e-3));
    CHECK(b.deescalate_at_or_above == doctest::Approx(0.2984).epsilon(1e-3));
    const auto tight = boin_boundaries(TargetRate{0.25}, BoinParams{0.2499, 0.2501});
    CHECK(tight.escalate_at_or_below == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(tight.deescalate_at_or_above == doctest::Approx(0.25).epsilon(1e-3));
    CHECK_THROWS_AS(boin_boundaries(TargetRate{0.25}, BoinParams{0.25, 0.35}), std::invalid_argument);
    CHECK_THROWS_AS(boin_boundaries(TargetRate{0.25}, BoinParams{0.15, 0.25}), std::invalid_argument);
}

TEST_CASE("TEQR boundaries and rule") {
    const auto b = teqr_boundaries(EquivalenceInterval::around(TargetRate{0.25}));
    CHECK(b.escalate_at_or_below == doctest::Approx(0.20));
    CHECK(b.deescalate_at_or_above == doctest::Approx(0.30));
    const auto ei = EquivalenceInterval::around(TargetRate{0.2});
    CHECK(ei.lower() == doctest::Approx(0.15));
    CHECK(ei.upper() == doctest::Approx(0.25));
    CHECK(teqr_decision({6, 0}, ei).action == Action::Escalate);
    CHECK(teqr_decision({4, 1}, ei).action == Action::Stay);  // exactly on the upper edge
    CHECK(teqr_decision({3, 1}, ei).action == Action::DeEscalate);
    CHECK_THROWS_AS(EquivalenceInterval(0.3, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(EquivalenceInterval(0.0, 0.2), std::invalid_argument);
}

TEST_CASE("i3+3 rule") {
    const EquivalenceInterval ei{0.2, 0.3};
    CHECK(i3plus3_decision({3, 0}, ei).action == Action::Escalate);
    CHECK(i3plus3_decision({3, 1}, ei).action == Action::Stay);
    CHECK(i3plus3_decision({3, 2}, ei).action == Action::DeEscalate);
    CHECK(i3plus3_decision({6, 2}, ei).action == Action::Stay);
    CHECK(i3plus3_decision({6, 3}, ei).action == Action::DeEscalate);
    CHECK(i3plus3_boundaries(3, ei).deescalate_at_or_above == doctest::Approx(0.2 + 1.0 / 3));
    CHECK(i3plus3_boundaries(12, ei).deescalate_at_or_above == doctest::Approx(0.3));
}

TEST_CASE("mTPI unit probability masses") {
    const EquivalenceInterval ei{0.2, 0.3};
    const auto u0 = mtpi_upm(0, 3, ei);
    CHECK(u0.upm[0] == doctest::Approx(2.952).epsilon(1e-9));
    CHECK(u0.upm[1] == doctest::Approx(1.695).epsilon(1e-9));
    CHECK(u0.upm[2] == doctest::Approx(0.343).epsilon(1e-9));
    CHECK(u0.argmax() == Action::Escalate);

    const auto u1 = mtpi_upm(1, 2, ei);
    CHECK(u1.upm[0] == doctest::Approx(0.904).epsilon(1e-9));
    CHECK(u1.upm[1] == doctest::Approx(1.675).epsilon(1e-9));
    CHECK(u1.upm[2] == doctest::Approx(0.931).epsilon(1e-3));
    CHECK(mtpi_decision({3, 1}, ei).action == Action::Stay);

    // Beta(4, 4): compare with quadrature.
    const auto u3 = mtpi_upm(3, 3, ei);
    CHECK(u3.mass[2] == doctest::Approx(1.0 - oracle::beta_cdf_quadrature(4, 4, 0.3)).epsilon(1e-8));
    CHECK(mtpi_decision({6, 3}, ei).action == Action::DeEscalate);

    for (int n = 1; n <= 12; ++n) {
        for (int x = 0; x <= n; ++x) {
            const auto u = mtpi_upm(x, n - x, ei);
            CHECK(u.mass[0] + u.mass[1] + u.mass[2] == doctest::Approx(1.0).epsilon(1e-9));
            for (double v : u.upm) CHECK(v >= 0.0);
        }
    }

    UnitProbabilityMass tie;
    tie.upm = {1.0, 1.0, 0.5};
    CHECK(tie.argmax() == Action::Stay);
    tie.upm = {0.5, 1.0, 1.0};
    CHECK(tie.argmax() == Action::Stay);
    // Beta(2, 2): Stay and DeEscalate masses per unit length are both 1.12.
    CHECK(mtpi_decision({2, 1}, ei).action == Action::Stay);
}

TEST_CASE("mTPI boundaries are switch points") {
    const EquivalenceInterval ei{0.2, 0.3};
    for (int n = 3; n <= 6; ++n) {
        const auto b = mtpi_boundaries(n, ei);
        CHECK(mtpi_action_continuous(b.escalate_at_or_below - 1e-7, n, ei) == Action::Escalate);
        CHECK(mtpi_action_continuous(b.escalate_at_or_below + 1e-7, n, ei) != Action::Escalate);
        CHECK(mtpi_action_continuous(b.deescalate_at_or_above - 1e-7, n, ei) != Action::DeEscalate);
        CHECK(mtpi_action_continuous(b.deescalate_at_or_above + 1e-7, n, ei) == Action::DeEscalate);
    }
}

TEST_CASE("boundaries reproduce each design's native rule for n <= 6") {
    for (double p : {0.2, 0.25, 0.3}) {
        const TargetRate phi{p};
        const auto ei = EquivalenceInterval::around(phi);
        for (int n = 1; n <= 6; ++n) {
            for (int x = 0; x <= n; ++x) {
                CAPTURE(p);
                CAPTURE(n);
                CAPTURE(x);
                const DoseData d{n, x};
                const double rate = d.observed_rate();
                const auto bb = boin_boundaries(phi, BoinParams::defaults(phi));
                CHECK(classify_rate(rate, bb) == boin_decision(d, bb).action);
                CHECK(classify_rate(rate, mtpi_boundaries(n, ei)) == mtpi_native(n, x, ei.lower(), ei.upper()));
                CHECK(mtpi_decision(d, ei).action == mtpi_native(n, x, ei.lower(), ei.upper()));

                // TEQR and i3+3 treat the interval edges as inside it. Only
                // rates off the edges are comparable with inclusive boundaries.
                const bool on_edge =
                    std::abs(rate - ei.lower()) < 1e-9 || std::abs(rate - ei.upper()) < 1e-9;
                if (on_edge) {
                    CHECK(teqr_decision(d, ei).action == Action::Stay);
                } else {
                    CHECK(classify_rate(rate, teqr_boundaries(ei)) == teqr_decision(d, ei).action);
                }
                if (std::abs(rate - ei.lower()) >= 1e-9) {
                    CHECK(classify_rate(rate, i3plus3_boundaries(n, ei)) == i3plus3_decision(d, ei).action);
                }
            }
        }
    }
}

TEST_CASE("effective k reproduces the published interval-design table") {
    for (const auto& cell : reference::kEffectiveK) {
        CAPTURE(cell.design);
        CAPTURE(cell.n);
        CAPTURE(cell.phi);
        const TargetRate phi{cell.phi};
        const EffectiveK k = effective_k(bounds_for(cell.design, cell.n, phi), cell.n, phi);
        CHECK(round2(k.k1) == doctest::Approx(cell.k1).epsilon(1e-9));
        CHECK(round2(k.k2) == doctest::Approx(cell.k2).epsilon(1e-9));
    }
}

TEST_CASE("effective k at the target is one") {
    for (double p : {0.1, 0.2, 0.25, 0.3, 0.6}) {
        for (int n = 1; n <= 20; ++n) {
            const EffectiveK k = effective_k({p, p}, n, TargetRate{p});
            CHECK(k.k1 == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(k.k2 == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(effective_k({0.3, 0.4}, 3, TargetRate{0.25}), std::invalid_argument);
}

TEST_CASE("3+3 rule and equivalent GLR cut-offs") {
    CHECK(three_plus_three_decision({3, 0}).action == Action::Escalate);
    CHECK(three_plus_three_decision({3, 1}).action == Action::Stay);
    CHECK(three_plus_three_decision({3, 2}).action == Action::DeEscalate);
    CHECK(three_plus_three_decision({6, 1}).action == Action::Escalate);
    CHECK(three_plus_three_decision({6, 2}).action == Action::DeEscalate);
    CHECK_THROWS_AS(three_plus_three_decision({4, 1}), std::invalid_argument);

    for (const auto& cell : reference::kThreePlusThree) {
        CAPTURE(cell.phi);
        const TargetRate phi{cell.phi};
        const KRange r = three_plus_three_k_ranges(phi);
        CHECK(round2(r.k1.low) == doctest::Approx(cell.k1_low));
        CHECK(round2(r.k1.high) == doctest::Approx(cell.k1_high));
        CHECK(round2(r.k2.low) == doctest::Approx(cell.k2_low));
        CHECK(round2(r.k2.high) == doctest::Approx(cell.k2_high));

        // Any cut-off pair strictly inside both ranges reproduces every 3+3 decision.
        const EvidenceCutoffs cuts{0.5 * (r.k1.low + r.k1.high), 0.5 * (r.k2.low + r.k2.high)};
        for (int n : {3, 6}) {
            for (int x = 0; x <= n; ++x) {
                CAPTURE(n);
                CAPTURE(x);
                CHECK(transition_decision(glr_single({n, x}, phi), cuts).action ==
                      three_plus_three_decision({n, x}).action);
            }
        }
    }
}

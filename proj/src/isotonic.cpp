#include "glrdose/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace glrdose {

namespace {

double xlogy(double count, double p) {
    if (count == 0.0) return 0.0;
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    return count * std::log(p);
}

double dose_loglik(double p, DoseData d) { return xlogy(d.x, p) + xlogy(d.n - d.x, 1.0 - p); }

void check_dose(std::span<const DoseData> data, int dose) {
    if (data.empty()) throw std::invalid_argument("trial data must cover at least one dose");
    if (dose < 1 || dose > static_cast<int>(data.size())) throw std::out_of_range("dose index out of range");
}

struct Block {
    long events;
    long patients;
    std::size_t last;  // index into `tried`
    double mean() const { return static_cast<double>(events) / static_cast<double>(patients); }
};

// PAVA over a contiguous range; entries with n = 0 are filled from their
// neighbours. Returns false (and leaves `out` untouched) if nothing is tried.
bool pava_range(std::span<const DoseData> data, std::span<double> out) {
    std::vector<std::size_t> tried;
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i].validate();
        if (data[i].n > 0) tried.push_back(i);
    }
    if (tried.empty()) return false;

    std::vector<Block> blocks;
    blocks.reserve(tried.size());
    for (std::size_t k = 0; k < tried.size(); ++k) {
        const DoseData& d = data[tried[k]];
        blocks.push_back({d.x, d.n, k});
        // Merge while the previous block's mean exceeds the new one's.
        // Cross-multiplied integer comparison keeps pooling exact.
        while (blocks.size() > 1) {
            const Block& b = blocks.back();
            const Block& a = blocks[blocks.size() - 2];
            if (a.events * b.patients <= b.events * a.patients) break;
            Block merged{a.events + b.events, a.patients + b.patients, b.last};
            blocks.pop_back();
            blocks.back() = merged;
        }
    }

    std::size_t k = 0;
    for (const Block& b : blocks) {
        const double m = b.mean();
        for (; k <= b.last; ++k) out[tried[k]] = m;
    }
    // Untried doses: carry the previous fitted value forward, leading gaps
    // take the first fitted value.
    double carry = out[tried.front()];
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i].n > 0) {
            carry = out[i];
        } else {
            out[i] = carry;
        }
    }
    return true;
}

}  // namespace

double joint_loglik(std::span<const double> rates, std::span<const DoseData> data) {
    if (rates.size() != data.size()) throw std::invalid_argument("joint_loglik: rate and data lengths differ");
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i].validate();
        if (data[i].n == 0) continue;
        total += dose_loglik(rates[i], data[i]);
    }
    return total;
}

RateVector pava_mle(std::span<const DoseData> data) {
    RateVector fit(data.size(), 0.0);
    if (!pava_range(data, fit)) throw std::invalid_argument("pava_mle: no dose has any patients");
    return fit;
}

RateVector constrained_mle(std::span<const DoseData> data, int dose, TargetRate phi, Side side) {
    check_dose(data, dose);
    const double bound = phi.value();
    const std::size_t c = static_cast<std::size_t>(dose - 1);
    auto satisfies = [&](double p) { return side == Side::AtMost ? p <= bound : p >= bound; };

    // Candidate pinned at p_c = phi. Below c the curve must stay <= phi and
    // above c >= phi; each side is an isotonic fit clipped at phi.
    RateVector pinned(data.size(), bound);
    if (c > 0) {
        std::span<double> lower(pinned.data(), c);
        if (pava_range(data.first(c), lower)) {
            for (double& p : lower) p = std::min(p, bound);
        }
    }
    if (c + 1 < data.size()) {
        std::span<double> upper(pinned.data() + c + 1, data.size() - c - 1);
        if (pava_range(data.subspan(c + 1), upper)) {
            for (double& p : upper) p = std::max(p, bound);
        }
    }

    // Unconstrained fit, when it already satisfies the hypothesis.
    bool any_tried = std::any_of(data.begin(), data.end(), [](const DoseData& d) { return d.n > 0; });
    if (!any_tried) return pinned;
    RateVector fit = pava_mle(data);
    if (data[c].n == 0) {
        // Any value between the neighbours is optimal; pick the one closest to phi.
        const double lo = c > 0 ? fit[c - 1] : 0.0;
        const double hi = c + 1 < fit.size() ? fit[c + 1] : 1.0;
        fit[c] = std::clamp(bound, lo, hi);
    }
    if (satisfies(fit[c]) && joint_loglik(fit, data) >= joint_loglik(pinned, data)) return fit;
    return pinned;
}

double constrained_sup_loglik(std::span<const DoseData> data, int dose, TargetRate phi, Side side) {
    return joint_loglik(constrained_mle(data, dose, phi, side), data);
}

GlrValue glr_iso(std::span<const DoseData> data, int dose, TargetRate phi) {
    check_dose(data, dose);
    if (data[static_cast<std::size_t>(dose - 1)].n < 1) {
        throw std::invalid_argument("glr_iso: the current dose has no patients");
    }
    const double at_most = constrained_sup_loglik(data, dose, phi, Side::AtMost);
    const double at_least = constrained_sup_loglik(data, dose, phi, Side::AtLeast);
    return GlrValue{at_most - at_least};
}

int mtd_from_rates(std::span<const double> fitted, TargetRate phi) {
    int mtd = 0;
    for (std::size_t i = 0; i < fitted.size(); ++i) {
        if (fitted[i] <= phi.value()) mtd = static_cast<int>(i) + 1;
    }
    return mtd;
}

int estimate_mtd(std::span<const DoseData> data, TargetRate phi) {
    const RateVector fit = pava_mle(data);
    int mtd = 0;
    for (std::size_t i = 0; i < fit.size(); ++i) {
        if (data[i].n > 0 && fit[i] <= phi.value()) mtd = static_cast<int>(i) + 1;
    }
    return mtd;
}

}  // namespace glrdose

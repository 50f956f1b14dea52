// json_io.hpp - JSON encodings shared by the CLI config file and the service.
#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "glrdose/engine.hpp"

namespace glrdose {

using Json = nlohmann::json;

/// {"kind": "GlrSd", "k1": 1.5, "k2": 1.05} / {"kind": "Teqr", "ei": {"lower", "upper"}} /
/// {"kind": "Boin", "boin": {"phi1", "phi2"}}.
Json design_to_json(const DesignSpec& spec);

/// Inverse of design_to_json. Interval designs without explicit parameters
/// get the customary defaults for `phi`; "ei_half_width" overrides the 0.05
/// half width. Throws std::invalid_argument on malformed input.
DesignSpec design_from_json(const Json& j, TargetRate phi);

Json settings_to_json(const TrialSettings& settings);
TrialSettings settings_from_json(const Json& j);

Json metrics_to_json(const StudyMetrics& metrics);

/// A batch of studies: every design crossed with every phi and dose count.
///
///   {
///     "trials": 10000, "seed": 1, "cohort_size": 3,
///     "max_cohorts_per_dose": 2,          // M = 2 D unless "max_cohorts" is given
///     "phi": [0.2, 0.25, 0.3], "doses": [4, 6, 8],
///     "designs": [{"kind": "BOIN"}, {"kind": "GLR.sd", "k1": 1.5, "k2": 1.05}]
///   }
struct StudyGrid {
    std::vector<Json> designs;
    std::vector<double> phis;
    std::vector<int> doses;
    int trials = 10000;
    std::uint64_t seed = 20240101;
    int cohort_size = 3;
    int max_cohorts_per_dose = 2;
    int max_cohorts = 0;  // fixed M when positive
    int threads = 0;

    void validate() const;
    /// Expanded study list, ordered by doses, then phi, then design.
    std::vector<StudyConfig> expand() const;
};

StudyGrid grid_from_json(const Json& j);

/// The full design grid of the published simulation study.
StudyGrid reference_grid();

}  // namespace glrdose

// rispkg - RIS-aided physical-layer key generation simulator for multi-cell systems
// Copyright (C) 2026 rispkg developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISPKG_EXPERIMENT_HPP
#define RISPKG_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rispkg/ao.hpp"
#include "rispkg/channel.hpp"

namespace rispkg {

/// A named scenario: geometry, fading and system defaults plus the dBm figures
/// they were derived from.
struct ScenarioPreset {
    std::string name;
    ScenarioGeometry geometry;
    FadingParams fading;
    SystemConfig config;
    double transmit_power_dbm = 45.0;
    double ut_power_dbm = 45.0;
    double noise_power_dbm = -90.0;
    double pathloss_ref_db = -30.0;  // zeta0
};

/// Known presets: "two-cell", "four-cell". Unknown names raise config_error
/// listing the available ones.
ScenarioPreset preset(const std::string& name);
std::vector<std::string> preset_names();

enum class SweepVariable { transmit_power_dbm, ris_elements, ris_x_m, ut_x_m };

std::string to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(const std::string& s);

enum class Scheme { proposed, no_ris, rand_phase };

std::string to_string(Scheme s);

/// Batch experiment description. See docs/experiment-config.md for the schema.
struct ExperimentConfig {
    std::string preset_name = "two-cell";
    std::optional<ScenarioGeometry> geometry_override;

    SweepVariable sweep = SweepVariable::ris_elements;
    std::vector<double> sweep_values;

    // base system parameters; a swept parameter's base value is ignored
    int antennas = 4;
    int rf_chains = 4;
    int ris_elements = 80;
    int ris_count = 0;  // 0 = preset default
    std::vector<double> weights;
    double transmit_power_dbm = 45.0;
    double ut_power_dbm = 45.0;
    double noise_power_dbm = -90.0;
    double pathloss_ref_db = -30.0;
    double rician_beta = 3.0;

    uint64_t seed = 1;
    int draws = 20;         // independent covariance draws, shared across schemes
    int cov_samples = 400;  // realizations per covariance estimate
    int probe_rounds = 256;
    int jobs = 1;
    bool analytic_direct = false;
    std::vector<Scheme> schemes{Scheme::proposed, Scheme::no_ris, Scheme::rand_phase};

    std::string output_path;     // CSV destination; empty = do not write
    std::string bits_output_dir;  // when set, packed key bits are exported here

    AOOptions ao;

    static ExperimentConfig parse(const std::string& json_text);
    static ExperimentConfig load(const std::string& path);
    void validate() const;
    /// Human-readable one-line-per-field summary (used by --validate).
    std::string describe() const;
};

/// One emitted table row: per (sweep value, scheme) averages over draws.
/// Rates are in bits per channel use.
struct ResultRow {
    double sweep_value = 0.0;
    Scheme scheme = Scheme::proposed;
    double wskr_bits = 0.0;
    double wskr_ub_bits = 0.0;
    double bdr = 0.0;
    double outer_iters = 0.0;
    std::string seed_hash;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::string csv;  // exact emitted table, header included
};

/// Full sweep: for every (sweep value, draw), estimate covariances once, run all
/// schemes on them, evaluate WSKR/upper bound/BDR, and average per scheme.
/// Deterministic given the config (independent of jobs). Writes output_path when
/// set. Row order: sweep value ascending, then scheme name.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::string to_csv(const std::vector<ResultRow>& rows);

}  // namespace rispkg

#endif

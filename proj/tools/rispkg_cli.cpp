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

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "rispkg/experiment.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rispkg - multi-cell RIS-aided secret key generation experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string bits_dir;
    uint64_t seed = 0;
    int draws = 0;
    int jobs = 0;
    bool validate_only = false;

    auto* run = app.add_subcommand("run", "Run a batch experiment from a JSON config");
    run->add_option("config", config_path, "Experiment config file (JSON)")->required();
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--draws", draws, "Override the covariance draw count");
    run->add_option("--out", out_path, "Override the result CSV path");
    run->add_option("--jobs", jobs, "Worker threads over sweep points and draws");
    run->add_option("--bits-out", bits_dir,
                    "Directory for exported key bits (packed binary, LSB-first "
                    "bit order within each byte)");
    run->add_flag("--validate", validate_only, "Parse and validate the config, then exit");

    CLI11_PARSE(app, argc, argv);

    try {
        rispkg::ExperimentConfig cfg = rispkg::ExperimentConfig::load(config_path);
        if (run->count("--seed")) cfg.seed = seed;
        if (run->count("--draws")) cfg.draws = draws;
        if (run->count("--out")) cfg.output_path = out_path;
        if (run->count("--jobs")) cfg.jobs = jobs;
        if (run->count("--bits-out")) cfg.bits_output_dir = bits_dir;
        cfg.validate();

        if (validate_only) {
            std::cout << "config ok\n" << cfg.describe();
            return 0;
        }

        const rispkg::ExperimentResult result = rispkg::run_experiment(cfg);
        if (cfg.output_path.empty()) {
            std::cout << result.csv;
        } else {
            std::cout << "wrote " << result.rows.size() << " rows to " << cfg.output_path << "\n";
        }
        return 0;
    } catch (const rispkg::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const rispkg::numerical_error& e) {
        std::cerr << "numerical consistency failure: " << e.what() << "\n";
        return kExitNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

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

#include "rispkg/types.hpp"

#include <cmath>

#include "rispkg/linalg.hpp"

namespace rispkg {

Eigen::VectorXd SystemConfig::effective_weights() const {
    if (weights.size() == 0) {
        return Eigen::VectorXd::Ones(cells);
    }
    return weights;
}

void SystemConfig::validate() const {
    if (cells < 1) throw config_error("SystemConfig: cells must be >= 1");
    if (antennas < 1) throw config_error("SystemConfig: antennas must be >= 1");
    if (rf_chains < 1 || rf_chains > antennas) {
        throw config_error("SystemConfig: rf_chains must satisfy 1 <= M_e <= M");
    }
    if (ris_count < 1 || ris_elements < 1) {
        throw config_error("SystemConfig: ris_count and ris_elements must be >= 1");
    }
    if (!(power_budget > 0.0) || !std::isfinite(power_budget)) {
        throw config_error("SystemConfig: power_budget must be positive and finite");
    }
    if (weights.size() != 0) {
        if (weights.size() != cells) {
            throw config_error("SystemConfig: weights length must equal cells");
        }
        if ((weights.array() < 0.0).any()) {
            throw config_error("SystemConfig: weights must be nonnegative");
        }
    }
}

double PrecoderSet::max_power() const {
    double p = 0.0;
    for (const auto& m : mats) p = std::max(p, m.squaredNorm());
    return p;
}

void PrecoderSet::validate(const SystemConfig& config) const {
    if (cells() != config.cells) {
        throw std::invalid_argument("PrecoderSet: matrix count does not match cells");
    }
    for (const auto& m : mats) {
        if (m.rows() != config.rf_chains || m.cols() != config.antennas) {
            throw std::invalid_argument("PrecoderSet: matrix must be M_e x M");
        }
        if (!m.allFinite()) throw std::invalid_argument("PrecoderSet: non-finite entries");
        if (m.squaredNorm() > config.power_budget + 1e-8) {
            throw std::invalid_argument("PrecoderSet: power budget violated");
        }
    }
}

PrecoderSet PrecoderSet::scaled_identity(const SystemConfig& config) {
    PrecoderSet p;
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(config.rf_chains, config.antennas);
    block.leftCols(config.rf_chains) =
        Eigen::MatrixXcd::Identity(config.rf_chains, config.rf_chains);
    block *= std::sqrt(config.power_budget / config.antennas);
    p.mats.assign(static_cast<size_t>(config.cells), block);
    return p;
}

void PhaseVector::validate(double tol) const {
    if (v_bar.size() == 0) throw std::invalid_argument("PhaseVector: empty");
    for (Eigen::Index n = 0; n < v_bar.size(); ++n) {
        if (std::abs(std::abs(v_bar(n)) - 1.0) > tol) {
            throw std::invalid_argument("PhaseVector: entry is not unit-modulus");
        }
    }
}

PhaseVector PhaseVector::ones(int n) {
    PhaseVector p;
    p.v_bar = Eigen::VectorXcd::Ones(n);
    return p;
}

PhaseVector PhaseVector::random(int n, uint64_t seed) {
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
    PhaseVector p;
    p.v_bar.resize(n);
    for (int i = 0; i < n; ++i) {
        p.v_bar(i) = std::polar(1.0, uni(rng));
    }
    return p;
}

}  // namespace rispkg

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

#ifndef RISPKG_TYPES_HPP
#define RISPKG_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rispkg {

using cplx = std::complex<double>;

/// Raised for invalid scenario/experiment configuration. Maps to exit code 2 in the CLI.
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a computed quantity violates a consistency bound (e.g. a rate
/// below -1e-9, a conditioning limit). Maps to exit code 3 in the CLI.
class numerical_error : public std::runtime_error {
  public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Static system dimensions and the per-BS power budget.
///
/// All powers are in normalized units: the probing noise has unit variance and
/// the uplink pilot has unit magnitude, as in the signal model. Scenario presets
/// translate dBm figures into these units (see experiment.hpp).
struct SystemConfig {
    int cells = 1;         // K
    int antennas = 1;      // M
    int rf_chains = 1;     // M_e <= M
    int ris_count = 1;     // L
    int ris_elements = 1;  // N per RIS
    double power_budget = 1.0;  // P_A, Frobenius-norm^2 budget per BS
    Eigen::VectorXd weights;    // per-cell weights; empty means all ones

    int phase_dim() const { return ris_count * ris_elements; }
    int cascade_dim() const { return antennas * phase_dim(); }

    Eigen::VectorXd effective_weights() const;
    void validate() const;
};

/// Per-BS precoding matrices P_i (M_e x M), power-constrained by C1.
struct PrecoderSet {
    std::vector<Eigen::MatrixXcd> mats;

    int cells() const { return static_cast<int>(mats.size()); }
    double power(int i) const { return mats[static_cast<size_t>(i)].squaredNorm(); }
    double max_power() const;

    /// Checks dimensions and the per-BS power budget (tolerance 1e-8).
    void validate(const SystemConfig& config) const;

    /// Default initialization sqrt(P_A/M) [I_{M_e} 0].
    static PrecoderSet scaled_identity(const SystemConfig& config);
};

/// The conjugated RIS phase vector v_bar = v*, one unit-modulus entry per element.
struct PhaseVector {
    Eigen::VectorXcd v_bar;

    int size() const { return static_cast<int>(v_bar.size()); }
    void validate(double tol = 1e-10) const;

    static PhaseVector ones(int n);
    static PhaseVector random(int n, uint64_t seed);
};

/// Per-cell key rates in nats per channel use, their upper bounds, and the
/// weighted sum. Invariants: rate >= 0, rate <= upper_bound + 1e-9,
/// weighted_sum = sum_k w_k rate_k.
struct RateReport {
    Eigen::VectorXd rate;
    Eigen::VectorXd upper_bound;
    double weighted_sum = 0.0;
};

}  // namespace rispkg

#endif

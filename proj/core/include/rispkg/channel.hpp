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

#ifndef RISPKG_CHANNEL_HPP
#define RISPKG_CHANNEL_HPP

#include <cstdint>
#include <vector>

#include "rispkg/types.hpp"

namespace rispkg {

/// Node placements in meters. Heights are the z coordinates.
/// The array axes fix the line-of-sight steering ramps of the Rician links;
/// the RIS axis is tilted out of the x axis by default because the reference
/// scenarios are collinear in x and end-fire ramps alias at half-wavelength
/// spacing.
struct ScenarioGeometry {
    std::vector<Eigen::Vector3d> bs_positions;
    std::vector<Eigen::Vector3d> ut_positions;
    std::vector<Eigen::Vector3d> ris_positions;
    Eigen::Vector3d bs_axis{1.0, 0.0, 0.0};
    Eigen::Vector3d ris_axis{M_SQRT1_2, 0.0, M_SQRT1_2};

    void validate(const SystemConfig& config) const;
};

/// Large/small-scale fading parameters in normalized units (unit noise variance).
/// pilot_gain is the uplink pilot-power-to-noise ratio; it scales each
/// end-to-end channel once (applied to the BS-UT and RIS-UT link amplitudes).
struct FadingParams {
    double zeta0 = 1e-3;       // path loss at 1 m, linear power gain
    double alpha_bu = 3.75;    // BS-UT exponent
    double alpha_ris = 2.2;    // BS-RIS and RIS-UT exponent
    double rician_beta = 3.0;  // Rician factor of the RIS links, linear
    double noise_power = 1.0;  // normalized
    double pilot_gain = 1.0;
    bool random_los_phase = true;  // random initial phase per LoS ray per realization

    void validate() const;
};

/// One Monte-Carlo draw of every physical link.
/// h_d[i][j]: BS i -> UT j (M); G[i][l]: BS i -> RIS l (M x N); h_r[l][j]: RIS l -> UT j (N).
struct ChannelRealization {
    std::vector<std::vector<Eigen::VectorXcd>> h_d;
    std::vector<std::vector<Eigen::MatrixXcd>> G;
    std::vector<std::vector<Eigen::VectorXcd>> h_r;
    int cells = 0;
    int antennas = 0;
    int ris_count = 0;
    int ris_elements = 0;

    /// Horizontal concatenation [G_{i,1}, ..., G_{i,L}] (M x NL).
    Eigen::MatrixXcd stacked_g(int i) const;
    /// Stacked RIS-UT vector [h_{1,j}; ...; h_{L,j}] (NL).
    Eigen::VectorXcd stacked_h_r(int j) const;
    /// Cascade matrix H^r_{i,j} = G_i diag(h_j) (M x NL).
    Eigen::MatrixXcd cascade(int i, int j) const;
};

/// Second moments R^d_{i,j} = E{h h^H} (M x M) and R^r_{i,j} = E{vec(H^r) vec(H^r)^H}
/// (MNL x MNL), Hermitian PSD.
struct CovarianceSet {
    std::vector<std::vector<Eigen::MatrixXcd>> direct;
    std::vector<std::vector<Eigen::MatrixXcd>> ris;
    int cells = 0;
    int antennas = 0;
    int phase_dim = 0;  // NL

    void validate(double hermitian_tol = 1e-10, double psd_tol = 1e-8) const;
    /// Copy with all RIS-cascade covariances zeroed (the No-RIS baseline input).
    CovarianceSet with_zero_ris() const;
};

/// Amplitude gain sqrt(zeta0 d^-alpha). Throws std::domain_error for d <= 0.
double path_loss(double distance_m, double zeta0, double alpha);

/// Draws one realization: Rayleigh direct links, Rician RIS links with
/// deterministic geometry ramps (optionally phase-randomized per ray).
/// Identical seeds give bit-identical realizations.
ChannelRealization sample_realization(const ScenarioGeometry& geometry, const FadingParams& fading,
                                      const SystemConfig& config, uint64_t seed);

/// h_{i,j} = h^d_{i,j} + sum_l G_{i,l} diag(v_l) h^r_{l,j},  with v = conj(v_bar).
Eigen::VectorXcd effective_channel(const ChannelRealization& realization, int i, int j,
                                   const PhaseVector& phases);

struct CovEstimationOptions {
    int batch = 64;              // rank-update batch width
    bool analytic_direct = false;  // replace sampled R^d by its exact i.i.d. Rayleigh value
};

/// Sample second moments over n_samples independent realizations, Hermitian-symmetrized.
/// Direct and RIS links consume separate seed streams so that estimates of R^d are
/// reproducible across different RIS sizes.
CovarianceSet estimate_covariances(const ScenarioGeometry& geometry, const FadingParams& fading,
                                   const SystemConfig& config, int n_samples, uint64_t seed,
                                   const CovEstimationOptions& options = {});

}  // namespace rispkg

#endif

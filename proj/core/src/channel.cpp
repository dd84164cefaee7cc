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

#include "rispkg/channel.hpp"

#include <cmath>

#include "rispkg/linalg.hpp"

namespace rispkg {

namespace {

bool finite3(const Eigen::Vector3d& v) { return v.allFinite(); }

// half-wavelength ULA phase ramp for direction cosine u along the array axis
Eigen::VectorXcd steering(int n, double u) {
    Eigen::VectorXcd a(n);
    for (int i = 0; i < n; ++i) {
        a(i) = std::polar(1.0, M_PI * i * u);
    }
    return a;
}

double direction_cosine(const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                        const Eigen::Vector3d& axis) {
    const Eigen::Vector3d d = to - from;
    return d.dot(axis) / d.norm();
}

}  // namespace

void ScenarioGeometry::validate(const SystemConfig& config) const {
    if (static_cast<int>(bs_positions.size()) != config.cells ||
        static_cast<int>(ut_positions.size()) != config.cells) {
        throw config_error("ScenarioGeometry: need exactly K BS and K UT positions");
    }
    if (static_cast<int>(ris_positions.size()) != config.ris_count) {
        throw config_error("ScenarioGeometry: need exactly L RIS positions");
    }
    for (const auto& p : bs_positions)
        if (!finite3(p)) throw config_error("ScenarioGeometry: non-finite BS position");
    for (const auto& p : ut_positions)
        if (!finite3(p)) throw config_error("ScenarioGeometry: non-finite UT position");
    for (const auto& p : ris_positions)
        if (!finite3(p)) throw config_error("ScenarioGeometry: non-finite RIS position");
}

void FadingParams::validate() const {
    if (zeta0 < 0.0) throw config_error("FadingParams: zeta0 must be >= 0");
    if (alpha_bu <= 0.0 || alpha_ris <= 0.0) {
        throw config_error("FadingParams: path-loss exponents must be positive");
    }
    if (rician_beta < 0.0) throw config_error("FadingParams: rician_beta must be >= 0");
    if (pilot_gain < 0.0) throw config_error("FadingParams: pilot_gain must be >= 0");
}

double path_loss(double distance_m, double zeta0, double alpha) {
    if (!(distance_m > 0.0)) {
        throw std::domain_error("path_loss: distance must be positive");
    }
    return std::sqrt(zeta0 * std::pow(distance_m, -alpha));
}

Eigen::MatrixXcd ChannelRealization::stacked_g(int i) const {
    Eigen::MatrixXcd g(antennas, ris_count * ris_elements);
    for (int l = 0; l < ris_count; ++l) {
        g.middleCols(static_cast<Eigen::Index>(l) * ris_elements, ris_elements) =
            G[static_cast<size_t>(i)][static_cast<size_t>(l)];
    }
    return g;
}

Eigen::VectorXcd ChannelRealization::stacked_h_r(int j) const {
    Eigen::VectorXcd h(ris_count * ris_elements);
    for (int l = 0; l < ris_count; ++l) {
        h.segment(static_cast<Eigen::Index>(l) * ris_elements, ris_elements) =
            h_r[static_cast<size_t>(l)][static_cast<size_t>(j)];
    }
    return h;
}

Eigen::MatrixXcd ChannelRealization::cascade(int i, int j) const {
    return stacked_g(i) * stacked_h_r(j).asDiagonal();
}

ChannelRealization sample_realization(const ScenarioGeometry& geometry, const FadingParams& fading,
                                      const SystemConfig& config, uint64_t seed) {
    config.validate();
    geometry.validate(config);
    fading.validate();

    const int k = config.cells;
    const int m = config.antennas;
    const int l_count = config.ris_count;
    const int n = config.ris_elements;
    const double pilot_amp = std::sqrt(fading.pilot_gain);
    const double los_w = std::sqrt(fading.rician_beta / (1.0 + fading.rician_beta));
    const double nlos_w = std::sqrt(1.0 / (1.0 + fading.rician_beta));

    // Separate streams: direct draws do not depend on the RIS size, so covariance
    // estimates of R^d are reproducible across N sweeps.
    auto rng_direct = make_rng(mix_seed(seed, 0x64697265ULL));
    auto rng_ris = make_rng(mix_seed(seed, 0x72697320ULL));
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);

    ChannelRealization out;
    out.cells = k;
    out.antennas = m;
    out.ris_count = l_count;
    out.ris_elements = n;
    out.h_d.assign(k, std::vector<Eigen::VectorXcd>(k));
    out.G.assign(k, std::vector<Eigen::MatrixXcd>(l_count));
    out.h_r.assign(l_count, std::vector<Eigen::VectorXcd>(k));

    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double d = (geometry.bs_positions[i] - geometry.ut_positions[j]).norm();
            const double amp = pilot_amp * path_loss(d, fading.zeta0, fading.alpha_bu);
            out.h_d[i][j] = amp * randn_complex(rng_direct, m);
        }
    }
    for (int i = 0; i < k; ++i) {
        for (int l = 0; l < l_count; ++l) {
            const auto& b = geometry.bs_positions[i];
            const auto& r = geometry.ris_positions[l];
            const double amp = path_loss((b - r).norm(), fading.zeta0, fading.alpha_ris);
            Eigen::MatrixXcd los = steering(m, direction_cosine(b, r, geometry.bs_axis)) *
                                   steering(n, direction_cosine(r, b, geometry.ris_axis)).adjoint();
            if (fading.random_los_phase) {
                los *= std::polar(1.0, uni(rng_ris));
            }
            out.G[i][l] = amp * (los_w * los + nlos_w * randn_complex(rng_ris, m, n));
        }
    }
    for (int l = 0; l < l_count; ++l) {
        for (int j = 0; j < k; ++j) {
            const auto& r = geometry.ris_positions[l];
            const auto& u = geometry.ut_positions[j];
            const double amp =
                pilot_amp * path_loss((r - u).norm(), fading.zeta0, fading.alpha_ris);
            Eigen::VectorXcd los = steering(n, direction_cosine(r, u, geometry.ris_axis));
            if (fading.random_los_phase) {
                los *= std::polar(1.0, uni(rng_ris));
            }
            out.h_r[l][j] = amp * (los_w * los + nlos_w * randn_complex(rng_ris, n));
        }
    }
    return out;
}

Eigen::VectorXcd effective_channel(const ChannelRealization& realization, int i, int j,
                                   const PhaseVector& phases) {
    if (phases.size() != realization.ris_count * realization.ris_elements) {
        throw std::invalid_argument("effective_channel: phase vector length must be N*L");
    }
    const Eigen::VectorXcd v = phases.v_bar.conjugate();
    Eigen::VectorXcd h = realization.h_d[static_cast<size_t>(i)][static_cast<size_t>(j)];
    const int n = realization.ris_elements;
    for (int l = 0; l < realization.ris_count; ++l) {
        const auto& g = realization.G[static_cast<size_t>(i)][static_cast<size_t>(l)];
        const auto& hr = realization.h_r[static_cast<size_t>(l)][static_cast<size_t>(j)];
        h.noalias() += g * v.segment(static_cast<Eigen::Index>(l) * n, n).cwiseProduct(hr);
    }
    return h;
}

void CovarianceSet::validate(double hermitian_tol, double psd_tol) const {
    auto check = [&](const Eigen::MatrixXcd& r, const char* what) {
        if (!r.allFinite()) {
            throw std::invalid_argument(std::string("CovarianceSet: non-finite ") + what);
        }
        const double scale = std::max(1.0, r.norm());
        if ((r - r.adjoint()).norm() > hermitian_tol * scale) {
            throw std::invalid_argument(std::string("CovarianceSet: non-Hermitian ") + what);
        }
        const auto [lo, hi] = eig_range(r);
        if (lo < -psd_tol * std::max(hi, 0.0) - 1e-300) {
            throw std::invalid_argument(std::string("CovarianceSet: not PSD: ") + what);
        }
    };
    for (int i = 0; i < cells; ++i) {
        for (int j = 0; j < cells; ++j) {
            check(direct[static_cast<size_t>(i)][static_cast<size_t>(j)], "direct block");
            check(ris[static_cast<size_t>(i)][static_cast<size_t>(j)], "cascade block");
        }
    }
}

CovarianceSet CovarianceSet::with_zero_ris() const {
    CovarianceSet out = *this;
    for (auto& row : out.ris) {
        for (auto& r : row) {
            r.setZero();
        }
    }
    return out;
}

CovarianceSet estimate_covariances(const ScenarioGeometry& geometry, const FadingParams& fading,
                                   const SystemConfig& config, int n_samples, uint64_t seed,
                                   const CovEstimationOptions& options) {
    if (n_samples < 1) throw std::invalid_argument("estimate_covariances: n_samples must be >= 1");
    config.validate();
    geometry.validate(config);

    const int k = config.cells;
    const int m = config.antennas;
    const int nl = config.phase_dim();
    const int mnl = config.cascade_dim();
    const int batch = std::max(1, options.batch);

    CovarianceSet covs;
    covs.cells = k;
    covs.antennas = m;
    covs.phase_dim = nl;
    covs.direct.assign(k, std::vector<Eigen::MatrixXcd>(
                              k, Eigen::MatrixXcd::Zero(m, m)));
    covs.ris.assign(k, std::vector<Eigen::MatrixXcd>(
                           k, Eigen::MatrixXcd::Zero(mnl, mnl)));

    std::vector<std::vector<Eigen::MatrixXcd>> buf_d(
        static_cast<size_t>(k),
        std::vector<Eigen::MatrixXcd>(static_cast<size_t>(k), Eigen::MatrixXcd(m, batch)));
    std::vector<std::vector<Eigen::MatrixXcd>> buf_r(
        static_cast<size_t>(k),
        std::vector<Eigen::MatrixXcd>(static_cast<size_t>(k), Eigen::MatrixXcd(mnl, batch)));

    int fill = 0;
    auto flush = [&]() {
        if (fill == 0) return;
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                auto di = static_cast<size_t>(i);
                auto dj = static_cast<size_t>(j);
                covs.direct[di][dj]
                    .selfadjointView<Eigen::Lower>()
                    .rankUpdate(buf_d[di][dj].leftCols(fill), 1.0);
                covs.ris[di][dj]
                    .selfadjointView<Eigen::Lower>()
                    .rankUpdate(buf_r[di][dj].leftCols(fill), 1.0);
            }
        }
        fill = 0;
    };

    for (int s = 0; s < n_samples; ++s) {
        const ChannelRealization real =
            sample_realization(geometry, fading, config, mix_seed(seed, 0x636f76ULL, s));
        for (int i = 0; i < k; ++i) {
            const Eigen::MatrixXcd g = real.stacked_g(i);
            for (int j = 0; j < k; ++j) {
                const Eigen::VectorXcd hr = real.stacked_h_r(j);
                auto di = static_cast<size_t>(i);
                auto dj = static_cast<size_t>(j);
                buf_d[di][dj].col(fill) = real.h_d[di][dj];
                // vec(G diag(h)) column-major: column n is G[:,n] * h(n)
                Eigen::Map<Eigen::MatrixXcd> cascade(buf_r[di][dj].col(fill).data(), m, nl);
                for (int n = 0; n < nl; ++n) {
                    cascade.col(n) = g.col(n) * hr(n);
                }
            }
        }
        if (++fill == batch) flush();
    }
    flush();

    const double inv_n = 1.0 / static_cast<double>(n_samples);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            auto di = static_cast<size_t>(i);
            auto dj = static_cast<size_t>(j);
            covs.direct[di][dj] = hermitize(
                Eigen::MatrixXcd(covs.direct[di][dj].selfadjointView<Eigen::Lower>()) * inv_n);
            covs.ris[di][dj] = hermitize(
                Eigen::MatrixXcd(covs.ris[di][dj].selfadjointView<Eigen::Lower>()) * inv_n);
            if (options.analytic_direct) {
                // i.i.d. Rayleigh direct link: R^d is exactly (pilot_gain * zeta) I
                const double d =
                    (geometry.bs_positions[di] - geometry.ut_positions[dj]).norm();
                const double amp = path_loss(d, fading.zeta0, fading.alpha_bu);
                covs.direct[di][dj] = fading.pilot_gain * amp * amp *
                                      Eigen::MatrixXcd::Identity(m, m);
            }
        }
    }
    return covs;
}

}  // namespace rispkg

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

#include "rispkg/kgr.hpp"

#include <cmath>

#include "rispkg/linalg.hpp"

namespace rispkg {

namespace {

constexpr double kRateClampTol = 1e-9;

void check_pair_dims(const CovarianceSet& covs) {
    if (covs.cells < 1 || covs.antennas < 1 || covs.phase_dim < 1) {
        throw std::invalid_argument("CovarianceSet: empty dimensions");
    }
}

double clamp_rate(double r, const char* where) {
    if (r < -kRateClampTol) {
        throw numerical_error(std::string(where) + ": negative rate " + std::to_string(r));
    }
    return std::max(r, 0.0);
}

// All per-cell effective covariances M_{i,k}(v_bar), symmetrized.
std::vector<std::vector<Eigen::MatrixXcd>> all_effective_covs(const CovarianceSet& covs,
                                                              const PhaseVector& phases) {
    const int k = covs.cells;
    const int m = covs.antennas;
    std::vector<std::vector<Eigen::MatrixXcd>> out(
        static_cast<size_t>(k), std::vector<Eigen::MatrixXcd>(static_cast<size_t>(k)));
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            out[static_cast<size_t>(i)][static_cast<size_t>(j)] = hermitize(
                covs.direct[static_cast<size_t>(i)][static_cast<size_t>(j)] +
                phase_contract(covs.ris[static_cast<size_t>(i)][static_cast<size_t>(j)],
                               phases.v_bar, m, m));
        }
    }
    return out;
}

void check_psd(const Eigen::MatrixXcd& a, const char* what) {
    const auto [lo, hi] = eig_range(a);
    if (lo < -1e-8 * std::max(hi, 1e-30)) {
        throw std::invalid_argument(std::string("kgr: assembled covariance not PSD (") + what +
                                    ")");
    }
}

}  // namespace

Eigen::MatrixXcd effective_cov_M(const CovarianceSet& covs, int i, int k,
                                 const PhaseVector& phases) {
    check_pair_dims(covs);
    if (phases.size() != covs.phase_dim) {
        throw std::invalid_argument("effective_cov_M: phase vector length must be NL");
    }
    return hermitize(covs.direct[static_cast<size_t>(i)][static_cast<size_t>(k)] +
                     phase_contract(covs.ris[static_cast<size_t>(i)][static_cast<size_t>(k)],
                                    phases.v_bar, covs.antennas, covs.antennas));
}

Eigen::MatrixXcd effective_cov_N(const CovarianceSet& covs, int k, const PhaseVector& phases) {
    check_pair_dims(covs);
    const int m = covs.antennas;
    Eigen::MatrixXcd r_zt = Eigen::MatrixXcd::Identity(m, m);
    for (int j = 0; j < covs.cells; ++j) {
        r_zt += effective_cov_M(covs, k, j, phases);
    }
    const auto [lo, hi] = eig_range(r_zt);
    if (lo <= 0.0 || hi / lo > 1e12) {
        throw numerical_error("effective_cov_N: R_zt conditioning worse than 1e12");
    }
    const Eigen::MatrixXcd m_kk = effective_cov_M(covs, k, k, phases);
    Eigen::LLT<Eigen::MatrixXcd> llt(r_zt);
    return hermitize(m_kk * llt.solve(m_kk));
}

Eigen::VectorXd kgr_exact(const SystemConfig& config, const CovarianceSet& covs,
                          const PrecoderSet& precoders, const PhaseVector& phases) {
    config.validate();
    precoders.validate(config);
    phases.validate();
    check_pair_dims(covs);

    const int kc = config.cells;
    const int m = config.antennas;
    const auto blocks = all_effective_covs(covs, phases);
    for (int i = 0; i < kc; ++i) {
        for (int j = 0; j < kc; ++j) {
            check_psd(blocks[static_cast<size_t>(i)][static_cast<size_t>(j)], "M_ij");
        }
    }

    Eigen::VectorXd rates(kc);
    for (int k = 0; k < kc; ++k) {
        const auto& p_k = precoders.mats[static_cast<size_t>(k)];
        Eigen::MatrixXcd r_zt = Eigen::MatrixXcd::Identity(m, m);
        for (int j = 0; j < kc; ++j) {
            r_zt += blocks[static_cast<size_t>(k)][static_cast<size_t>(j)];
        }
        Eigen::MatrixXcd r_y =
            Eigen::MatrixXcd::Identity(config.rf_chains, config.rf_chains);
        for (int i = 0; i < kc; ++i) {
            const auto& p_i = precoders.mats[static_cast<size_t>(i)];
            r_y.noalias() +=
                p_i * blocks[static_cast<size_t>(i)][static_cast<size_t>(k)] * p_i.adjoint();
        }

        // z = P_k z_tilde carries the same information as w = V_r^H z_tilde,
        // with V_r the right singular vectors of P_k on its support: U and the
        // invertible singular values are a bijection. Working with w removes
        // cond(P_k)^2 from the log-dets (optimized precoders are often nearly
        // rank deficient) and handles rank-deficient P_k exactly.
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p_k, Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        int rank = 0;
        for (Eigen::Index t = 0; t < sv.size(); ++t) {
            if (sv(t) > 1e-12 * sv(0)) ++rank;
        }
        if (sv.size() == 0 || sv(0) == 0.0 || rank == 0) {
            rates(k) = 0.0;
            continue;
        }
        const Eigen::MatrixXcd v_r = svd.matrixV().leftCols(rank);
        const Eigen::MatrixXcd r_w = hermitize(v_r.adjoint() * r_zt * v_r);
        const Eigen::MatrixXcd r_yw =
            p_k * blocks[static_cast<size_t>(k)][static_cast<size_t>(k)] * v_r;

        Eigen::LLT<Eigen::MatrixXcd> llt_y(hermitize(r_y));
        const Eigen::MatrixXcd schur =
            hermitize(r_w - r_yw.adjoint() * llt_y.solve(r_yw));
        rates(k) = clamp_rate(log_det_hpd(r_w) - log_det_hpd(schur), "kgr_exact");
    }
    return rates;
}

Eigen::VectorXd kgr_no_ris(const CovarianceSet& covs, const Eigen::VectorXd& powers) {
    check_pair_dims(covs);
    const int kc = covs.cells;
    const int m = covs.antennas;
    if (powers.size() != kc) {
        throw std::invalid_argument("kgr_no_ris: need one transmit power per BS");
    }
    if ((powers.array() < 0.0).any()) {
        throw std::invalid_argument("kgr_no_ris: powers must be nonnegative");
    }
    Eigen::VectorXd rates(kc);
    for (int k = 0; k < kc; ++k) {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(m, m);
        for (int j = 0; j < kc; ++j) {
            a += covs.direct[static_cast<size_t>(k)][static_cast<size_t>(j)];
        }
        Eigen::MatrixXcd b = Eigen::MatrixXcd::Identity(m, m);
        for (int i = 0; i < kc; ++i) {
            b += (powers(i) / m) * covs.direct[static_cast<size_t>(i)][static_cast<size_t>(k)];
        }
        const auto& r_kk = covs.direct[static_cast<size_t>(k)][static_cast<size_t>(k)];
        Eigen::LLT<Eigen::MatrixXcd> llt_b(hermitize(b));
        const Eigen::MatrixXcd sub =
            hermitize(a - (powers(k) / m) * r_kk * llt_b.solve(r_kk));
        rates(k) = clamp_rate(log_det_hpd(hermitize(a)) - log_det_hpd(sub), "kgr_no_ris");
    }
    return rates;
}

Eigen::VectorXd kgr_upper_bound(const SystemConfig& config, const CovarianceSet& covs,
                                const PrecoderSet& precoders, const PhaseVector& phases) {
    config.validate();
    precoders.validate(config);
    phases.validate();
    check_pair_dims(covs);

    const int kc = config.cells;
    const int m = config.antennas;
    const auto blocks = all_effective_covs(covs, phases);

    Eigen::VectorXd bounds(kc);
    for (int k = 0; k < kc; ++k) {
        Eigen::MatrixXcd r_zt = Eigen::MatrixXcd::Identity(m, m);
        for (int j = 0; j < kc; ++j) {
            r_zt += blocks[static_cast<size_t>(k)][static_cast<size_t>(j)];
        }
        Eigen::MatrixXcd r_y =
            Eigen::MatrixXcd::Identity(config.rf_chains, config.rf_chains);
        for (int i = 0; i < kc; ++i) {
            const auto& p_i = precoders.mats[static_cast<size_t>(i)];
            r_y.noalias() +=
                p_i * blocks[static_cast<size_t>(i)][static_cast<size_t>(k)] * p_i.adjoint();
        }
        const auto& m_kk = blocks[static_cast<size_t>(k)][static_cast<size_t>(k)];
        const auto& p_k = precoders.mats[static_cast<size_t>(k)];
        Eigen::LLT<Eigen::MatrixXcd> llt_zt(hermitize(r_zt));
        const Eigen::MatrixXcd n_kk = hermitize(m_kk * llt_zt.solve(m_kk));
        const Eigen::MatrixXcd reduced = hermitize(r_y - p_k * n_kk * p_k.adjoint());
        bounds(k) =
            clamp_rate(log_det_hpd(hermitize(r_y)) - log_det_hpd(reduced), "kgr_upper_bound");
    }
    return bounds;
}

double wskr(const Eigen::VectorXd& weights, const Eigen::VectorXd& rates) {
    if (weights.size() != rates.size()) {
        throw std::invalid_argument("wskr: weights and rates must have equal length");
    }
    if ((weights.array() < 0.0).any()) {
        throw std::invalid_argument("wskr: weights must be nonnegative");
    }
    return weights.dot(rates);
}

RateReport rate_report(const SystemConfig& config, const CovarianceSet& covs,
                       const PrecoderSet& precoders, const PhaseVector& phases) {
    RateReport report;
    report.rate = kgr_exact(config, covs, precoders, phases);
    report.upper_bound = kgr_upper_bound(config, covs, precoders, phases);
    for (Eigen::Index k = 0; k < report.rate.size(); ++k) {
        if (report.rate(k) > report.upper_bound(k) + 1e-9) {
            throw numerical_error("rate_report: rate exceeds its upper bound");
        }
    }
    report.weighted_sum = wskr(config.effective_weights(), report.rate);
    return report;
}

}  // namespace rispkg

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

#ifndef RISPKG_KGR_HPP
#define RISPKG_KGR_HPP

#include "rispkg/channel.hpp"
#include "rispkg/types.hpp"

namespace rispkg {

/// Effective channel covariance for the (i,k) pair under phase vector v_bar:
///   M_{i,k} = R^d_{i,k} + (v_bar^H kron I_M) R^r_{i,k} (v_bar kron I_M),
/// Hermitian-symmetrized.
Eigen::MatrixXcd effective_cov_M(const CovarianceSet& covs, int i, int k,
                                 const PhaseVector& phases);

/// N_{k,k} = M_{k,k} R_zt^{-1} M_{k,k} with R_zt = sum_j M_{k,j} + I_M.
/// Throws numerical_error if R_zt is conditioned worse than 1e12.
Eigen::MatrixXcd effective_cov_N(const CovarianceSet& covs, int k, const PhaseVector& phases);

/// Exact per-cell key rates (nats/channel use):
///   R_k = ln det(R_z) - ln det(R_z - R_zy R_y^{-1} R_yz)
/// with the probing covariances assembled from the M_{i,k}. Rates within -1e-9
/// of zero clamp to 0; anything more negative raises numerical_error. If P_k is
/// rank deficient the z feature is restricted to its support first.
Eigen::VectorXd kgr_exact(const SystemConfig& config, const CovarianceSet& covs,
                          const PrecoderSet& precoders, const PhaseVector& phases);

/// Closed form for the non-optimized, RIS-free system with P_i = sqrt(P_i/M) I.
/// powers holds the per-BS transmit powers P_i (linear).
Eigen::VectorXd kgr_no_ris(const CovarianceSet& covs, const Eigen::VectorXd& powers);

/// Per-cell rate upper bounds:
///   R_k^ub = ln det(S_k + I) - ln det(S_k + I - P_k N_{k,k} P_k^H),
///   S_k = sum_i P_i M_{i,k} P_i^H.
/// Tight when M_e = M (then R_k^ub = R_k).
Eigen::VectorXd kgr_upper_bound(const SystemConfig& config, const CovarianceSet& covs,
                                const PrecoderSet& precoders, const PhaseVector& phases);

/// sum_k w_k r_k; negative weights are rejected.
double wskr(const Eigen::VectorXd& weights, const Eigen::VectorXd& rates);

/// Exact rates + upper bounds + weighted sum in one report, with the
/// RateReport invariants enforced.
RateReport rate_report(const SystemConfig& config, const CovarianceSet& covs,
                       const PrecoderSet& precoders, const PhaseVector& phases);

}  // namespace rispkg

#endif

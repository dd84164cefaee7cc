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

#ifndef RISPKG_PRECODER_OPT_HPP
#define RISPKG_PRECODER_OPT_HPP

#include <cstdint>
#include <vector>

#include "rispkg/kgr.hpp"

namespace rispkg {

/// Data of the precoding sub-problem for a fixed phase vector:
///   maximize sum_k w_k [ln det(P M_k P^H + I) - ln det(P N_k P^H + I)]
/// where M_k and N_k are block diagonal over BSs. Only the blocks are stored;
/// coupling(k,i) is the i-th diagonal block of N_k, i.e. M_{i,k} for i != k and
/// M_{k,k} - N_{k,k} for i == k.
struct PrecoderSubproblem {
    std::vector<std::vector<Eigen::MatrixXcd>> m_blocks;  // m_blocks[i][k] = M_{i,k}
    std::vector<Eigen::MatrixXcd> n_kk;                   // N_{k,k}
    Eigen::VectorXd weights;
    double power_budget = 1.0;
    int cells = 0;
    int antennas = 0;
    int rf_chains = 0;

    Eigen::MatrixXcd coupling(int k, int i) const;
};

PrecoderSubproblem build_subproblem(const CovarianceSet& covs, const PhaseVector& phases,
                                    const SystemConfig& config);

/// Objective of the sub-problem at P (equals sum_k w_k R_k^ub).
double precoder_objective(const PrecoderSet& precoders, const PrecoderSubproblem& sub);

/// Per-BS pieces of the KKT fixed point at the current iterate:
///   vec(P_i) = (lambda_i I + F_i)^{-1} a_i,  F_i = D diag(f) D^H.
struct MultiplierState {
    Eigen::VectorXd eigenvalues;    // f_{i,m} >= 0
    Eigen::MatrixXcd eigenvectors;  // D_i
    Eigen::VectorXcd a;             // a_i
    Eigen::VectorXcd b;             // D_i^H a_i
    double lambda = 0.0;
};

/// Assembles F_i (eigendecomposed) and a_i for all BSs at the current precoders.
std::vector<MultiplierState> kkt_workspace(const PrecoderSet& precoders,
                                           const PrecoderSubproblem& sub);

/// One fixed-point update of the KKT condition with the given multipliers.
PrecoderSet kkt_step(const PrecoderSet& precoders, const std::vector<double>& lambdas,
                     const PrecoderSubproblem& sub);

/// phi_i(lambda) = sum_m |b_m|^2 / (lambda + f_m)^2 = ||vec(P_i)||^2.
double phi(double lambda, const Eigen::VectorXd& f, const Eigen::VectorXcd& b);
double phi(double lambda, const MultiplierState& state);

/// Complementary-slackness multiplier: 0 if phi(0) <= P_A, else the bisection
/// root of phi(lambda) = P_A on [0, sqrt(sum |b|^2 / P_A)].
double solve_multiplier(const Eigen::VectorXd& f, const Eigen::VectorXcd& b, double power_budget,
                        double eps);

/// Conjugate gradient of the Lagrangian w.r.t. P* (stacked per BS), used for
/// stationarity checks:
///   dL/dP_i* = sum_k w_k [R1_k^{-1} P_i M_{i,k} - R2_k^{-1} P_i B_{k,i}] - lambda_i P_i.
std::vector<Eigen::MatrixXcd> lagrangian_gradient(const PrecoderSet& precoders,
                                                  const std::vector<double>& lambdas,
                                                  const PrecoderSubproblem& sub);

struct PrecoderOptOptions {
    double eps = 1e-8;         // relative objective change stop
    int max_iters = 500;
    double bisect_eps = 1e-8;  // multiplier interval width
    // when > 0, iteration also continues until the Lagrangian stationarity
    // residual drops below kkt_tol * max(1, ||P||_F)
    double kkt_tol = 0.0;
};

struct PrecoderOptResult {
    PrecoderSet precoders;
    std::vector<double> trace;  // objective per iteration, starting at the initial point
    std::vector<double> lambdas;
    int iterations = 0;
    bool converged = false;
};

/// Algorithm: alternate the vec-form KKT update with per-BS multiplier bisection
/// until the relative objective change drops below eps. The update is damped
/// (step halved and re-blended) if the objective ever decreases.
PrecoderOptResult optimize_precoders(const PrecoderSubproblem& sub, const SystemConfig& config,
                                     const PrecoderSet& init, const PrecoderOptOptions& options = {});

}  // namespace rispkg

#endif

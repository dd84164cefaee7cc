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

#ifndef RISPKG_PHASE_OPT_HPP
#define RISPKG_PHASE_OPT_HPP

#include <vector>

#include "rispkg/kgr.hpp"

namespace rispkg {

/// Workspace for repeated evaluation of the phase sub-problem objective
///   g(v_bar) = sum_k w_k R_k^ub(v_bar)
/// and of its conjugate (Wirtinger) gradient, with covariances and precoders
/// fixed. The objective is evaluated through the precoder-sandwiched cascade
/// covariances (I_NL kron P_i) R^r (I_NL kron P_i)^H, which is the sub-problem
/// form and algebraically identical to kgr_upper_bound.
class PhaseObjective {
  public:
    PhaseObjective(const CovarianceSet& covs, const PrecoderSet& precoders,
                   const Eigen::VectorXd& weights);

    double value(const PhaseVector& phases) const;
    Eigen::VectorXcd gradient(const PhaseVector& phases) const;
    /// Gradient with the entrywise radial component removed (tangent to the
    /// unit-modulus torus). Requires unit-modulus phases.
    Eigen::VectorXcd riemannian_gradient(const PhaseVector& phases) const;

    bool conditioning_warning() const { return conditioning_warning_; }
    int phase_dim() const { return phase_dim_; }

  private:
    int cells_, antennas_, rf_chains_, phase_dim_;
    Eigen::VectorXd weights_;
    // all sums below are one-time precomputations at fixed precoders
    std::vector<Eigen::MatrixXcd> y_direct_;      // sum_i P_i R^d_{i,k} P_i^H
    std::vector<Eigen::MatrixXcd> y_cascade_;     // sum_i (I kron P_i) R^r_{i,k} (I kron P_i)^H
    std::vector<Eigen::MatrixXcd> zt_direct_;     // sum_j R^d_{k,j}
    std::vector<Eigen::MatrixXcd> zt_cascade_;    // sum_j R^r_{k,j}
    std::vector<Eigen::MatrixXcd> cross_direct_;  // P_k R^d_{k,k}
    std::vector<Eigen::MatrixXcd> cross_cascade_;  // (I kron P_k) R^r_{k,k}
    mutable bool conditioning_warning_ = false;

    struct CellMatrices;
    CellMatrices cell_matrices(int k, const Eigen::VectorXcd& v_bar) const;
};

/// Objective of the phase sub-problem; agrees with
/// wskr(weights, kgr_upper_bound(...)) to 1e-9.
double eval_objective_v(const CovarianceSet& covs, const PrecoderSet& precoders,
                        const PhaseVector& phases, const Eigen::VectorXd& weights);

/// Conjugate gradient of eval_objective_v w.r.t. v_bar*, length NL. Derived from
/// the matrix differentials of the log-det upper bound; correctness is pinned by
/// the central finite-difference contract (relative error < 1e-5).
Eigen::VectorXcd analytic_gradient(const CovarianceSet& covs, const PrecoderSet& precoders,
                                   const PhaseVector& phases, const Eigen::VectorXd& weights);

/// Entrywise x/|x|; zero entries map to 1.
PhaseVector project_unit_modulus(const Eigen::VectorXcd& x);

struct PhaseOptOptions {
    double eps = 1e-6;  // relative objective change stop
    int max_iters = 1000;
    double initial_step = 1.0;
    double shrink = 0.5;
    double armijo = 1e-4;
    int max_halvings = 40;
};

struct PhaseOptResult {
    PhaseVector phases;
    std::vector<double> trace;  // objective per accepted iterate, starting at v_init
    int iterations = 0;
    bool converged = false;
    bool conditioning_warning = false;
};

/// Projected gradient ascent with backtracking line search:
///   v^{t+1} = exp(j arg(v^t + mu grad)).
/// The trace is non-decreasing by the acceptance rule; every iterate is
/// unit-modulus by construction.
PhaseOptResult optimize_phases(const CovarianceSet& covs, const PrecoderSet& precoders,
                               const SystemConfig& config, const PhaseVector& v_init,
                               const PhaseOptOptions& options = {});

}  // namespace rispkg

#endif

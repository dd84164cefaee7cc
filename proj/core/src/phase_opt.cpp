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

#include "rispkg/phase_opt.hpp"

#include <cmath>

#include "rispkg/linalg.hpp"

namespace rispkg {

namespace {

// out block (n,m) = P A_{n,m} Q^H over the NL x NL block grid
Eigen::MatrixXcd sandwich_blocks(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& p,
                                 const Eigen::MatrixXcd& q, int block, int nl) {
    const int pr = static_cast<int>(p.rows());
    const int qr = static_cast<int>(q.rows());
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(pr) * nl, static_cast<Eigen::Index>(qr) * nl);
    for (int n = 0; n < nl; ++n) {
        for (int m = 0; m < nl; ++m) {
            out.block(static_cast<Eigen::Index>(n) * pr, static_cast<Eigen::Index>(m) * qr, pr,
                      qr).noalias() =
                p *
                a.block(static_cast<Eigen::Index>(n) * block,
                        static_cast<Eigen::Index>(m) * block, block, block) *
                q.adjoint();
        }
    }
    return out;
}

// out block n (row blocks only) = P A_{n,:}
Eigen::MatrixXcd left_blocks(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& p, int block,
                             int nl) {
    const int pr = static_cast<int>(p.rows());
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(pr) * nl, a.cols());
    for (int n = 0; n < nl; ++n) {
        out.middleRows(static_cast<Eigen::Index>(n) * pr, pr).noalias() =
            p * a.middleRows(static_cast<Eigen::Index>(n) * block, block);
    }
    return out;
}

// tr(a b) for a: r x c, b: c x r (no conjugation)
cplx trace_prod(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a.transpose().cwiseProduct(b)).sum();
}

}  // namespace

struct PhaseObjective::CellMatrices {
    Eigen::MatrixXcd l;        // R_y, M_e x M_e
    Eigen::MatrixXcd z;        // R_zt, M x M
    Eigen::MatrixXcd c;        // R_{y zt} = P_k M_kk, M_e x M
    Eigen::MatrixXcd schur;    // l - c z^{-1} c^H
    Eigen::LLT<Eigen::MatrixXcd> llt_z;
};

PhaseObjective::PhaseObjective(const CovarianceSet& covs, const PrecoderSet& precoders,
                               const Eigen::VectorXd& weights)
    : cells_(covs.cells),
      antennas_(covs.antennas),
      rf_chains_(static_cast<int>(precoders.mats.at(0).rows())),
      phase_dim_(covs.phase_dim),
      weights_(weights) {
    if (static_cast<int>(precoders.mats.size()) != cells_) {
        throw std::invalid_argument("PhaseObjective: precoder count must equal cells");
    }
    if (weights_.size() != cells_) {
        throw std::invalid_argument("PhaseObjective: weights length must equal cells");
    }
    const int m = antennas_;
    const int nl = phase_dim_;

    y_direct_.resize(static_cast<size_t>(cells_));
    y_cascade_.resize(static_cast<size_t>(cells_));
    zt_direct_.resize(static_cast<size_t>(cells_));
    zt_cascade_.resize(static_cast<size_t>(cells_));
    cross_direct_.resize(static_cast<size_t>(cells_));
    cross_cascade_.resize(static_cast<size_t>(cells_));

    for (int k = 0; k < cells_; ++k) {
        Eigen::MatrixXcd sum_direct = Eigen::MatrixXcd::Zero(rf_chains_, rf_chains_);
        Eigen::MatrixXcd sum_cascade = Eigen::MatrixXcd::Zero(
            static_cast<Eigen::Index>(rf_chains_) * nl, static_cast<Eigen::Index>(rf_chains_) * nl);
        Eigen::MatrixXcd zt_d = Eigen::MatrixXcd::Zero(m, m);
        Eigen::MatrixXcd zt_r = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m) * nl,
                                                       static_cast<Eigen::Index>(m) * nl);
        for (int i = 0; i < cells_; ++i) {
            const auto& pi = precoders.mats[static_cast<size_t>(i)];
            sum_direct.noalias() +=
                pi * covs.direct[static_cast<size_t>(i)][static_cast<size_t>(k)] * pi.adjoint();
            sum_cascade +=
                sandwich_blocks(covs.ris[static_cast<size_t>(i)][static_cast<size_t>(k)], pi, pi,
                                m, nl);
            zt_d += covs.direct[static_cast<size_t>(k)][static_cast<size_t>(i)];
            zt_r += covs.ris[static_cast<size_t>(k)][static_cast<size_t>(i)];
        }
        y_direct_[static_cast<size_t>(k)] = std::move(sum_direct);
        y_cascade_[static_cast<size_t>(k)] = std::move(sum_cascade);
        zt_direct_[static_cast<size_t>(k)] = std::move(zt_d);
        zt_cascade_[static_cast<size_t>(k)] = std::move(zt_r);

        const auto& pk = precoders.mats[static_cast<size_t>(k)];
        cross_direct_[static_cast<size_t>(k)] =
            pk * covs.direct[static_cast<size_t>(k)][static_cast<size_t>(k)];
        cross_cascade_[static_cast<size_t>(k)] =
            left_blocks(covs.ris[static_cast<size_t>(k)][static_cast<size_t>(k)], pk, m, nl);
    }
}

PhaseObjective::CellMatrices PhaseObjective::cell_matrices(int k,
                                                           const Eigen::VectorXcd& v_bar) const {
    const int m = antennas_;
    const int me = rf_chains_;
    CellMatrices cm;
    cm.l = hermitize(y_direct_[static_cast<size_t>(k)] +
                     phase_contract(y_cascade_[static_cast<size_t>(k)], v_bar, me, me)) +
           Eigen::MatrixXcd::Identity(me, me);
    cm.z = hermitize(zt_direct_[static_cast<size_t>(k)] +
                     phase_contract(zt_cascade_[static_cast<size_t>(k)], v_bar, m, m)) +
           Eigen::MatrixXcd::Identity(m, m);
    cm.c = cross_direct_[static_cast<size_t>(k)] +
           phase_contract(cross_cascade_[static_cast<size_t>(k)], v_bar, me, m);
    cm.llt_z.compute(cm.z);
    cm.schur = hermitize(cm.l - cm.c * cm.llt_z.solve(cm.c.adjoint()));
    return cm;
}

double PhaseObjective::value(const PhaseVector& phases) const {
    if (phases.size() != phase_dim_) {
        throw std::invalid_argument("PhaseObjective: phase vector length must be NL");
    }
    double total = 0.0;
    for (int k = 0; k < cells_; ++k) {
        if (weights_(k) == 0.0) continue;
        const CellMatrices cm = cell_matrices(k, phases.v_bar);
        total += weights_(k) * (log_det_hpd(cm.l) - log_det_hpd(cm.schur));
    }
    return total;
}

Eigen::VectorXcd PhaseObjective::gradient(const PhaseVector& phases) const {
    if (phases.size() != phase_dim_) {
        throw std::invalid_argument("PhaseObjective: phase vector length must be NL");
    }
    const int m = antennas_;
    const int me = rf_chains_;
    const int nl = phase_dim_;
    const Eigen::VectorXcd& v_bar = phases.v_bar;

    Eigen::VectorXcd grad = Eigen::VectorXcd::Zero(nl);
    for (int k = 0; k < cells_; ++k) {
        const double w = weights_(k);
        if (w == 0.0) continue;
        const CellMatrices cm = cell_matrices(k, v_bar);

        const Eigen::MatrixXcd eye_me = Eigen::MatrixXcd::Identity(me, me);
        Eigen::LLT<Eigen::MatrixXcd> llt_l(cm.l);
        Eigen::LLT<Eigen::MatrixXcd> llt_s(cm.schur);
        const auto [s_lo, s_hi] = eig_range(cm.schur);
        if (s_lo <= 0.0 || s_hi / s_lo > 1e12) {
            conditioning_warning_ = true;  // rate is pressing against its bound
        }
        const Eigen::MatrixXcd l_inv = llt_l.solve(eye_me);
        const Eigen::MatrixXcd s_inv = llt_s.solve(eye_me);
        const Eigen::MatrixXcd z_inv =
            cm.llt_z.solve(Eigen::MatrixXcd::Identity(m, m));

        const Eigen::MatrixXcd g1 = l_inv - s_inv;                        // M_e x M_e
        const Eigen::MatrixXcd zc = z_inv * cm.c.adjoint();               // M x M_e
        const Eigen::MatrixXcd b1 = zc * s_inv;                           // M x M_e
        const Eigen::MatrixXcd b2 = b1.adjoint();                         // M_e x M
        const Eigen::MatrixXcd g4 = -(b1 * cm.c) * z_inv;                 // M x M

        const Eigen::MatrixXcd w_y =
            contract_right(y_cascade_[static_cast<size_t>(k)], v_bar, me);  // (Me NL) x Me
        const Eigen::MatrixXcd w_cross =
            contract_right(cross_cascade_[static_cast<size_t>(k)], v_bar, m);  // (Me NL) x M
        const Eigen::MatrixXcd w_cross_h = contract_right(
            cross_cascade_[static_cast<size_t>(k)].adjoint(), v_bar, me);  // (M NL) x Me
        const Eigen::MatrixXcd w_zt =
            contract_right(zt_cascade_[static_cast<size_t>(k)], v_bar, m);  // (M NL) x M

        for (int n = 0; n < nl; ++n) {
            cplx gn = trace_prod(g1, w_y.middleRows(static_cast<Eigen::Index>(n) * me, me));
            gn += trace_prod(b1, w_cross.middleRows(static_cast<Eigen::Index>(n) * me, me));
            gn += trace_prod(b2, w_cross_h.middleRows(static_cast<Eigen::Index>(n) * m, m));
            gn += trace_prod(g4, w_zt.middleRows(static_cast<Eigen::Index>(n) * m, m));
            grad(n) += w * gn;
        }
    }
    return grad;
}

Eigen::VectorXcd PhaseObjective::riemannian_gradient(const PhaseVector& phases) const {
    const Eigen::VectorXcd g = gradient(phases);
    Eigen::VectorXcd r(g.size());
    for (Eigen::Index n = 0; n < g.size(); ++n) {
        const double radial = (g(n) * std::conj(phases.v_bar(n))).real();
        r(n) = g(n) - radial * phases.v_bar(n);
    }
    return r;
}

double eval_objective_v(const CovarianceSet& covs, const PrecoderSet& precoders,
                        const PhaseVector& phases, const Eigen::VectorXd& weights) {
    phases.validate();
    return PhaseObjective(covs, precoders, weights).value(phases);
}

Eigen::VectorXcd analytic_gradient(const CovarianceSet& covs, const PrecoderSet& precoders,
                                   const PhaseVector& phases, const Eigen::VectorXd& weights) {
    phases.validate();
    return PhaseObjective(covs, precoders, weights).gradient(phases);
}

PhaseVector project_unit_modulus(const Eigen::VectorXcd& x) {
    PhaseVector p;
    p.v_bar.resize(x.size());
    for (Eigen::Index n = 0; n < x.size(); ++n) {
        const double mag = std::abs(x(n));
        p.v_bar(n) = (mag == 0.0) ? cplx(1.0, 0.0) : x(n) / mag;
    }
    return p;
}

PhaseOptResult optimize_phases(const CovarianceSet& covs, const PrecoderSet& precoders,
                               const SystemConfig& config, const PhaseVector& v_init,
                               const PhaseOptOptions& options) {
    v_init.validate();
    if (v_init.size() != config.phase_dim()) {
        throw std::invalid_argument("optimize_phases: v_init length must be NL");
    }

    PhaseOptResult result;
    result.phases = v_init;

    const Eigen::VectorXd w = config.effective_weights();
    const double weight_sum = w.sum();
    if (weight_sum == 0.0) {
        result.trace = {0.0};
        result.converged = true;
        return result;
    }

    const PhaseObjective objective(covs, precoders, w / weight_sum);
    double cur = objective.value(result.phases);
    result.trace.push_back(weight_sum * cur);

    for (int it = 0; it < options.max_iters; ++it) {
        const Eigen::VectorXcd g = objective.gradient(result.phases);
        result.iterations = it + 1;
        if (g.norm() == 0.0) {
            result.converged = true;  // objective independent of the phases
            break;
        }
        Eigen::VectorXcd r(g.size());
        for (Eigen::Index n = 0; n < g.size(); ++n) {
            const double radial = (g(n) * std::conj(result.phases.v_bar(n))).real();
            r(n) = g(n) - radial * result.phases.v_bar(n);
        }
        const double r2 = r.squaredNorm();

        double mu = options.initial_step;
        PhaseVector cand;
        double val = cur;
        bool accepted = false;
        for (int h = 0; h <= options.max_halvings; ++h) {
            cand = project_unit_modulus(result.phases.v_bar + mu * g);
            val = objective.value(cand);
            if (val >= cur + options.armijo * mu * r2) {
                accepted = true;
                break;
            }
            mu *= options.shrink;
        }
        if (!accepted && val > cur) {
            accepted = true;  // ascent without the Armijo margin still moves us up
        }
        if (!accepted) {
            result.converged = true;  // no ascent step found: stationary
            break;
        }

        result.phases = cand;
        const double prev = cur;
        cur = val;
        result.trace.push_back(weight_sum * cur);
        if (std::abs(cur - prev) <= options.eps * std::max(std::abs(prev), 1e-30)) {
            result.converged = true;
            break;
        }
    }
    result.conditioning_warning = objective.conditioning_warning();
    return result;
}

}  // namespace rispkg

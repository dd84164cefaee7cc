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

#include "rispkg/precoder_opt.hpp"

#include <cmath>
#include <limits>

#include "rispkg/linalg.hpp"

namespace rispkg {

namespace {

Eigen::VectorXcd to_vec(const Eigen::MatrixXcd& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Eigen::MatrixXcd from_vec(const Eigen::VectorXcd& v, int rows, int cols) {
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), rows, cols);
}

// kron(B^T, Q) for an M x M block B and M_e x M_e matrix Q
Eigen::MatrixXcd kron_bt_q(const Eigen::MatrixXcd& b, const Eigen::MatrixXcd& q) {
    const int m = static_cast<int>(b.rows());
    const int me = static_cast<int>(q.rows());
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(m) * me, static_cast<Eigen::Index>(m) * me);
    for (int p = 0; p < m; ++p) {
        for (int r = 0; r < m; ++r) {
            out.block(static_cast<Eigen::Index>(p) * me, static_cast<Eigen::Index>(r) * me, me,
                      me) = b(r, p) * q;  // (B^T)(p,r) = B(r,p)
        }
    }
    return out;
}

struct CellFactors {
    Eigen::LLT<Eigen::MatrixXcd> llt_signal;  // (P M_k P^H + I)
    Eigen::MatrixXcd inv_noise;               // (P N_k P^H + I)^{-1}
};

std::vector<CellFactors> factorize_cells(const PrecoderSet& p, const PrecoderSubproblem& sub) {
    const int kc = sub.cells;
    const int me = sub.rf_chains;
    std::vector<CellFactors> out(static_cast<size_t>(kc));
    for (int k = 0; k < kc; ++k) {
        Eigen::MatrixXcd r1 = Eigen::MatrixXcd::Identity(me, me);
        Eigen::MatrixXcd r2 = Eigen::MatrixXcd::Identity(me, me);
        for (int i = 0; i < kc; ++i) {
            const auto& pi = p.mats[static_cast<size_t>(i)];
            r1.noalias() += pi * sub.m_blocks[static_cast<size_t>(i)][static_cast<size_t>(k)] *
                            pi.adjoint();
            r2.noalias() += pi * sub.coupling(k, i) * pi.adjoint();
        }
        out[static_cast<size_t>(k)].llt_signal.compute(hermitize(r1));
        Eigen::LLT<Eigen::MatrixXcd> llt2(hermitize(r2));
        out[static_cast<size_t>(k)].inv_noise = llt2.solve(Eigen::MatrixXcd::Identity(me, me));
    }
    return out;
}

PrecoderSet blend(const PrecoderSet& a, const PrecoderSet& b, double eta) {
    PrecoderSet out = a;
    for (size_t i = 0; i < out.mats.size(); ++i) {
        out.mats[i] = (1.0 - eta) * a.mats[i] + eta * b.mats[i];
    }
    return out;
}

}  // namespace

Eigen::MatrixXcd PrecoderSubproblem::coupling(int k, int i) const {
    if (i == k) {
        return m_blocks[static_cast<size_t>(k)][static_cast<size_t>(k)] -
               n_kk[static_cast<size_t>(k)];
    }
    return m_blocks[static_cast<size_t>(i)][static_cast<size_t>(k)];
}

PrecoderSubproblem build_subproblem(const CovarianceSet& covs, const PhaseVector& phases,
                                    const SystemConfig& config) {
    config.validate();
    PrecoderSubproblem sub;
    sub.cells = config.cells;
    sub.antennas = config.antennas;
    sub.rf_chains = config.rf_chains;
    sub.power_budget = config.power_budget;
    sub.weights = config.effective_weights();
    sub.m_blocks.assign(static_cast<size_t>(config.cells),
                        std::vector<Eigen::MatrixXcd>(static_cast<size_t>(config.cells)));
    for (int i = 0; i < config.cells; ++i) {
        for (int k = 0; k < config.cells; ++k) {
            sub.m_blocks[static_cast<size_t>(i)][static_cast<size_t>(k)] =
                effective_cov_M(covs, i, k, phases);
        }
    }
    sub.n_kk.reserve(static_cast<size_t>(config.cells));
    for (int k = 0; k < config.cells; ++k) {
        sub.n_kk.push_back(effective_cov_N(covs, k, phases));
    }
    return sub;
}

double precoder_objective(const PrecoderSet& precoders, const PrecoderSubproblem& sub) {
    const int kc = sub.cells;
    const int me = sub.rf_chains;
    double total = 0.0;
    for (int k = 0; k < kc; ++k) {
        if (sub.weights(k) == 0.0) continue;
        Eigen::MatrixXcd r1 = Eigen::MatrixXcd::Identity(me, me);
        Eigen::MatrixXcd r2 = Eigen::MatrixXcd::Identity(me, me);
        for (int i = 0; i < kc; ++i) {
            const auto& pi = precoders.mats[static_cast<size_t>(i)];
            r1.noalias() += pi * sub.m_blocks[static_cast<size_t>(i)][static_cast<size_t>(k)] *
                            pi.adjoint();
            r2.noalias() += pi * sub.coupling(k, i) * pi.adjoint();
        }
        total += sub.weights(k) * (log_det_hpd(r1) - log_det_hpd(r2));
    }
    return total;
}

std::vector<MultiplierState> kkt_workspace(const PrecoderSet& precoders,
                                           const PrecoderSubproblem& sub) {
    const int kc = sub.cells;
    const int m = sub.antennas;
    const int me = sub.rf_chains;
    const auto factors = factorize_cells(precoders, sub);

    std::vector<MultiplierState> states(static_cast<size_t>(kc));
    for (int i = 0; i < kc; ++i) {
        Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m) * me);
        Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m) * me,
                                                    static_cast<Eigen::Index>(m) * me);
        const auto& pi = precoders.mats[static_cast<size_t>(i)];
        for (int k = 0; k < kc; ++k) {
            const double w = sub.weights(k);
            if (w == 0.0) continue;
            const auto& mik = sub.m_blocks[static_cast<size_t>(i)][static_cast<size_t>(k)];
            a += w * to_vec(factors[static_cast<size_t>(k)].llt_signal.solve(pi * mik));
            f += w * kron_bt_q(sub.coupling(k, i), factors[static_cast<size_t>(k)].inv_noise);
        }
        auto& st = states[static_cast<size_t>(i)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitize(f));
        st.eigenvalues = es.eigenvalues();
        st.eigenvectors = es.eigenvectors();
        st.a = a;
        st.b = st.eigenvectors.adjoint() * a;
    }
    return states;
}

double phi(double lambda, const Eigen::VectorXd& f, const Eigen::VectorXcd& b) {
    double total = 0.0;
    for (Eigen::Index mIdx = 0; mIdx < f.size(); ++mIdx) {
        const double bm = std::abs(b(mIdx));
        if (bm == 0.0) continue;
        const double den = lambda + f(mIdx);
        if (den <= 1e-150) return std::numeric_limits<double>::infinity();
        total += (bm * bm) / (den * den);
    }
    return total;
}

double phi(double lambda, const MultiplierState& state) {
    return phi(lambda, state.eigenvalues, state.b);
}

double solve_multiplier(const Eigen::VectorXd& f, const Eigen::VectorXcd& b, double power_budget,
                        double eps) {
    if (!(power_budget > 0.0)) {
        throw std::invalid_argument("solve_multiplier: power budget must be positive");
    }
    if (phi(0.0, f, b) <= power_budget) {
        return 0.0;  // complementary slackness: constraint inactive
    }
    double ub = std::sqrt(b.squaredNorm() / power_budget);  // phi(ub) <= P_A by construction
    double lb = 0.0;
    while (ub - lb > eps) {
        const double mid = 0.5 * (ub + lb);
        if (phi(mid, f, b) <= power_budget) {
            ub = mid;
        } else {
            lb = mid;
        }
    }
    return ub;  // the feasible end of the bracket
}

namespace {

Eigen::MatrixXcd rebuild_precoder(const MultiplierState& st, double lambda, int me, int m) {
    Eigen::VectorXcd coeff(st.b.size());
    for (Eigen::Index t = 0; t < st.b.size(); ++t) {
        const double den = lambda + st.eigenvalues(t);
        coeff(t) = (std::abs(st.b(t)) == 0.0 || den <= 1e-300) ? cplx(0.0, 0.0) : st.b(t) / den;
    }
    return from_vec(st.eigenvectors * coeff, me, m);
}

}  // namespace

PrecoderSet kkt_step(const PrecoderSet& precoders, const std::vector<double>& lambdas,
                     const PrecoderSubproblem& sub) {
    if (static_cast<int>(lambdas.size()) != sub.cells) {
        throw std::invalid_argument("kkt_step: need one multiplier per BS");
    }
    bool all_zero = true;
    for (const auto& m : precoders.mats) {
        if (m.squaredNorm() != 0.0) {
            all_zero = false;
            break;
        }
    }
    if (all_zero) return precoders;  // zero is a fixed point of the homogeneous update

    const auto states = kkt_workspace(precoders, sub);
    PrecoderSet out;
    out.mats.reserve(static_cast<size_t>(sub.cells));
    for (int i = 0; i < sub.cells; ++i) {
        out.mats.push_back(rebuild_precoder(states[static_cast<size_t>(i)], lambdas[static_cast<size_t>(i)],
                                            sub.rf_chains, sub.antennas));
    }
    return out;
}

std::vector<Eigen::MatrixXcd> lagrangian_gradient(const PrecoderSet& precoders,
                                                  const std::vector<double>& lambdas,
                                                  const PrecoderSubproblem& sub) {
    const auto factors = factorize_cells(precoders, sub);
    std::vector<Eigen::MatrixXcd> grads;
    grads.reserve(static_cast<size_t>(sub.cells));
    for (int i = 0; i < sub.cells; ++i) {
        const auto& pi = precoders.mats[static_cast<size_t>(i)];
        Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(sub.rf_chains, sub.antennas);
        for (int k = 0; k < sub.cells; ++k) {
            const double w = sub.weights(k);
            if (w == 0.0) continue;
            const auto& mik = sub.m_blocks[static_cast<size_t>(i)][static_cast<size_t>(k)];
            g += w * (factors[static_cast<size_t>(k)].llt_signal.solve(pi * mik) -
                      factors[static_cast<size_t>(k)].inv_noise * (pi * sub.coupling(k, i)));
        }
        g -= lambdas[static_cast<size_t>(i)] * pi;
        grads.push_back(std::move(g));
    }
    return grads;
}

PrecoderOptResult optimize_precoders(const PrecoderSubproblem& sub, const SystemConfig& config,
                                     const PrecoderSet& init, const PrecoderOptOptions& options) {
    init.validate(config);

    PrecoderOptResult result;
    result.precoders = init;
    result.lambdas.assign(static_cast<size_t>(sub.cells), 0.0);

    const double weight_sum = sub.weights.sum();
    if (weight_sum == 0.0) {
        // objective is constant; nothing to optimize
        result.trace = {0.0};
        result.converged = true;
        return result;
    }
    PrecoderSubproblem norm = sub;
    norm.weights /= weight_sum;

    double cur = precoder_objective(result.precoders, norm);
    result.trace.push_back(weight_sum * cur);

    std::vector<double> lambdas(static_cast<size_t>(sub.cells), 0.0);
    for (int it = 0; it < options.max_iters; ++it) {
        const auto states = kkt_workspace(result.precoders, norm);
        PrecoderSet kkt;
        kkt.mats.reserve(static_cast<size_t>(sub.cells));
        for (int i = 0; i < sub.cells; ++i) {
            const auto& st = states[static_cast<size_t>(i)];
            lambdas[static_cast<size_t>(i)] =
                solve_multiplier(st.eigenvalues, st.b, sub.power_budget, options.bisect_eps);
            kkt.mats.push_back(rebuild_precoder(st, lambdas[static_cast<size_t>(i)],
                                                sub.rf_chains, sub.antennas));
        }

        const double decrease_tol = 1e-12 * std::max(1.0, std::abs(cur));
        double eta = 1.0;
        PrecoderSet cand = kkt;
        double val = precoder_objective(cand, norm);
        while (val < cur - decrease_tol && eta > 1e-6) {
            eta *= 0.5;
            cand = blend(result.precoders, kkt, eta);
            val = precoder_objective(cand, norm);
        }
        if (val < cur - decrease_tol) {
            // no ascent direction left at this fixed point
            result.converged = true;
            break;
        }

        result.precoders = cand;
        result.lambdas = lambdas;
        result.iterations = it + 1;
        result.trace.push_back(weight_sum * val);
        bool done = std::abs(val - cur) <= options.eps * std::max(std::abs(cur), 1e-30);
        cur = val;
        if (done && options.kkt_tol > 0.0) {
            const auto grads = lagrangian_gradient(result.precoders, lambdas, norm);
            double g2 = 0.0, p2 = 0.0;
            for (int i = 0; i < sub.cells; ++i) {
                g2 += grads[static_cast<size_t>(i)].squaredNorm();
                p2 += result.precoders.mats[static_cast<size_t>(i)].squaredNorm();
            }
            done = weight_sum * std::sqrt(g2) <=
                   options.kkt_tol * std::max(1.0, std::sqrt(p2));
        }
        if (done) {
            result.converged = true;
            break;
        }
    }
    for (auto& l : result.lambdas) l *= weight_sum;  // restore the caller's weight scale
    return result;
}

}  // namespace rispkg

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

#include <doctest.h>

#include "rispkg/phase_opt.hpp"
#include "test_support.hpp"

using namespace rispkg;
using rispkg::testing::random_covariances;
using rispkg::testing::random_precoders;

namespace {

SystemConfig make_config(int cells, int antennas, int rf_chains, int phase_dim, double power) {
    SystemConfig c;
    c.cells = cells;
    c.antennas = antennas;
    c.rf_chains = rf_chains;
    c.ris_count = 1;
    c.ris_elements = phase_dim;
    c.power_budget = power;
    return c;
}

// central finite differences of the Wirtinger gradient w.r.t. v_bar*
Eigen::VectorXcd fd_gradient(const CovarianceSet& covs, const PrecoderSet& p,
                             const PhaseVector& v, const Eigen::VectorXd& w, double step) {
    const PhaseObjective objective(covs, p, w);
    const int nl = v.size();
    Eigen::VectorXcd g(nl);
    for (int n = 0; n < nl; ++n) {
        for (int part = 0; part < 2; ++part) {
            PhaseVector plus = v, minus = v;
            const cplx delta = part == 0 ? cplx(step, 0.0) : cplx(0.0, step);
            plus.v_bar(n) += delta;
            minus.v_bar(n) -= delta;
            const double der = (objective.value(plus) - objective.value(minus)) / (2.0 * step);
            if (part == 0) {
                g(n) = cplx(0.5 * der, 0.0);
            } else {
                g(n) += cplx(0.0, 0.5 * der);
            }
        }
    }
    return g;
}

}  // namespace

TEST_SUITE_BEGIN("phase_opt");

TEST_CASE("project_unit_modulus normalizes, is idempotent and maps zero to one") {
    Eigen::VectorXcd x(3);
    x << cplx(3.0, 4.0), cplx(0.0, 0.0), cplx(-2.0, 0.0);
    const PhaseVector p = project_unit_modulus(x);
    CHECK(std::abs(p.v_bar(0) - cplx(0.6, 0.8)) < 1e-15);
    CHECK(p.v_bar(1) == cplx(1.0, 0.0));
    CHECK(p.v_bar(2) == cplx(-1.0, 0.0));
    const PhaseVector again = project_unit_modulus(p.v_bar);
    CHECK((again.v_bar - p.v_bar).norm() < 1e-15);
}

TEST_CASE("objective agrees with kgr_upper_bound") {
    auto rng = make_rng(1);
    for (int t = 0; t < 6; ++t) {
        const SystemConfig c = make_config(2, 3, 2, 2, 2.0);
        const CovarianceSet covs = random_covariances(rng, 2, 3, 2);
        const PrecoderSet p = random_precoders(rng, c);
        const PhaseVector v = PhaseVector::random(2, 40 + t);
        const Eigen::VectorXd w = c.effective_weights();
        const double via_subproblem = eval_objective_v(covs, p, v, w);
        const double via_bound = wskr(w, kgr_upper_bound(c, covs, p, v));
        CHECK(via_subproblem == doctest::Approx(via_bound).epsilon(1e-9));
    }
}

TEST_CASE("objective is constant in the phases when cascades vanish") {
    auto rng = make_rng(2);
    const SystemConfig c = make_config(2, 2, 2, 3, 2.0);
    CovarianceSet covs = random_covariances(rng, 2, 2, 3);
    for (auto& row : covs.ris) {
        for (auto& r : row) r.setZero();
    }
    const PrecoderSet p = random_precoders(rng, c);
    const Eigen::VectorXd w = c.effective_weights();
    const double a = eval_objective_v(covs, p, PhaseVector::ones(3), w);
    const double b = eval_objective_v(covs, p, PhaseVector::random(3, 5), w);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(analytic_gradient(covs, p, PhaseVector::random(3, 6), w).norm() == 0.0);
}

TEST_CASE("single-cell objective with full rf chains equals the exact rate") {
    auto rng = make_rng(3);
    const SystemConfig c = make_config(1, 3, 3, 2, 2.0);
    const CovarianceSet covs = random_covariances(rng, 1, 3, 2);
    const PrecoderSet p = random_precoders(rng, c);
    const PhaseVector v = PhaseVector::random(2, 11);
    const double obj = eval_objective_v(covs, p, v, c.effective_weights());
    const double exact = wskr(c.effective_weights(), kgr_exact(c, covs, p, v));
    CHECK(obj == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("analytic gradient matches central finite differences") {
    auto rng = make_rng(4);
    Eigen::VectorXd w(2);
    w << 1.0, 0.7;
    for (int t = 0; t < 5; ++t) {
        const SystemConfig c = make_config(2, 2, 2, 2, 4.0);
        const CovarianceSet covs = random_covariances(rng, 2, 2, 2);
        const PrecoderSet p = random_precoders(rng, c);
        const PhaseVector v = PhaseVector::random(2, 500 + t);
        const Eigen::VectorXcd analytic = analytic_gradient(covs, p, v, w);
        const Eigen::VectorXcd fd = fd_gradient(covs, p, v, w, 1e-6);
        CHECK((analytic - fd).norm() < 1e-5 * fd.norm());
    }
}

TEST_CASE("gradient is linear in the weights") {
    auto rng = make_rng(5);
    const SystemConfig c = make_config(2, 2, 2, 2, 2.0);
    const CovarianceSet covs = random_covariances(rng, 2, 2, 2);
    const PrecoderSet p = random_precoders(rng, c);
    const PhaseVector v = PhaseVector::random(2, 3);
    Eigen::VectorXd w(2);
    w << 0.5, 1.5;
    const Eigen::VectorXcd g1 = analytic_gradient(covs, p, v, w);
    const Eigen::VectorXcd g3 = analytic_gradient(covs, p, v, 3.0 * w);
    CHECK((g3 - 3.0 * g1).norm() < 1e-12 * g1.norm());
}

TEST_CASE("optimization with zero cascades returns the start after one iteration") {
    auto rng = make_rng(6);
    const SystemConfig c = make_config(2, 2, 2, 3, 2.0);
    CovarianceSet covs = random_covariances(rng, 2, 2, 3);
    for (auto& row : covs.ris) {
        for (auto& r : row) r.setZero();
    }
    const PrecoderSet p = random_precoders(rng, c);
    const PhaseVector init = PhaseVector::random(3, 8);
    const PhaseOptResult res = optimize_phases(covs, p, c, init);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    CHECK((res.phases.v_bar - init.v_bar).norm() == 0.0);
}

TEST_CASE("ascent trace is monotone and iterates stay unit-modulus") {
    auto rng = make_rng(7);
    const SystemConfig c = make_config(2, 2, 2, 4, 3.0);
    const CovarianceSet covs = random_covariances(rng, 2, 2, 4);
    const PrecoderSet p = random_precoders(rng, c);
    const PhaseOptResult res =
        optimize_phases(covs, p, c, PhaseVector::ones(4), {1e-10, 1000, 1.0, 0.5, 1e-4, 40});
    CHECK(res.converged);
    for (size_t i = 1; i < res.trace.size(); ++i) {
        CHECK(res.trace[i] >= res.trace[i - 1] - 1e-8);
    }
    for (int n = 0; n < 4; ++n) {
        CHECK(std::abs(std::abs(res.phases.v_bar(n)) - 1.0) < 1e-12);
    }
}

TEST_CASE("converged output is stationary on the unit-modulus torus") {
    auto rng = make_rng(8);
    const SystemConfig c = make_config(2, 2, 2, 3, 3.0);
    const CovarianceSet covs = random_covariances(rng, 2, 2, 3);
    const PrecoderSet p = random_precoders(rng, c);
    const PhaseOptResult res =
        optimize_phases(covs, p, c, PhaseVector::ones(3), {1e-12, 5000, 1.0, 0.5, 1e-4, 40});
    CHECK(res.converged);
    const PhaseObjective objective(covs, p, c.effective_weights());
    const double value = objective.value(res.phases);
    const double residual = objective.riemannian_gradient(res.phases).norm();
    CHECK(residual < 1e-4 * std::max(1.0, std::abs(value)));
}

TEST_CASE("optimized phases beat a batch of random probes") {
    auto rng = make_rng(9);
    const SystemConfig c = make_config(2, 2, 2, 4, 3.0);  // N = 4, L = 1
    const CovarianceSet covs = random_covariances(rng, 2, 2, 4);
    const PrecoderSet p = random_precoders(rng, c);
    const Eigen::VectorXd w = c.effective_weights();
    const PhaseOptResult res =
        optimize_phases(covs, p, c, PhaseVector::ones(4), {1e-10, 2000, 1.0, 0.5, 1e-4, 40});
    const double optimized = eval_objective_v(covs, p, res.phases, w);
    for (int t = 0; t < 64; ++t) {
        const double probe = eval_objective_v(covs, p, PhaseVector::random(4, 9000 + t), w);
        CHECK(optimized >= probe - 1e-6);
    }
}

TEST_SUITE_END();

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

#include "rispkg/linalg.hpp"
#include "test_support.hpp"

using namespace rispkg;

TEST_SUITE_BEGIN("linalg");

TEST_CASE("commutation matrix of size 1 is identity") {
    const Eigen::MatrixXd k = commutation_matrix(1, 1);
    REQUIRE(k.rows() == 1);
    CHECK(k(0, 0) == 1.0);
}

TEST_CASE("commutation matrix 2x2 swaps the middle entries") {
    const Eigen::MatrixXd k = commutation_matrix(2, 2);
    Eigen::MatrixXd expected = Eigen::MatrixXd::Identity(4, 4);
    expected(1, 1) = expected(2, 2) = 0.0;
    expected(1, 2) = expected(2, 1) = 1.0;
    CHECK((k - expected).norm() == 0.0);
}

TEST_CASE("commutation matrix maps vec(A) to vec(A^T) exactly") {
    auto rng = make_rng(11);
    const Eigen::MatrixXcd a = randn_complex(rng, 3, 4);
    const Eigen::MatrixXd k = commutation_matrix(3, 4);
    const Eigen::VectorXcd vec_a = Eigen::Map<const Eigen::VectorXcd>(a.data(), a.size());
    const Eigen::MatrixXcd at = a.transpose();
    const Eigen::VectorXcd vec_at = Eigen::Map<const Eigen::VectorXcd>(at.data(), at.size());
    CHECK((k * vec_a - vec_at).norm() == 0.0);
}

TEST_CASE("commutation matrices invert each other exactly") {
    for (auto [m, n] : {std::pair{2, 3}, std::pair{4, 2}, std::pair{3, 3}}) {
        const Eigen::MatrixXd prod = commutation_matrix(n, m) * commutation_matrix(m, n);
        CHECK((prod - Eigen::MatrixXd::Identity(prod.rows(), prod.cols())).norm() == 0.0);
    }
    CHECK_THROWS_AS(commutation_matrix(0, 2), std::invalid_argument);
}

TEST_CASE("log_det_hpd matches the LU route on random PSD matrices") {
    auto rng = make_rng(5);
    for (int t = 0; t < 10; ++t) {
        const Eigen::MatrixXcd a =
            testing::random_psd(rng, 5, 1.0) + Eigen::MatrixXcd::Identity(5, 5);
        CHECK(log_det_hpd(a) == doctest::Approx(testing::log_det_lu(a)).epsilon(1e-10));
    }
}

TEST_CASE("phase_contract agrees with the explicit Kronecker congruence") {
    auto rng = make_rng(17);
    const int m = 3, nl = 4;
    const Eigen::MatrixXcd r = testing::random_psd(rng, m * nl, 1.0);
    Eigen::VectorXcd v_bar(nl);
    for (int n = 0; n < nl; ++n) v_bar(n) = std::polar(1.0, 0.7 * n + 0.3);

    Eigen::MatrixXcd kron = Eigen::MatrixXcd::Zero(m * nl, m);
    for (int n = 0; n < nl; ++n) {
        kron.block(n * m, 0, m, m) = v_bar(n) * Eigen::MatrixXcd::Identity(m, m);
    }
    const Eigen::MatrixXcd expected = kron.adjoint() * r * kron;
    CHECK((phase_contract(r, v_bar, m, m) - expected).norm() < 1e-12 * expected.norm());
}

TEST_CASE("seed mixing separates streams") {
    CHECK(mix_seed(1, 2) != mix_seed(1, 3));
    CHECK(mix_seed(1, 2, 3) != mix_seed(1, 3, 2));
    CHECK(mix_seed(7, 2) == mix_seed(7, 2));
}

TEST_CASE("GaussianSampler reproduces its covariance") {
    auto rng = make_rng(23);
    const Eigen::MatrixXcd r = testing::random_psd(rng, 3, 2.0);
    GaussianSampler sampler(r);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(3, 3);
    const int n = 200000;
    for (int s = 0; s < n; ++s) {
        const Eigen::VectorXcd x = sampler.draw(rng);
        acc.noalias() += x * x.adjoint();
    }
    acc /= n;
    CHECK((acc - r).norm() < 0.03 * r.norm());
}

TEST_SUITE_END();

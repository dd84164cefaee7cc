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

#include "rispkg/linalg.hpp"

#include "rispkg/types.hpp"

#include <cmath>
#include <stdexcept>

namespace rispkg {

double log_det_hpd(const Eigen::MatrixXcd& a) {
    const Eigen::MatrixXcd sym = hermitize(a);
    Eigen::LLT<Eigen::MatrixXcd> llt(sym);
    if (llt.info() != Eigen::Success) {
        const double n = static_cast<double>(sym.rows());
        const double jitter = 1e-12 * sym.real().trace() / n;
        llt.compute(sym + jitter * Eigen::MatrixXcd::Identity(sym.rows(), sym.cols()));
        if (llt.info() != Eigen::Success) {
            throw std::runtime_error("log_det_hpd: matrix is not positive definite");
        }
    }
    double log_det = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        log_det += 2.0 * std::log(l(i, i).real());
    }
    return log_det;
}

Eigen::MatrixXd commutation_matrix(int m, int n) {
    if (m < 1 || n < 1) {
        throw std::invalid_argument("commutation_matrix: dimensions must be >= 1");
    }
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m) * n,
                                              static_cast<Eigen::Index>(m) * n);
    // vec(A)[j*m + i] = A(i,j); vec(A^T)[i*n + j] = A(i,j)
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            k(static_cast<Eigen::Index>(i) * n + j, static_cast<Eigen::Index>(j) * m + i) = 1.0;
        }
    }
    return k;
}

Eigen::MatrixXcd contract_right(const Eigen::MatrixXcd& r, const Eigen::VectorXcd& v_bar, int b) {
    const int nl = static_cast<int>(v_bar.size());
    if (r.cols() != static_cast<Eigen::Index>(b) * nl) {
        throw std::invalid_argument("contract_right: column count does not match b * |v|");
    }
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(r.rows(), b);
    for (int n = 0; n < nl; ++n) {
        w.noalias() += v_bar(n) * r.middleCols(static_cast<Eigen::Index>(n) * b, b);
    }
    return w;
}

Eigen::MatrixXcd phase_contract(const Eigen::MatrixXcd& r, const Eigen::VectorXcd& v_bar, int rb,
                                int cb) {
    const int nl = static_cast<int>(v_bar.size());
    if (r.rows() != static_cast<Eigen::Index>(rb) * nl) {
        throw std::invalid_argument("phase_contract: row count does not match rb * |v|");
    }
    const Eigen::MatrixXcd w = contract_right(r, v_bar, cb);
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(rb, cb);
    for (int n = 0; n < nl; ++n) {
        t.noalias() += std::conj(v_bar(n)) * w.middleRows(static_cast<Eigen::Index>(n) * rb, rb);
    }
    return t;
}

std::pair<double, double> eig_range(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitize(a), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Eigen::VectorXcd randn_complex(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> normal(0.0, M_SQRT1_2);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = cplx(re, im);
    }
    return v;
}

Eigen::MatrixXcd randn_complex(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> normal(0.0, M_SQRT1_2);
    Eigen::MatrixXcd m(rows, cols);
    // column-major fill order, fixed for reproducibility
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(r, c) = cplx(re, im);
        }
    }
    return m;
}

GaussianSampler::GaussianSampler(const Eigen::MatrixXcd& covariance) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitize(covariance));
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("GaussianSampler: eigendecomposition failed");
    }
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    factor_ = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

Eigen::VectorXcd GaussianSampler::draw(std::mt19937_64& rng) const {
    return factor_ * randn_complex(rng, static_cast<int>(factor_.cols()));
}

}  // namespace rispkg

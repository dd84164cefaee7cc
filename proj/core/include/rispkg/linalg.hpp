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

#ifndef RISPKG_LINALG_HPP
#define RISPKG_LINALG_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace rispkg {

inline Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& a) {
    return 0.5 * (a + a.adjoint());
}

/// log det of a Hermitian positive (semi)definite matrix via Cholesky.
/// If the factorization fails, a jitter of 1e-12 * trace/n is added once.
double log_det_hpd(const Eigen::MatrixXcd& a);

/// Commutation matrix K_{m,n}: the mn x mn permutation with
/// K_{m,n} vec(A) = vec(A^T) for every m x n matrix A.
Eigen::MatrixXd commutation_matrix(int m, int n);

/// W = R (v_bar kron I_b): weighted sum of the b-column blocks of R.
/// Requires R.cols() == b * v_bar.size().
Eigen::MatrixXcd contract_right(const Eigen::MatrixXcd& r, const Eigen::VectorXcd& v_bar, int b);

/// (v_bar^H kron I_rb) R (v_bar kron I_cb); rb x cb result.
/// This is the congruence that maps a cascade covariance onto the effective
/// antenna-domain covariance for a given phase vector.
Eigen::MatrixXcd phase_contract(const Eigen::MatrixXcd& r, const Eigen::VectorXcd& v_bar, int rb,
                                int cb);

/// Smallest/largest eigenvalue of a Hermitian matrix (for PSD checks).
std::pair<double, double> eig_range(const Eigen::MatrixXcd& a);

// --- seeding -----------------------------------------------------------------
// Counter-based derivation: every Monte-Carlo task owns a seed derived from the
// master seed and its path, so parallel schedules cannot change results.

uint64_t splitmix64(uint64_t x);

inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL));
}

inline uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
    return mix_seed(mix_seed(seed, a), b);
}

inline uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
    return mix_seed(mix_seed(seed, a, b), c);
}

inline std::mt19937_64 make_rng(uint64_t seed) { return std::mt19937_64(seed); }

/// Circularly-symmetric complex Gaussian with unit variance per entry.
Eigen::VectorXcd randn_complex(std::mt19937_64& rng, int n);
Eigen::MatrixXcd randn_complex(std::mt19937_64& rng, int rows, int cols);

/// Draws x ~ CN(0, R) for Hermitian PSD R via a one-time eigen square root.
class GaussianSampler {
  public:
    explicit GaussianSampler(const Eigen::MatrixXcd& covariance);
    Eigen::VectorXcd draw(std::mt19937_64& rng) const;
    int dim() const { return static_cast<int>(factor_.rows()); }

  private:
    Eigen::MatrixXcd factor_;  // R^{1/2} with negative eigenvalues clamped to 0
};

}  // namespace rispkg

#endif

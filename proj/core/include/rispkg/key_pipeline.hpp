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

#ifndef RISPKG_KEY_PIPELINE_HPP
#define RISPKG_KEY_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rispkg/channel.hpp"
#include "rispkg/types.hpp"

namespace rispkg {

/// Features extracted in one probing round for one cell:
/// y_k at the UT (M_e), z_tilde_k at the BS before precoding (M), z_k = P_k z_tilde_k.
struct ProbingOutcome {
    Eigen::VectorXcd y;
    Eigen::VectorXcd z_tilde;
    Eigen::VectorXcd z;
};

struct ProbeOptions {
    double noise_scale = 1.0;  // 1.0 is the unit-variance model; 0 gives the noiseless limit
};

/// One probing round over precomputed effective channels h[i][j] (BS i -> UT j):
///   y_k = sum_i P_i h_{i,k} + n^d,  z_tilde_k = sum_j h_{k,j} + n^u,  z_k = P_k z_tilde_k.
/// Downlink and uplink noises are independent; the channels are shared
/// (reciprocity within one coherence time).
std::vector<ProbingOutcome> probe_features(const std::vector<std::vector<Eigen::VectorXcd>>& h,
                                           const PrecoderSet& precoders, uint64_t seed,
                                           const ProbeOptions& options = {});

/// probe_features on the effective channels of a realization under v_bar.
std::vector<ProbingOutcome> probe_round(const ChannelRealization& realization,
                                        const PrecoderSet& precoders, const PhaseVector& phases,
                                        uint64_t seed, const ProbeOptions& options = {});

struct BitSequence {
    std::vector<uint8_t> bits;  // 0/1, round-major then component-minor
    int cell = -1;
    int rounds = 0;
    int components = 0;  // 2 x feature dimension (Re, Im per entry)
    std::vector<int> constant_components;  // flagged: these emitted all zeros

    size_t size() const { return bits.size(); }
    /// The bits of one component across rounds (stride-deinterleaved).
    std::vector<uint8_t> component_stream(int component) const;
};

/// Median-threshold quantizer: for each real/imaginary component, emit 1 iff the
/// value exceeds that component's median across rounds. Needs >= 2 rounds.
BitSequence quantize(const std::vector<Eigen::VectorXcd>& feature_rounds);

/// Bit disagreement ratio: Hamming distance / length. Lengths must match.
double bdr(const BitSequence& a, const BitSequence& b);

/// Monobit frequency test p-value: erfc(|S_n| / sqrt(2 n)). No length gate.
double monobit_p_value(const std::vector<uint8_t>& bits);

/// Runs test p-value per the standard definition, with the prerequisite
/// |pi - 1/2| < 2/sqrt(n); returns 0 when the prerequisite fails.
double runs_p_value(const std::vector<uint8_t>& bits);

struct RandomnessReport {
    double frequency_p = 0.0;
    double runs_p = 0.0;
    bool frequency_pass = false;  // p > 0.01
    bool runs_pass = false;
};

/// Both tests with the pass criterion p > 0.01. Throws std::invalid_argument
/// for sequences shorter than 100 bits.
RandomnessReport randomness_check(const BitSequence& bits);

/// Packs bits LSB-first within each byte (bit i of byte b is sequence index 8b+i).
std::vector<uint8_t> pack_bits(const std::vector<uint8_t>& bits);
void write_bits_file(const std::string& path, const std::vector<uint8_t>& bits);

}  // namespace rispkg

#endif

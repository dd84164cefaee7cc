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

#include "rispkg/key_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rispkg/linalg.hpp"

namespace rispkg {

std::vector<ProbingOutcome> probe_features(const std::vector<std::vector<Eigen::VectorXcd>>& h,
                                           const PrecoderSet& precoders, uint64_t seed,
                                           const ProbeOptions& options) {
    const int kc = static_cast<int>(h.size());
    if (kc == 0 || static_cast<int>(precoders.mats.size()) != kc) {
        throw std::invalid_argument("probe_features: channel grid and precoders must be K x K");
    }
    const int m = static_cast<int>(h[0][0].size());
    const int me = static_cast<int>(precoders.mats[0].rows());
    auto rng = make_rng(mix_seed(seed, 0x70726f62ULL));

    std::vector<ProbingOutcome> out(static_cast<size_t>(kc));
    for (int k = 0; k < kc; ++k) {
        auto& o = out[static_cast<size_t>(k)];
        o.y = Eigen::VectorXcd::Zero(me);
        for (int i = 0; i < kc; ++i) {
            o.y.noalias() +=
                precoders.mats[static_cast<size_t>(i)] * h[static_cast<size_t>(i)][static_cast<size_t>(k)];
        }
        o.y += options.noise_scale * randn_complex(rng, me);

        o.z_tilde = Eigen::VectorXcd::Zero(m);
        for (int j = 0; j < kc; ++j) {
            o.z_tilde += h[static_cast<size_t>(k)][static_cast<size_t>(j)];
        }
        o.z_tilde += options.noise_scale * randn_complex(rng, m);
        o.z = precoders.mats[static_cast<size_t>(k)] * o.z_tilde;
    }
    return out;
}

std::vector<ProbingOutcome> probe_round(const ChannelRealization& realization,
                                        const PrecoderSet& precoders, const PhaseVector& phases,
                                        uint64_t seed, const ProbeOptions& options) {
    const int kc = realization.cells;
    std::vector<std::vector<Eigen::VectorXcd>> h(
        static_cast<size_t>(kc), std::vector<Eigen::VectorXcd>(static_cast<size_t>(kc)));
    for (int i = 0; i < kc; ++i) {
        for (int j = 0; j < kc; ++j) {
            h[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                effective_channel(realization, i, j, phases);
        }
    }
    return probe_features(h, precoders, seed, options);
}

std::vector<uint8_t> BitSequence::component_stream(int component) const {
    std::vector<uint8_t> out;
    out.reserve(static_cast<size_t>(rounds));
    for (int r = 0; r < rounds; ++r) {
        out.push_back(bits[static_cast<size_t>(r) * components + component]);
    }
    return out;
}

BitSequence quantize(const std::vector<Eigen::VectorXcd>& feature_rounds) {
    const int rounds = static_cast<int>(feature_rounds.size());
    if (rounds < 2) {
        throw std::invalid_argument("quantize: need at least 2 rounds");
    }
    const int dim = static_cast<int>(feature_rounds[0].size());
    for (const auto& f : feature_rounds) {
        if (static_cast<int>(f.size()) != dim) {
            throw std::invalid_argument("quantize: inconsistent feature dimensions");
        }
    }
    const int comps = 2 * dim;

    BitSequence seq;
    seq.rounds = rounds;
    seq.components = comps;
    seq.bits.assign(static_cast<size_t>(rounds) * comps, 0);

    std::vector<double> column(static_cast<size_t>(rounds));
    for (int c = 0; c < comps; ++c) {
        const int entry = c / 2;
        const bool imag = (c % 2) != 0;
        for (int r = 0; r < rounds; ++r) {
            const cplx v = feature_rounds[static_cast<size_t>(r)](entry);
            column[static_cast<size_t>(r)] = imag ? v.imag() : v.real();
        }
        std::vector<double> sorted = column;
        std::sort(sorted.begin(), sorted.end());
        const double median = (rounds % 2 == 1)
                                  ? sorted[static_cast<size_t>(rounds / 2)]
                                  : 0.5 * (sorted[static_cast<size_t>(rounds / 2 - 1)] +
                                           sorted[static_cast<size_t>(rounds / 2)]);
        if (sorted.front() == sorted.back()) {
            seq.constant_components.push_back(c);  // all bits stay 0 by convention
            continue;
        }
        for (int r = 0; r < rounds; ++r) {
            seq.bits[static_cast<size_t>(r) * comps + c] =
                column[static_cast<size_t>(r)] > median ? 1 : 0;
        }
    }
    return seq;
}

double bdr(const BitSequence& a, const BitSequence& b) {
    if (a.size() == 0 || a.size() != b.size()) {
        throw std::invalid_argument("bdr: sequences must be nonempty and of equal length");
    }
    size_t mismatches = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        mismatches += (a.bits[i] != b.bits[i]) ? 1u : 0u;
    }
    return static_cast<double>(mismatches) / static_cast<double>(a.size());
}

double monobit_p_value(const std::vector<uint8_t>& bits) {
    const double n = static_cast<double>(bits.size());
    if (bits.empty()) throw std::invalid_argument("monobit_p_value: empty sequence");
    long sum = 0;
    for (uint8_t b : bits) sum += b ? 1 : -1;
    return std::erfc(std::abs(static_cast<double>(sum)) / std::sqrt(2.0 * n));
}

double runs_p_value(const std::vector<uint8_t>& bits) {
    const double n = static_cast<double>(bits.size());
    if (bits.size() < 2) throw std::invalid_argument("runs_p_value: sequence too short");
    double ones = 0;
    for (uint8_t b : bits) ones += b;
    const double pi = ones / n;
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) {
        return 0.0;  // frequency prerequisite failed
    }
    double v = 1.0;
    for (size_t i = 0; i + 1 < bits.size(); ++i) {
        v += (bits[i] != bits[i + 1]) ? 1.0 : 0.0;
    }
    const double denom = 2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi);
    return std::erfc(std::abs(v - 2.0 * n * pi * (1.0 - pi)) / denom);
}

RandomnessReport randomness_check(const BitSequence& bits) {
    if (bits.size() < 100) {
        throw std::invalid_argument("randomness_check: need at least 100 bits");
    }
    RandomnessReport report;
    report.frequency_p = monobit_p_value(bits.bits);
    report.runs_p = runs_p_value(bits.bits);
    report.frequency_pass = report.frequency_p > 0.01;
    report.runs_pass = report.runs_p > 0.01;
    return report;
}

std::vector<uint8_t> pack_bits(const std::vector<uint8_t>& bits) {
    std::vector<uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) {
            bytes[i / 8] |= static_cast<uint8_t>(1u << (i % 8));  // LSB-first within each byte
        }
    }
    return bytes;
}

void write_bits_file(const std::string& path, const std::vector<uint8_t>& bits) {
    const std::vector<uint8_t> bytes = pack_bits(bits);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw config_error("write_bits_file: cannot open " + path);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace rispkg

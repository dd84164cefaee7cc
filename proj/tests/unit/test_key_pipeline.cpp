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

#include "rispkg/key_pipeline.hpp"
#include "rispkg/kgr.hpp"
#include "test_support.hpp"

using namespace rispkg;
using rispkg::testing::random_covariances;
using rispkg::testing::random_precoders;

namespace {

std::vector<uint8_t> parse_bits(const char* s) {
    std::vector<uint8_t> bits;
    for (const char* c = s; *c; ++c) bits.push_back(*c == '1' ? 1 : 0);
    return bits;
}

SystemConfig make_config(int cells, int antennas, int rf_chains, int phase_dim) {
    SystemConfig c;
    c.cells = cells;
    c.antennas = antennas;
    c.rf_chains = rf_chains;
    c.ris_count = 1;
    c.ris_elements = phase_dim;
    c.power_budget = static_cast<double>(antennas);
    return c;
}

}  // namespace

TEST_SUITE_BEGIN("key_pipeline");

TEST_CASE("noiseless single cell with identity precoder is perfectly reciprocal") {
    auto rng = make_rng(1);
    const int m = 3;
    std::vector<std::vector<Eigen::VectorXcd>> h(1, std::vector<Eigen::VectorXcd>(1));
    h[0][0] = randn_complex(rng, m);
    PrecoderSet p;
    p.mats = {Eigen::MatrixXcd::Identity(m, m)};
    const auto outcomes = probe_features(h, p, 5, ProbeOptions{0.0});
    CHECK((outcomes[0].y - outcomes[0].z).norm() == 0.0);
    CHECK((outcomes[0].z - outcomes[0].z_tilde).norm() == 0.0);
}

TEST_CASE("noiseless feature gap equals the interference asymmetry") {
    auto rng = make_rng(2);
    const int kc = 2, m = 2;
    std::vector<std::vector<Eigen::VectorXcd>> h(
        static_cast<size_t>(kc), std::vector<Eigen::VectorXcd>(static_cast<size_t>(kc)));
    for (int i = 0; i < kc; ++i) {
        for (int j = 0; j < kc; ++j) h[i][j] = randn_complex(rng, m);
    }
    PrecoderSet p;
    p.mats = {randn_complex(rng, m, m), randn_complex(rng, m, m)};
    const auto outcomes = probe_features(h, p, 9, ProbeOptions{0.0});
    for (int k = 0; k < kc; ++k) {
        const int other = 1 - k;
        const Eigen::VectorXcd downlink_interf = p.mats[other] * h[other][k];
        const Eigen::VectorXcd uplink_interf = p.mats[k] * h[k][other];
        const Eigen::VectorXcd gap = outcomes[k].y - outcomes[k].z;
        CHECK((gap - (downlink_interf - uplink_interf)).norm() < 1e-12);
    }
}

TEST_CASE("z is the precoded raw estimate") {
    auto rng = make_rng(3);
    const int m = 3, me = 2;
    std::vector<std::vector<Eigen::VectorXcd>> h(1, std::vector<Eigen::VectorXcd>(1));
    h[0][0] = randn_complex(rng, m);
    PrecoderSet p;
    p.mats = {randn_complex(rng, me, m)};
    const auto outcomes = probe_features(h, p, 10);
    CHECK((outcomes[0].z - p.mats[0] * outcomes[0].z_tilde).norm() < 1e-12);
}

TEST_CASE("sample covariance of y matches the model covariance") {
    auto rng = make_rng(4);
    const SystemConfig c = make_config(2, 2, 2, 2);
    const CovarianceSet covs = random_covariances(rng, 2, 2, 2);
    const PrecoderSet p = random_precoders(rng, c);
    const PhaseVector v = PhaseVector::random(2, 6);

    // analytic R_y for cell 0
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Identity(2, 2);
    for (int i = 0; i < 2; ++i) {
        expected += p.mats[i] * effective_cov_M(covs, i, 0, v) * p.mats[i].adjoint();
    }

    const testing::ModelChannelSampler sampler(covs, v);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(2, 2);
    const int n = 200000;
    auto noise_rng = make_rng(777);
    for (int s = 0; s < n; ++s) {
        const auto h = sampler.draw(noise_rng);
        Eigen::VectorXcd y = randn_complex(noise_rng, 2);
        for (int i = 0; i < 2; ++i) y += p.mats[i] * h[i][0];
        acc.noalias() += y * y.adjoint();
    }
    acc /= n;
    CHECK((acc - expected).norm() < 0.03 * expected.norm());
}

TEST_CASE("probe_round is deterministic given the seed") {
    const SystemConfig c = make_config(2, 2, 2, 3);
    ScenarioGeometry g;
    g.bs_positions = {{0, 0, 10}, {600, 0, 0}};
    g.ut_positions = {{280, 0, 0}, {320, 0, 0}};
    g.ris_positions = {{300, 0, 0}};
    const ChannelRealization real = sample_realization(g, FadingParams{}, c, 3);
    PrecoderSet p = PrecoderSet::scaled_identity(c);
    const PhaseVector v = PhaseVector::random(3, 12);
    const auto a = probe_round(real, p, v, 21);
    const auto b = probe_round(real, p, v, 21);
    CHECK((a[0].y - b[0].y).norm() == 0.0);
    CHECK((a[1].z - b[1].z).norm() == 0.0);
}

TEST_CASE("median quantizer emits sign bits around the per-component median") {
    std::vector<Eigen::VectorXcd> rounds;
    rounds.push_back(Eigen::VectorXcd::Constant(1, cplx(1.0, -2.0)));
    rounds.push_back(Eigen::VectorXcd::Constant(1, cplx(-1.0, 2.0)));
    const BitSequence seq = quantize(rounds);
    REQUIRE(seq.size() == 4);  // 2 rounds x (re, im)
    CHECK(seq.bits[0] == 1);  // re round 0: 1 > 0
    CHECK(seq.bits[1] == 0);  // im round 0: -2 < 0
    CHECK(seq.bits[2] == 0);
    CHECK(seq.bits[3] == 1);
    CHECK(seq.constant_components.empty());
}

TEST_CASE("identical streams quantize identically; negated streams flip") {
    auto rng = make_rng(5);
    std::vector<Eigen::VectorXcd> rounds, negated;
    for (int r = 0; r < 64; ++r) {
        rounds.push_back(randn_complex(rng, 3));
        negated.push_back(-rounds.back());
    }
    const BitSequence a = quantize(rounds);
    const BitSequence b = quantize(rounds);
    const BitSequence c = quantize(negated);
    CHECK(bdr(a, b) == 0.0);
    CHECK(bdr(a, c) == 1.0);
}

TEST_CASE("constant components are flagged and emit zeros") {
    std::vector<Eigen::VectorXcd> rounds(4, Eigen::VectorXcd::Constant(1, cplx(3.0, 1.0)));
    rounds[0](0) = cplx(3.0, 5.0);  // make im vary, re constant
    rounds[1](0) = cplx(3.0, -5.0);
    const BitSequence seq = quantize(rounds);
    REQUIRE(seq.constant_components.size() == 1);
    CHECK(seq.constant_components[0] == 0);
    for (int r = 0; r < 4; ++r) CHECK(seq.bits[2 * r] == 0);
}

TEST_CASE("quantize requires at least two rounds") {
    std::vector<Eigen::VectorXcd> rounds(1, Eigen::VectorXcd::Zero(2));
    CHECK_THROWS_AS(quantize(rounds), std::invalid_argument);
}

TEST_CASE("bdr basics") {
    BitSequence a, b;
    a.bits = {0, 1, 1, 0};
    b.bits = {0, 1, 1, 0};
    CHECK(bdr(a, b) == 0.0);
    b.bits = {1, 0, 0, 1};
    CHECK(bdr(a, b) == 1.0);
    b.bits = {0, 1, 0, 1};
    CHECK(bdr(a, b) == 0.5);
    b.bits = {0, 1};
    CHECK_THROWS_AS(bdr(a, b), std::invalid_argument);
}

TEST_CASE("monobit frequency test values") {
    CHECK(monobit_p_value(parse_bits("1011010101")) ==
          doctest::Approx(0.5270892568655381).epsilon(1e-9));
    // all ones: maximal bias
    CHECK(monobit_p_value(std::vector<uint8_t>(200, 1)) < 1e-12);
    // alternating: zero excess
    std::vector<uint8_t> alt;
    for (int i = 0; i < 200; ++i) alt.push_back(static_cast<uint8_t>(i % 2));
    CHECK(monobit_p_value(alt) == 1.0);
}

TEST_CASE("runs test reproduces the reference example and rejects oscillation") {
    CHECK(runs_p_value(parse_bits("1001101011")) ==
          doctest::Approx(0.14723225536366571).epsilon(1e-9));
    // strictly alternating sequences oscillate far too much
    std::vector<uint8_t> alt;
    for (int i = 0; i < 2048; ++i) alt.push_back(static_cast<uint8_t>(i % 2));
    CHECK(runs_p_value(alt) < 1e-12);
    // heavily biased sequences fail the prerequisite
    CHECK(runs_p_value(std::vector<uint8_t>(300, 1)) == 0.0);
}

TEST_CASE("randomness_check gates on length and passes fair coin flips") {
    BitSequence tiny;
    tiny.bits = parse_bits("1011010101");
    CHECK_THROWS_AS(randomness_check(tiny), std::invalid_argument);

    auto rng = make_rng(6);
    std::uniform_int_distribution<int> coin(0, 1);
    BitSequence fair;
    for (int i = 0; i < 4096; ++i) fair.bits.push_back(static_cast<uint8_t>(coin(rng)));
    const RandomnessReport rep = randomness_check(fair);
    CHECK(rep.frequency_pass);
    CHECK(rep.runs_pass);
}

TEST_CASE("bit packing is LSB-first within bytes") {
    const std::vector<uint8_t> bits = parse_bits("10110000" "11");
    const std::vector<uint8_t> bytes = pack_bits(bits);
    REQUIRE(bytes.size() == 2);
    CHECK(bytes[0] == 0b00001101);  // bits 0..7: 1,0,1,1,0,0,0,0
    CHECK(bytes[1] == 0b00000011);
}

TEST_CASE("reciprocity limit: vanishing noise and interference yields zero BDR") {
    auto rng = make_rng(7);
    const int m = 2;
    SystemConfig c = make_config(1, m, m, 1);
    PrecoderSet p;
    p.mats = {Eigen::MatrixXcd::Identity(m, m)};

    std::vector<Eigen::VectorXcd> y_rounds, z_rounds;
    const int rounds = 2500;  // 1e4 bits at 2m components per round
    for (int r = 0; r < rounds; ++r) {
        std::vector<std::vector<Eigen::VectorXcd>> h(1, std::vector<Eigen::VectorXcd>(1));
        h[0][0] = randn_complex(rng, m);
        const auto outcomes =
            probe_features(h, p, static_cast<uint64_t>(r), ProbeOptions{0.0});
        y_rounds.push_back(outcomes[0].y);
        z_rounds.push_back(outcomes[0].z);
    }
    const double ratio = bdr(quantize(y_rounds), quantize(z_rounds));
    CHECK(ratio < 1e-3);
}

TEST_CASE("component streams deinterleave the round-major order") {
    std::vector<Eigen::VectorXcd> rounds;
    auto rng = make_rng(8);
    for (int r = 0; r < 16; ++r) rounds.push_back(randn_complex(rng, 2));
    const BitSequence seq = quantize(rounds);
    const auto stream = seq.component_stream(1);
    REQUIRE(stream.size() == 16);
    for (int r = 0; r < 16; ++r) {
        CHECK(stream[static_cast<size_t>(r)] == seq.bits[static_cast<size_t>(r) * 4 + 1]);
    }
}

TEST_SUITE_END();

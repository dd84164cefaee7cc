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

#include "rispkg/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rispkg/key_pipeline.hpp"
#include "rispkg/linalg.hpp"

namespace rispkg {

namespace {

using nlohmann::json;

constexpr double kNatsToBits = 1.4426950408889634;  // 1/ln 2

double dbm_to_linear_gain(double value_dbm, double reference_dbm) {
    return std::pow(10.0, (value_dbm - reference_dbm) / 10.0);
}

uint64_t fnv1a(const std::vector<uint64_t>& values) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (uint64_t v : values) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (v >> (8 * byte)) & 0xffULL;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string hex16(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string format_double(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

Eigen::Vector3d parse_vec3(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 3) {
        throw config_error(std::string("geometry: ") + what + " must be [x, y, z]");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::vector<Eigen::Vector3d> parse_positions(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) {
        throw config_error(std::string("geometry: ") + what + " must be a nonempty array");
    }
    std::vector<Eigen::Vector3d> out;
    for (const auto& p : j) out.push_back(parse_vec3(p, what));
    return out;
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "proposed") return Scheme::proposed;
    if (s == "no_ris") return Scheme::no_ris;
    if (s == "rand_phase") return Scheme::rand_phase;
    throw config_error("unknown scheme '" + s + "' (expected proposed|no_ris|rand_phase)");
}

// seed stream tags
constexpr uint64_t kTagCov = 0xC0F;
constexpr uint64_t kTagPhase = 0xFA5E;
constexpr uint64_t kTagProbe = 0x9B0B;

}  // namespace

std::string to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::transmit_power_dbm: return "transmit_power_dbm";
        case SweepVariable::ris_elements: return "ris_elements";
        case SweepVariable::ris_x_m: return "ris_x_m";
        case SweepVariable::ut_x_m: return "ut_x_m";
    }
    return "?";
}

SweepVariable sweep_variable_from_string(const std::string& s) {
    if (s == "transmit_power_dbm") return SweepVariable::transmit_power_dbm;
    if (s == "ris_elements") return SweepVariable::ris_elements;
    if (s == "ris_x_m") return SweepVariable::ris_x_m;
    if (s == "ut_x_m") return SweepVariable::ut_x_m;
    throw config_error("unknown sweep variable '" + s + "'");
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::proposed: return "proposed";
        case Scheme::no_ris: return "no_ris";
        case Scheme::rand_phase: return "rand_phase";
    }
    return "?";
}

std::vector<std::string> preset_names() { return {"two-cell", "four-cell"}; }

ScenarioPreset preset(const std::string& name) {
    ScenarioPreset p;
    p.name = name;
    p.fading.alpha_bu = 3.75;
    p.fading.alpha_ris = 2.2;
    p.fading.rician_beta = 3.0;
    p.config.antennas = 4;
    p.config.rf_chains = 4;

    if (name == "two-cell") {
        // node coordinates as printed for this scenario; BS heights differ
        p.geometry.bs_positions = {{0, 0, 10}, {600, 0, 0}};
        p.geometry.ut_positions = {{280, 0, 0}, {320, 0, 0}};
        p.geometry.ris_positions = {{300, 0, 0}};
        p.config.cells = 2;
        p.config.ris_count = 1;
        p.config.ris_elements = 80;
    } else if (name == "four-cell") {
        p.geometry.bs_positions = {{0, 0, 30}, {600, 0, 30}, {600, 600, 30}, {0, 600, 30}};
        p.geometry.ut_positions = {
            {280, 0, 1.5}, {320, 0, 1.5}, {280, 600, 1.5}, {320, 600, 1.5}};
        p.geometry.ris_positions = {{300, 0, 10}, {300, 600, 10}};
        p.config.cells = 4;
        p.config.ris_count = 2;
        p.config.ris_elements = 60;
    } else {
        std::string names;
        for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
        throw config_error("unknown preset '" + name + "' (available: " + names + ")");
    }

    p.fading.zeta0 = std::pow(10.0, p.pathloss_ref_db / 10.0);
    p.fading.pilot_gain = dbm_to_linear_gain(p.ut_power_dbm, p.noise_power_dbm);
    p.config.power_budget = dbm_to_linear_gain(p.transmit_power_dbm, p.ut_power_dbm);
    return p;
}

ExperimentConfig ExperimentConfig::parse(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }

    static const std::set<std::string> known{
        "preset",      "geometry",      "sweep",          "antennas",       "rf_chains",
        "ris_elements", "ris_count",    "weights",        "transmit_power_dbm",
        "ut_power_dbm", "noise_power_dbm", "pathloss_ref_db", "rician_beta", "seed",
        "draws",       "cov_samples",   "probe_rounds",   "jobs",           "analytic_direct",
        "schemes",     "output",        "bits_output_dir", "optimizer"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (known.find(it.key()) == known.end()) {
            throw config_error("unknown config key '" + it.key() + "'");
        }
    }

    ExperimentConfig c;
    c.preset_name = j.value("preset", c.preset_name);
    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        ScenarioGeometry geom;
        geom.bs_positions = parse_positions(g.at("bs"), "bs");
        geom.ut_positions = parse_positions(g.at("ut"), "ut");
        geom.ris_positions = parse_positions(g.at("ris"), "ris");
        if (g.contains("bs_axis")) geom.bs_axis = parse_vec3(g["bs_axis"], "bs_axis").normalized();
        if (g.contains("ris_axis"))
            geom.ris_axis = parse_vec3(g["ris_axis"], "ris_axis").normalized();
        c.geometry_override = geom;
    }

    if (!j.contains("sweep")) throw config_error("config needs a 'sweep' object");
    const auto& sw = j["sweep"];
    if (!sw.is_object() || !sw.contains("variable") || !sw.contains("values")) {
        throw config_error("'sweep' must carry 'variable' and 'values'");
    }
    c.sweep = sweep_variable_from_string(sw["variable"].get<std::string>());
    for (const auto& v : sw["values"]) c.sweep_values.push_back(v.get<double>());

    c.antennas = j.value("antennas", c.antennas);
    c.rf_chains = j.value("rf_chains", c.rf_chains);
    c.ris_elements = j.value("ris_elements", c.ris_elements);
    c.ris_count = j.value("ris_count", c.ris_count);
    if (j.contains("weights")) {
        for (const auto& w : j["weights"]) c.weights.push_back(w.get<double>());
    }
    c.transmit_power_dbm = j.value("transmit_power_dbm", c.transmit_power_dbm);
    c.ut_power_dbm = j.value("ut_power_dbm", c.ut_power_dbm);
    c.noise_power_dbm = j.value("noise_power_dbm", c.noise_power_dbm);
    c.pathloss_ref_db = j.value("pathloss_ref_db", c.pathloss_ref_db);
    c.rician_beta = j.value("rician_beta", c.rician_beta);
    c.seed = j.value("seed", c.seed);
    c.draws = j.value("draws", c.draws);
    c.cov_samples = j.value("cov_samples", c.cov_samples);
    c.probe_rounds = j.value("probe_rounds", c.probe_rounds);
    c.jobs = j.value("jobs", c.jobs);
    c.analytic_direct = j.value("analytic_direct", c.analytic_direct);
    if (j.contains("schemes")) {
        c.schemes.clear();
        for (const auto& s : j["schemes"]) c.schemes.push_back(scheme_from_string(s.get<std::string>()));
    }
    c.output_path = j.value("output", c.output_path);
    c.bits_output_dir = j.value("bits_output_dir", c.bits_output_dir);

    if (j.contains("optimizer")) {
        const auto& o = j["optimizer"];
        c.ao.eps_outer = o.value("eps_outer", c.ao.eps_outer);
        c.ao.max_outer = o.value("max_outer", c.ao.max_outer);
        c.ao.phases_first = o.value("phases_first", c.ao.phases_first);
        c.ao.precoder.eps = o.value("eps_precoder", c.ao.precoder.eps);
        c.ao.precoder.max_iters = o.value("max_precoder_iters", c.ao.precoder.max_iters);
        c.ao.phase.eps = o.value("eps_phase", c.ao.phase.eps);
        c.ao.phase.max_iters = o.value("max_phase_iters", c.ao.phase.max_iters);
    }

    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void ExperimentConfig::validate() const {
    if (!geometry_override.has_value()) {
        preset(preset_name);  // throws for unknown names
    }
    if (sweep_values.empty()) throw config_error("sweep value list must be nonempty");
    std::set<double> uniq(sweep_values.begin(), sweep_values.end());
    if (uniq.size() != sweep_values.size()) {
        throw config_error("sweep values must be distinct");
    }
    if (sweep == SweepVariable::ris_elements) {
        for (double v : sweep_values) {
            if (v < 1.0 || v != std::floor(v)) {
                throw config_error("ris_elements sweep values must be integers >= 1");
            }
        }
    }
    if (rf_chains < 1 || rf_chains > antennas) {
        throw config_error("rf_chains must satisfy 1 <= M_e <= M");
    }
    if (ris_elements < 1) throw config_error("ris_elements must be >= 1");
    if (ris_count < 0) throw config_error("ris_count must be >= 0 (0 = preset default)");
    if (draws < 1) throw config_error("draws must be >= 1");
    if (cov_samples < 1) throw config_error("cov_samples must be >= 1");
    if (probe_rounds < 2) throw config_error("probe_rounds must be >= 2");
    if (jobs < 1) throw config_error("jobs must be >= 1");
    if (schemes.empty()) throw config_error("scheme list must be nonempty");
    for (double w : weights) {
        if (w < 0.0) throw config_error("weights must be nonnegative");
    }
    if (rician_beta < 0.0) throw config_error("rician_beta must be >= 0");
}

std::string ExperimentConfig::describe() const {
    std::ostringstream os;
    os << "preset:          " << (geometry_override ? "(explicit geometry)" : preset_name) << "\n"
       << "sweep:           " << to_string(sweep) << " over [";
    for (size_t i = 0; i < sweep_values.size(); ++i) {
        os << (i ? ", " : "") << sweep_values[i];
    }
    os << "]\n"
       << "antennas:        M=" << antennas << "  M_e=" << rf_chains << "\n"
       << "ris:             N=" << ris_elements << "  L=" << (ris_count ? std::to_string(ris_count) : std::string("preset")) << "\n"
       << "powers (dBm):    BS=" << transmit_power_dbm << "  UT=" << ut_power_dbm
       << "  noise=" << noise_power_dbm << "  zeta0(dB)=" << pathloss_ref_db << "\n"
       << "draws:           " << draws << " x " << cov_samples << " covariance samples\n"
       << "probe rounds:    " << probe_rounds << "\n"
       << "seed:            " << seed << "\n"
       << "schemes:         ";
    for (size_t i = 0; i < schemes.size(); ++i) os << (i ? ", " : "") << to_string(schemes[i]);
    os << "\n";
    return os.str();
}

namespace {

struct TaskSetup {
    ScenarioGeometry geometry;
    FadingParams fading;
    SystemConfig config;
};

// Applies the sweep value and the config's base parameters to the preset.
TaskSetup make_setup(const ExperimentConfig& cfg, double value) {
    ScenarioPreset base = cfg.geometry_override
                              ? ScenarioPreset{}
                              : preset(cfg.preset_name);
    TaskSetup s;
    s.geometry = cfg.geometry_override ? *cfg.geometry_override : base.geometry;

    s.config.cells = static_cast<int>(s.geometry.bs_positions.size());
    s.config.antennas = cfg.antennas;
    s.config.rf_chains = cfg.rf_chains;
    s.config.ris_elements = cfg.ris_elements;
    s.config.ris_count = cfg.ris_count > 0 ? cfg.ris_count
                                           : static_cast<int>(s.geometry.ris_positions.size());
    if (!cfg.weights.empty()) {
        s.config.weights =
            Eigen::Map<const Eigen::VectorXd>(cfg.weights.data(), static_cast<Eigen::Index>(cfg.weights.size()));
    }

    s.fading.alpha_bu = 3.75;
    s.fading.alpha_ris = 2.2;
    s.fading.rician_beta = cfg.rician_beta;
    s.fading.zeta0 = std::pow(10.0, cfg.pathloss_ref_db / 10.0);
    s.fading.pilot_gain = dbm_to_linear_gain(cfg.ut_power_dbm, cfg.noise_power_dbm);

    double transmit_dbm = cfg.transmit_power_dbm;
    switch (cfg.sweep) {
        case SweepVariable::transmit_power_dbm:
            transmit_dbm = value;
            break;
        case SweepVariable::ris_elements:
            s.config.ris_elements = static_cast<int>(value);
            break;
        case SweepVariable::ris_x_m:
            for (auto& r : s.geometry.ris_positions) r.x() = value;
            break;
        case SweepVariable::ut_x_m:
            for (size_t u = 0; u < s.geometry.ut_positions.size(); ++u) {
                s.geometry.ut_positions[u].x() = (u % 2 == 0) ? value : 600.0 - value;
            }
            break;
    }
    s.config.power_budget = dbm_to_linear_gain(transmit_dbm, cfg.ut_power_dbm);
    s.config.validate();
    s.geometry.validate(s.config);
    return s;
}

struct SchemeOutcome {
    double wskr_nats = 0.0;
    double ub_nats = 0.0;
    double bdr_mean = 0.0;
    int outer_iters = 0;
};

struct TaskResult {
    std::vector<SchemeOutcome> per_scheme;
};

// effective channels of one probing round, with the cascade removed for No-RIS
std::vector<std::vector<Eigen::VectorXcd>> effective_grid(const ChannelRealization& real,
                                                          const PhaseVector& v, bool zero_ris) {
    const int kc = real.cells;
    std::vector<std::vector<Eigen::VectorXcd>> h(
        static_cast<size_t>(kc), std::vector<Eigen::VectorXcd>(static_cast<size_t>(kc)));
    for (int i = 0; i < kc; ++i) {
        for (int j = 0; j < kc; ++j) {
            h[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                zero_ris ? real.h_d[static_cast<size_t>(i)][static_cast<size_t>(j)]
                         : effective_channel(real, i, j, v);
        }
    }
    return h;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();

    std::vector<double> values = cfg.sweep_values;
    std::sort(values.begin(), values.end());

    struct Task {
        int value_index;
        int draw;
    };
    std::vector<Task> tasks;
    for (int vi = 0; vi < static_cast<int>(values.size()); ++vi) {
        for (int d = 0; d < cfg.draws; ++d) tasks.push_back({vi, d});
    }

    std::vector<TaskResult> results(tasks.size());
    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto run_task = [&](const Task& task) {
        const double value = values[static_cast<size_t>(task.value_index)];
        const TaskSetup setup = make_setup(cfg, value);
        const uint64_t cov_seed = mix_seed(cfg.seed, kTagCov, static_cast<uint64_t>(task.draw));
        CovEstimationOptions cov_opts;
        cov_opts.analytic_direct = cfg.analytic_direct;
        const CovarianceSet covs = estimate_covariances(setup.geometry, setup.fading, setup.config,
                                                        cfg.cov_samples, cov_seed, cov_opts);

        // probing rounds are shared across schemes (paired comparison)
        std::vector<ChannelRealization> rounds;
        std::vector<uint64_t> round_seeds;
        rounds.reserve(static_cast<size_t>(cfg.probe_rounds));
        for (int r = 0; r < cfg.probe_rounds; ++r) {
            const uint64_t rseed = mix_seed(cfg.seed, kTagProbe, static_cast<uint64_t>(task.draw),
                                            static_cast<uint64_t>(r));
            rounds.push_back(sample_realization(setup.geometry, setup.fading, setup.config, rseed));
            round_seeds.push_back(rseed);
        }

        TaskResult tr;
        tr.per_scheme.resize(cfg.schemes.size());
        for (size_t si = 0; si < cfg.schemes.size(); ++si) {
            const Scheme scheme = cfg.schemes[si];
            AOResult ao;
            switch (scheme) {
                case Scheme::proposed:
                    ao = alternate(covs, setup.config, cfg.ao);
                    break;
                case Scheme::no_ris:
                    ao = baseline_no_ris(covs, setup.config, cfg.ao);
                    break;
                case Scheme::rand_phase:
                    ao = baseline_rand_phase(
                        covs, setup.config,
                        mix_seed(cfg.seed, kTagPhase, static_cast<uint64_t>(task.draw)), cfg.ao);
                    break;
            }

            const int kc = setup.config.cells;
            std::vector<std::vector<Eigen::VectorXcd>> y_rounds(static_cast<size_t>(kc));
            std::vector<std::vector<Eigen::VectorXcd>> z_rounds(static_cast<size_t>(kc));
            for (int r = 0; r < cfg.probe_rounds; ++r) {
                const auto h = effective_grid(rounds[static_cast<size_t>(r)], ao.phases,
                                              scheme == Scheme::no_ris);
                const auto outcomes =
                    probe_features(h, ao.precoders, mix_seed(round_seeds[static_cast<size_t>(r)], 0xF00DULL));
                for (int k = 0; k < kc; ++k) {
                    y_rounds[static_cast<size_t>(k)].push_back(outcomes[static_cast<size_t>(k)].y);
                    z_rounds[static_cast<size_t>(k)].push_back(outcomes[static_cast<size_t>(k)].z);
                }
            }
            double bdr_sum = 0.0;
            for (int k = 0; k < kc; ++k) {
                const BitSequence bits_ut = quantize(y_rounds[static_cast<size_t>(k)]);
                const BitSequence bits_bs = quantize(z_rounds[static_cast<size_t>(k)]);
                bdr_sum += bdr(bits_ut, bits_bs);
                if (!cfg.bits_output_dir.empty()) {
                    std::ostringstream stem;
                    stem << cfg.bits_output_dir << "/sweep" << value << "_"
                         << to_string(scheme) << "_draw" << task.draw << "_cell" << k;
                    write_bits_file(stem.str() + "_ut.bits", bits_ut.bits);
                    write_bits_file(stem.str() + "_bs.bits", bits_bs.bits);
                }
            }

            auto& out = tr.per_scheme[si];
            out.wskr_nats = ao.wskr;
            out.ub_nats = ao.wskr_upper;
            out.bdr_mean = bdr_sum / kc;
            out.outer_iters = ao.outer_iterations;
        }
        return tr;
    };

    auto worker = [&]() {
        for (;;) {
            const size_t t = next.fetch_add(1);
            if (t >= tasks.size()) return;
            try {
                results[t] = run_task(tasks[t]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int n_threads = std::min<int>(cfg.jobs, static_cast<int>(tasks.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<uint64_t> draw_seeds;
    for (int d = 0; d < cfg.draws; ++d) {
        draw_seeds.push_back(mix_seed(cfg.seed, kTagCov, static_cast<uint64_t>(d)));
    }
    const std::string seed_hash = hex16(fnv1a(draw_seeds));

    // aggregate means per (value, scheme)
    std::vector<ResultRow> rows;
    for (int vi = 0; vi < static_cast<int>(values.size()); ++vi) {
        for (size_t si = 0; si < cfg.schemes.size(); ++si) {
            ResultRow row;
            row.sweep_value = values[static_cast<size_t>(vi)];
            row.scheme = cfg.schemes[si];
            double w = 0, u = 0, b = 0, it = 0;
            for (size_t t = 0; t < tasks.size(); ++t) {
                if (tasks[t].value_index != vi) continue;
                const auto& o = results[t].per_scheme[si];
                w += o.wskr_nats;
                u += o.ub_nats;
                b += o.bdr_mean;
                it += o.outer_iters;
            }
            row.wskr_bits = kNatsToBits * w / cfg.draws;
            row.wskr_ub_bits = kNatsToBits * u / cfg.draws;
            row.bdr = b / cfg.draws;
            row.outer_iters = it / cfg.draws;
            row.seed_hash = seed_hash;

            if (row.wskr_bits > row.wskr_ub_bits + 1e-6) {
                throw numerical_error("result row violates wskr <= upper bound");
            }
            if (row.bdr < 0.0 || row.bdr > 1.0) {
                throw numerical_error("result row has BDR outside [0,1]");
            }
            rows.push_back(std::move(row));
        }
    }
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
        return to_string(a.scheme) < to_string(b.scheme);
    });

    ExperimentResult result;
    result.rows = rows;
    result.csv = to_csv(rows);
    if (!cfg.output_path.empty()) {
        std::ofstream out(cfg.output_path, std::ios::binary);
        if (!out) throw config_error("cannot write output file " + cfg.output_path);
        out << result.csv;
    }
    return result;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::string csv = "sweep_value,scheme,wskr_bits,wskr_ub_bits,bdr,outer_iters,seed_hash\n";
    for (const auto& r : rows) {
        csv += format_double(r.sweep_value, "%.10g");
        csv += ",";
        csv += to_string(r.scheme);
        csv += ",";
        csv += format_double(r.wskr_bits, "%.9g");
        csv += ",";
        csv += format_double(r.wskr_ub_bits, "%.9g");
        csv += ",";
        csv += format_double(r.bdr, "%.6f");
        csv += ",";
        csv += format_double(r.outer_iters, "%.4g");
        csv += ",";
        csv += r.seed_hash;
        csv += "\n";
    }
    return csv;
}

}  // namespace rispkg

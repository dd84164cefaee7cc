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

#include "rispkg/ao.hpp"

#include <chrono>

#include "rispkg/linalg.hpp"

namespace rispkg {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void check_covs_match(const CovarianceSet& covs, const SystemConfig& config) {
    if (covs.cells != config.cells || covs.antennas != config.antennas ||
        covs.phase_dim != config.phase_dim()) {
        throw std::invalid_argument("ao: covariance set dimensions do not match the config");
    }
}

void finalize(AOResult& result, const CovarianceSet& covs, const SystemConfig& config) {
    const Eigen::VectorXd w = config.effective_weights();
    result.wskr = wskr(w, kgr_exact(config, covs, result.precoders, result.phases));
    result.wskr_upper = wskr(w, kgr_upper_bound(config, covs, result.precoders, result.phases));
}

AOResult precoder_only(const CovarianceSet& covs, const SystemConfig& config,
                       const PhaseVector& phases, const AOOptions& options) {
    AOResult result;
    result.phases = phases;
    const auto t0 = clock_type::now();
    const PrecoderSubproblem sub = build_subproblem(covs, phases, config);
    const PrecoderOptResult opt =
        optimize_precoders(sub, config, PrecoderSet::scaled_identity(config), options.precoder);
    result.precoder_seconds = seconds_since(t0);
    result.precoders = opt.precoders;
    result.trace = {opt.trace.front(), opt.trace.back()};
    result.precoder_iterations = {opt.iterations};
    result.outer_iterations = 1;
    result.converged = opt.converged;
    result.inner_warning = !opt.converged;
    finalize(result, covs, config);
    return result;
}

}  // namespace

AOResult alternate(const CovarianceSet& covs, const SystemConfig& config,
                   const AOOptions& options) {
    config.validate();
    check_covs_match(covs, config);

    AOResult result;
    result.precoders = PrecoderSet::scaled_identity(config);
    result.phases = PhaseVector::ones(config.phase_dim());

    double prev =
        precoder_objective(result.precoders, build_subproblem(covs, result.phases, config));
    result.trace.push_back(prev);

    for (int outer = 0; outer < options.max_outer; ++outer) {
        double cur = prev;
        for (int stage = 0; stage < 2; ++stage) {
            const bool do_phases = (stage == 0) == options.phases_first;
            if (do_phases) {
                const auto t0 = clock_type::now();
                PhaseOptResult opt = optimize_phases(covs, result.precoders, config,
                                                     result.phases, options.phase);
                result.phase_seconds += seconds_since(t0);
                result.phases = opt.phases;
                result.phase_iterations.push_back(opt.iterations);
                result.inner_warning |= !opt.converged;
                cur = opt.trace.back();
            } else {
                const auto t0 = clock_type::now();
                const PrecoderSubproblem sub = build_subproblem(covs, result.phases, config);
                PrecoderOptResult opt =
                    optimize_precoders(sub, config, result.precoders, options.precoder);
                result.precoder_seconds += seconds_since(t0);
                result.precoders = opt.precoders;
                result.precoder_iterations.push_back(opt.iterations);
                result.inner_warning |= !opt.converged;
                cur = opt.trace.back();
            }
        }
        result.trace.push_back(cur);
        result.outer_iterations = outer + 1;
        if (std::abs(cur - prev) <= options.eps_outer * std::max(std::abs(prev), 1e-30)) {
            result.converged = true;
            break;
        }
        prev = cur;
    }
    finalize(result, covs, config);
    return result;
}

AOResult baseline_no_ris(const CovarianceSet& covs, const SystemConfig& config,
                         const AOOptions& options) {
    config.validate();
    check_covs_match(covs, config);
    const CovarianceSet zeroed = covs.with_zero_ris();
    return precoder_only(zeroed, config, PhaseVector::ones(config.phase_dim()), options);
}

AOResult baseline_rand_phase(const CovarianceSet& covs, const SystemConfig& config, uint64_t seed,
                             const AOOptions& options) {
    config.validate();
    check_covs_match(covs, config);
    return precoder_only(covs, config, PhaseVector::random(config.phase_dim(), seed), options);
}

}  // namespace rispkg

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

#ifndef RISPKG_AO_HPP
#define RISPKG_AO_HPP

#include <cstdint>

#include "rispkg/phase_opt.hpp"
#include "rispkg/precoder_opt.hpp"

namespace rispkg {

struct AOOptions {
    double eps_outer = 1e-4;  // relative change of the upper-bound objective
    int max_outer = 100;
    bool phases_first = false;  // default order: precoders, then phases
    PrecoderOptOptions precoder{1e-6, 300, 1e-8};
    PhaseOptOptions phase{1e-6, 500, 1.0, 0.5, 1e-4, 40};
};

struct AOResult {
    PrecoderSet precoders;
    PhaseVector phases;
    double wskr = 0.0;        // exact weighted sum key rate at the final iterates, nats
    double wskr_upper = 0.0;  // upper-bound objective at the final iterates, nats
    std::vector<double> trace;  // upper-bound objective per outer iteration (index 0 = initial)
    std::vector<int> precoder_iterations;
    std::vector<int> phase_iterations;
    double precoder_seconds = 0.0;
    double phase_seconds = 0.0;
    int outer_iterations = 0;
    bool converged = false;
    bool inner_warning = false;  // an inner solver hit its iteration cap
};

/// Alternating optimization of (P, v_bar) for the upper-bound objective.
/// Covariances are held fixed for the whole run (parameter-design phase).
AOResult alternate(const CovarianceSet& covs, const SystemConfig& config,
                   const AOOptions& options = {});

/// No-RIS baseline: cascade covariances zeroed, precoders optimized only.
AOResult baseline_no_ris(const CovarianceSet& covs, const SystemConfig& config,
                         const AOOptions& options = {});

/// RandPhase baseline: one seeded uniform-phase draw, precoders optimized only.
AOResult baseline_rand_phase(const CovarianceSet& covs, const SystemConfig& config, uint64_t seed,
                             const AOOptions& options = {});

}  // namespace rispkg

#endif

/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Copyright (c) 2026 cfmimo project
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <vector>

#include "cfm/dstbc.hpp"
#include "cfm/metrics.hpp"
#include "cfm/topology.hpp"

namespace cfm {

struct RunOptions {
    /// Absolute index of the first setup. Setup indices key the RNG
    /// substreams, so running setups [s, s+n) in isolation reproduces the
    /// same rows a longer run produces for them.
    int setup_first = 0;
    /// Worker threads over setups; the reduction is order-independent.
    int threads = 1;
};

struct SetupOutcome {
    std::vector<TrialMetrics> rows;
    double max_ap_power_W_distributed = 0.0;
    double max_ap_power_W_dstbc = 0.0;
    std::uint64_t regularized_blocks = 0;
    int placement_retries = 0;
};

/// Geometry, fading, clustering and pilots for one setup. AP placement gets
/// up to 3 attempts on fresh substreams; the final failure propagates as
/// PlacementFailure.
NetworkRealization realize_network(const SystemConfig& cfg, const DerivedConstants& dc,
                                   int setup_id, int* placement_retries);

/// One setup end to end: channels and unit precoders per block, power
/// allocation (distributed per block, centralized from setup means), then the
/// link simulations for every enabled (mode, precoder) pair over shared
/// symbol/noise draws. `cb` may be null when DSTBC is not among the modes.
SetupOutcome run_setup(const SystemConfig& cfg, const DerivedConstants& dc, int setup_id,
                       const SpaceTimeCodebook* cb);

AggregateReport run_monte_carlo(const SystemConfig& cfg, const RunOptions& opt = {});

} // namespace cfm

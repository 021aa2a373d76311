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
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cfm/config.hpp"

namespace cfm {

/// One (setup, UE, mode, precoder) result row.
struct TrialMetrics {
    int setup_id = 0;
    int ue_id = 0;
    Mode mode = Mode::pcal;
    Precoder precoder = Precoder::zisi;
    std::uint64_t bits_total = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    double se = 0.0; // bits/s/Hz
};

struct AggregateReport {
    SystemConfig cfg;
    DerivedConstants derived;
    std::vector<TrialMetrics> rows; // setup-major, then mode, precoder, UE

    // Run metadata. The distributed power figure is the max over setups and
    // APs of the block-averaged expected per-epoch radiated power under
    // ZISI + distributed allocation; the dstbc figure is the on-air average
    // of the same precoders during DSTBC intervals (equal by construction:
    // sqrt(L_k)-scaled unitary rows spend one power unit per stream-epoch).
    double max_ap_power_W_distributed = 0.0;
    double max_ap_power_W_dstbc = 0.0;
    std::uint64_t regularized_blocks = 0;
    int placement_retries = 0;
};

/// SE_k = P_f * log2(M_o) * (1 - ber).
double se_from_ber(double ber, double P_f, int M_o);

/// Pre-log factor of a transmission mode given the derived constants.
double prelog_for(Mode m, const DerivedConstants& dc);

/// Sorted (value, fraction) pairs with fraction (i+1)/n at the i-th sorted
/// value. Throws std::invalid_argument on empty input.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

double median(std::vector<double> values);

void write_results_csv(const AggregateReport& r, std::ostream& out);
void write_results_json(const AggregateReport& r, std::ostream& out);

/// format is "csv" or "json"; throws std::runtime_error on I/O failure or an
/// unknown format.
void write_results(const AggregateReport& r, const std::string& path, const std::string& format);

} // namespace cfm

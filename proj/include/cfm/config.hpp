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
#include <string>

namespace cfm {

enum class Mode { pcal, uncal, dstbc, all };
enum class Precoder { zisi, pmmse, all };

std::string to_string(Mode m);
std::string to_string(Precoder p);
Mode parse_mode(const std::string& s);
Precoder parse_precoder(const std::string& s);

// All scenario parameters. Field names double as the config-file keys
// (one `key = value` per line, `#` comments). Defaults are the baseline
// urban deployment: 40 APs x 8 antennas serving 20 two-antenna UEs.
struct SystemConfig {
    int L = 40;              // number of APs
    int K = 20;              // number of UEs
    int N_AP = 8;            // antennas per AP
    int N_UE = 2;            // antennas per UE
    int N_s = 2;             // parallel data streams per UE
    int L_k = 2;             // serving-cluster size (= codeword span)
    double area_side_m = 500.0;
    int tau_c = 200;         // coherence block, samples
    int tau_p = 16;          // pilot samples
    int tau_d = 184;         // data samples
    double p_ue_total_mW = 100.0;
    double p_ap_total_mW = 200.0; // per-AP budget rho_max
    double carrier_GHz = 3.5;
    double bandwidth_MHz = 20.0;
    double noise_figure_dB = 8.0;
    double shadow_sigma_dB = 4.0;
    double h_ap_m = 11.65;
    double h_ue_m = 1.65;
    int M_o = 8;             // PSK order
    Mode mode = Mode::all;
    Precoder precoder = Precoder::all;
    double varsigma = 0.2;   // centralized power-allocation exponents
    double kappa = 0.5;
    std::uint64_t seed = 1;
    int n_setups = 200;
    int n_blocks_per_setup = 100;

    // Extensions (all default-off; see README):
    int perfect_csi = 0;              // channel estimates equal the true channels
    int noiseless = 0;                // zero receiver noise (pilot and data)
    int redraw_offsets_per_block = 0; // redraw UE offsets per block instead of per setup
    double pl_intercept_dB = -30.5;   // UMi path-loss constants (configurable)
    double pl_slope_dB = 36.7;

    double rho_max_W() const { return p_ap_total_mW * 1e-3; }
    double p_ue_W() const { return p_ue_total_mW * 1e-3; }
    // equal power split per UE antenna; also the uplink per-antenna power eta
    double pilot_power_W() const { return p_ue_W() / N_UE; }
};

struct DerivedConstants {
    double noise_power_W; // receiver noise variance per antenna per sample
    double d_min_m;       // hard-core AP spacing sqrt(A/L)
    int G;                // codeword intervals per coherence block
    int n_s;              // symbols per codeword (2 for L_k=2, 3 for L_k=4)
    int N_b;              // antennas per stream group
    double P_f_coherent;
    double P_f_dstbc;
};

// Parses the documented key-value format; unspecified keys keep defaults.
// Throws std::runtime_error on missing file or malformed syntax and
// std::invalid_argument (with the key name) on invariant violations.
SystemConfig load_config(const std::string& path);

// Sets one field by key name; value parsed per the field type.
void apply_override(SystemConfig& cfg, const std::string& key, const std::string& value);

// Checks all invariants; throws std::invalid_argument naming the offending key.
void validate(const SystemConfig& cfg);

DerivedConstants derive_constants(const SystemConfig& cfg);

} // namespace cfm

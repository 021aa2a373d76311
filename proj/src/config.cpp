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

#include "cfm/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace cfm {

std::string to_string(Mode m)
{
    switch (m) {
    case Mode::pcal: return "pcal";
    case Mode::uncal: return "uncal";
    case Mode::dstbc: return "dstbc";
    case Mode::all: return "all";
    }
    return "?";
}

std::string to_string(Precoder p)
{
    switch (p) {
    case Precoder::zisi: return "zisi";
    case Precoder::pmmse: return "pmmse";
    case Precoder::all: return "all";
    }
    return "?";
}

Mode parse_mode(const std::string& s)
{
    if (s == "pcal") return Mode::pcal;
    if (s == "uncal") return Mode::uncal;
    if (s == "dstbc") return Mode::dstbc;
    if (s == "all") return Mode::all;
    throw std::invalid_argument("mode: expected pcal|uncal|dstbc|all, got '" + s + "'");
}

Precoder parse_precoder(const std::string& s)
{
    if (s == "zisi") return Precoder::zisi;
    if (s == "pmmse") return Precoder::pmmse;
    if (s == "all") return Precoder::all;
    throw std::invalid_argument("precoder: expected zisi|pmmse|all, got '" + s + "'");
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

long long parse_int(const std::string& key, const std::string& v)
{
    std::size_t pos = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': expected integer, got '" + v + "'");
    }
    if (pos != v.size())
        throw std::runtime_error("config key '" + key + "': trailing characters in '" + v + "'");
    return x;
}

double parse_real(const std::string& key, const std::string& v)
{
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': expected number, got '" + v + "'");
    }
    if (pos != v.size())
        throw std::runtime_error("config key '" + key + "': trailing characters in '" + v + "'");
    return x;
}

} // namespace

void apply_override(SystemConfig& cfg, const std::string& key, const std::string& value)
{
    const std::string v = trim(value);
    if (key == "L") cfg.L = static_cast<int>(parse_int(key, v));
    else if (key == "K") cfg.K = static_cast<int>(parse_int(key, v));
    else if (key == "N_AP") cfg.N_AP = static_cast<int>(parse_int(key, v));
    else if (key == "N_UE") cfg.N_UE = static_cast<int>(parse_int(key, v));
    else if (key == "N_s") cfg.N_s = static_cast<int>(parse_int(key, v));
    else if (key == "L_k") cfg.L_k = static_cast<int>(parse_int(key, v));
    else if (key == "area_side_m") cfg.area_side_m = parse_real(key, v);
    else if (key == "tau_c") cfg.tau_c = static_cast<int>(parse_int(key, v));
    else if (key == "tau_p") cfg.tau_p = static_cast<int>(parse_int(key, v));
    else if (key == "tau_d") cfg.tau_d = static_cast<int>(parse_int(key, v));
    else if (key == "p_ue_total_mW") cfg.p_ue_total_mW = parse_real(key, v);
    else if (key == "p_ap_total_mW") cfg.p_ap_total_mW = parse_real(key, v);
    else if (key == "carrier_GHz") cfg.carrier_GHz = parse_real(key, v);
    else if (key == "bandwidth_MHz") cfg.bandwidth_MHz = parse_real(key, v);
    else if (key == "noise_figure_dB") cfg.noise_figure_dB = parse_real(key, v);
    else if (key == "shadow_sigma_dB") cfg.shadow_sigma_dB = parse_real(key, v);
    else if (key == "h_ap_m") cfg.h_ap_m = parse_real(key, v);
    else if (key == "h_ue_m") cfg.h_ue_m = parse_real(key, v);
    else if (key == "M_o") cfg.M_o = static_cast<int>(parse_int(key, v));
    else if (key == "mode") cfg.mode = parse_mode(v);
    else if (key == "precoder") cfg.precoder = parse_precoder(v);
    else if (key == "varsigma") cfg.varsigma = parse_real(key, v);
    else if (key == "kappa") cfg.kappa = parse_real(key, v);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "n_setups") cfg.n_setups = static_cast<int>(parse_int(key, v));
    else if (key == "n_blocks_per_setup") cfg.n_blocks_per_setup = static_cast<int>(parse_int(key, v));
    else if (key == "perfect_csi") cfg.perfect_csi = static_cast<int>(parse_int(key, v));
    else if (key == "noiseless") cfg.noiseless = static_cast<int>(parse_int(key, v));
    else if (key == "redraw_offsets_per_block")
        cfg.redraw_offsets_per_block = static_cast<int>(parse_int(key, v));
    else if (key == "pl_intercept_dB") cfg.pl_intercept_dB = parse_real(key, v);
    else if (key == "pl_slope_dB") cfg.pl_slope_dB = parse_real(key, v);
    else throw std::runtime_error("unknown config key '" + key + "'");
}

SystemConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    SystemConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key or value");
        apply_override(cfg, key, val);
    }
    validate(cfg);
    return cfg;
}

void validate(const SystemConfig& cfg)
{
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };

    if (cfg.L < 1) fail("L must be >= 1");
    if (cfg.K < 0) fail("K must be >= 0");
    if (cfg.N_AP < 1) fail("N_AP must be >= 1");
    if (cfg.N_UE < 1) fail("N_UE must be >= 1");
    if (cfg.N_s < 1) fail("N_s must be >= 1");
    if (cfg.area_side_m <= 0) fail("area_side_m must be > 0");
    if (cfg.tau_p + cfg.tau_d != cfg.tau_c) fail("tau_p + tau_d must equal tau_c");
    if (cfg.N_UE % cfg.N_s != 0) fail("N_UE not divisible by N_s");
    if (cfg.tau_p % cfg.N_UE != 0) fail("tau_p not divisible by N_UE");
    if (cfg.L_k > cfg.L) fail("L_k must be <= L");
    if (cfg.N_s > cfg.N_UE) fail("N_s must be <= N_UE");
    if (cfg.L_k != 2 && cfg.L_k != 4) fail("L_k must be 2 or 4 (the two orthogonal designs provided)");
    if (cfg.M_o < 2 || (cfg.M_o & (cfg.M_o - 1)) != 0) fail("M_o must be a power of two");
    if (cfg.N_AP < cfg.N_UE) fail("N_AP must be >= N_UE (precoder needs full column rank)");
    if (cfg.p_ue_total_mW <= 0) fail("p_ue_total_mW must be > 0");
    if (cfg.p_ap_total_mW <= 0) fail("p_ap_total_mW must be > 0");
    if (cfg.bandwidth_MHz <= 0) fail("bandwidth_MHz must be > 0");
    if (cfg.shadow_sigma_dB < 0) fail("shadow_sigma_dB must be >= 0");
    if (cfg.varsigma < 0 || cfg.varsigma > 1) fail("varsigma must be in [0, 1]");
    if (cfg.kappa < 0 || cfg.kappa > 1) fail("kappa must be in [0, 1]");
    if (cfg.n_setups < 1) fail("n_setups must be >= 1");
    if (cfg.n_blocks_per_setup < 1) fail("n_blocks_per_setup must be >= 1");
    if (cfg.tau_d / cfg.L_k < 2) fail("tau_d too short: need at least two codeword intervals");
}

DerivedConstants derive_constants(const SystemConfig& cfg)
{
    DerivedConstants dc{};
    const double bw_Hz = cfg.bandwidth_MHz * 1e6;
    const double noise_dBm = -174.0 + 10.0 * std::log10(bw_Hz) + cfg.noise_figure_dB;
    dc.noise_power_W = cfg.noiseless ? 0.0 : std::pow(10.0, (noise_dBm - 30.0) / 10.0);
    dc.d_min_m = std::sqrt(cfg.area_side_m * cfg.area_side_m / cfg.L);
    dc.G = cfg.tau_d / cfg.L_k;
    dc.n_s = (cfg.L_k == 2) ? 2 : 3;
    dc.N_b = cfg.N_UE / cfg.N_s;
    dc.P_f_coherent = static_cast<double>(cfg.tau_d) / cfg.tau_c;
    dc.P_f_dstbc = static_cast<double>((dc.G - 1) * dc.n_s) / cfg.tau_c;
    return dc;
}

} // namespace cfm

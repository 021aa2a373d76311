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

#include "cfm/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "cfm/psk.hpp"

namespace cfm {

namespace {

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

double se_from_ber(double ber, double P_f, int M_o)
{
    return P_f * log2_int(M_o) * (1.0 - ber);
}

double prelog_for(Mode m, const DerivedConstants& dc)
{
    return m == Mode::dstbc ? dc.P_f_dstbc : dc.P_f_coherent;
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values)
{
    if (values.empty()) throw std::invalid_argument("empirical_cdf: empty input");
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>> cdf(values.size());
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        cdf[i] = {values[i], static_cast<double>(i + 1) / n};
    return cdf;
}

double median(std::vector<double> values)
{
    if (values.empty()) throw std::invalid_argument("median: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void write_results_csv(const AggregateReport& r, std::ostream& out)
{
    out << "setup_id,ue_id,mode,precoder,ber,se\n";
    for (const TrialMetrics& t : r.rows)
        out << t.setup_id << ',' << t.ue_id << ',' << to_string(t.mode) << ','
            << to_string(t.precoder) << ',' << fmt_double(t.ber) << ',' << fmt_double(t.se)
            << '\n';
}

void write_results_json(const AggregateReport& r, std::ostream& out)
{
    using json = nlohmann::ordered_json;
    const SystemConfig& c = r.cfg;

    json cfg{
        {"L", c.L}, {"K", c.K}, {"N_AP", c.N_AP}, {"N_UE", c.N_UE}, {"N_s", c.N_s},
        {"L_k", c.L_k}, {"area_side_m", c.area_side_m}, {"tau_c", c.tau_c}, {"tau_p", c.tau_p},
        {"tau_d", c.tau_d}, {"p_ue_total_mW", c.p_ue_total_mW}, {"p_ap_total_mW", c.p_ap_total_mW},
        {"carrier_GHz", c.carrier_GHz}, {"bandwidth_MHz", c.bandwidth_MHz},
        {"noise_figure_dB", c.noise_figure_dB}, {"shadow_sigma_dB", c.shadow_sigma_dB},
        {"h_ap_m", c.h_ap_m}, {"h_ue_m", c.h_ue_m}, {"M_o", c.M_o},
        {"mode", to_string(c.mode)}, {"precoder", to_string(c.precoder)},
        {"varsigma", c.varsigma}, {"kappa", c.kappa}, {"seed", c.seed},
        {"n_setups", c.n_setups}, {"n_blocks_per_setup", c.n_blocks_per_setup},
        {"perfect_csi", c.perfect_csi}, {"noiseless", c.noiseless},
        {"redraw_offsets_per_block", c.redraw_offsets_per_block},
        {"pl_intercept_dB", c.pl_intercept_dB}, {"pl_slope_dB", c.pl_slope_dB},
    };

    json derived{
        {"noise_power_W", r.derived.noise_power_W},
        {"d_min_m", r.derived.d_min_m},
        {"G", r.derived.G},
        {"n_s", r.derived.n_s},
        {"N_b", r.derived.N_b},
        {"P_f_coherent", r.derived.P_f_coherent},
        {"P_f_dstbc", r.derived.P_f_dstbc},
    };

    json meta{
        {"max_ap_power_W_distributed", r.max_ap_power_W_distributed},
        {"max_ap_power_W_dstbc", r.max_ap_power_W_dstbc},
        {"regularized_blocks", r.regularized_blocks},
        {"placement_retries", r.placement_retries},
    };

    json rows = json::array();
    for (const TrialMetrics& t : r.rows)
        rows.push_back(json{
            {"setup_id", t.setup_id},
            {"ue_id", t.ue_id},
            {"mode", to_string(t.mode)},
            {"precoder", to_string(t.precoder)},
            {"bits_total", t.bits_total},
            {"bit_errors", t.bit_errors},
            {"ber", t.ber},
            {"se", t.se},
        });

    json root{{"config", cfg}, {"derived", derived}, {"meta", meta}, {"results", rows}};
    out << root.dump(2) << '\n';
}

void write_results(const AggregateReport& r, const std::string& path, const std::string& format)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    if (format == "csv")
        write_results_csv(r, out);
    else if (format == "json")
        write_results_json(r, out);
    else
        throw std::runtime_error("unknown output format: " + format);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace cfm

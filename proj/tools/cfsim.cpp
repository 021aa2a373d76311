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

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfm/config.hpp"
#include "cfm/metrics.hpp"
#include "cfm/monte_carlo.hpp"
#include "cfm/topology.hpp"

namespace {

// "res.csv" + key/value -> "res.K-10.csv"; no extension -> "res.K-10"
std::string sweep_path(const std::string& base, const std::string& key, const std::string& value)
{
    const std::string tag = "." + key + "-" + value;
    const std::size_t slash = base.find_last_of('/');
    const std::size_t dot = base.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return base + tag;
    return base.substr(0, dot) + tag + base.substr(dot);
}

void apply_assignment(cfm::SystemConfig& cfg, const std::string& kv)
{
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
        throw std::runtime_error("expected key=value, got: " + kv);
    cfm::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"cfsim — cell-free massive MIMO downlink simulator (coherent and "
                 "differential space-time transmission)"};

    std::string config_path, output, format = "csv", mode, precoder, sweep, dump_geometry;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    int setups = 0, blocks = 0, setup_first = 0, threads = 1;

    app.add_option("--config", config_path, "config file, one `key = value` per line")
        ->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "master RNG seed");
    auto* setups_opt = app.add_option("--setups", setups, "number of Monte Carlo setups");
    auto* blocks_opt = app.add_option("--blocks", blocks, "coherence blocks per setup");
    app.add_option("--mode", mode, "pcal|uncal|dstbc|all");
    app.add_option("--precoder", precoder, "zisi|pmmse|all");
    app.add_option("--output", output, "result file (stdout when omitted)");
    app.add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--sweep", sweep,
                   "key=v1,v2,... — run the grid over one config key; writes one "
                   "output file per value (requires --output)");
    app.add_option("--set", sets, "override one config key (repeatable)");
    app.add_option("--setup-first", setup_first,
                   "absolute index of the first setup (setup ids key the RNG)");
    app.add_option("--threads", threads, "worker threads over setups")
        ->check(CLI::PositiveNumber);
    app.add_option("--dump-geometry", dump_geometry,
                   "write AP/UE positions of the first setup to this CSV, then run");

    CLI11_PARSE(app, argc, argv);

    try {
        cfm::SystemConfig cfg =
            config_path.empty() ? cfm::SystemConfig{} : cfm::load_config(config_path);
        for (const std::string& kv : sets) apply_assignment(cfg, kv);
        if (seed_opt->count()) cfg.seed = seed;
        if (setups_opt->count()) cfg.n_setups = setups;
        if (blocks_opt->count()) cfg.n_blocks_per_setup = blocks;
        if (!mode.empty()) cfg.mode = cfm::parse_mode(mode);
        if (!precoder.empty()) cfg.precoder = cfm::parse_precoder(precoder);
        cfm::validate(cfg);

        cfm::RunOptions opt;
        opt.setup_first = setup_first;
        opt.threads = threads;

        if (!dump_geometry.empty()) {
            const cfm::DerivedConstants dcs = cfm::derive_constants(cfg);
            int retries = 0;
            const cfm::NetworkRealization net =
                cfm::realize_network(cfg, dcs, setup_first, &retries);
            std::ofstream g(dump_geometry, std::ios::binary);
            if (!g) throw std::runtime_error("cannot open geometry file: " + dump_geometry);
            cfm::dump_geometry_csv(net, g);
        }

        auto run_one = [&](const cfm::SystemConfig& c, const std::string& path) {
            const cfm::AggregateReport rep = cfm::run_monte_carlo(c, opt);
            if (path.empty()) {
                if (format == "csv")
                    cfm::write_results_csv(rep, std::cout);
                else
                    cfm::write_results_json(rep, std::cout);
            } else {
                cfm::write_results(rep, path, format);
            }
        };

        if (sweep.empty()) {
            run_one(cfg, output);
        } else {
            if (output.empty())
                throw std::runtime_error("--sweep requires --output (one file per value)");
            const std::size_t eq = sweep.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("--sweep expects key=v1,v2,...");
            const std::string key = sweep.substr(0, eq);
            std::string rest = sweep.substr(eq + 1);
            if (rest.empty()) throw std::runtime_error("--sweep has no values");
            std::vector<std::string> values;
            for (std::size_t pos = 0; pos <= rest.size();) {
                const std::size_t comma = rest.find(',', pos);
                const std::size_t end = comma == std::string::npos ? rest.size() : comma;
                values.push_back(rest.substr(pos, end - pos));
                pos = end + 1;
                if (comma == std::string::npos) break;
            }
            for (const std::string& v : values) {
                cfm::SystemConfig c = cfg;
                cfm::apply_override(c, key, v);
                cfm::validate(c);
                run_one(c, sweep_path(output, key, v));
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

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

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cfm/config.hpp"
#include "cfm/rng.hpp"

namespace cfm {

struct Vec2 {
    double x;
    double y;
};

// Geometry, large-scale fading, AP clustering and pilot assignment for one
// Monte Carlo setup. cluster[k] lists the serving APs of UE k ordered by
// descending beta; the row index m(l,k) of AP l is its 1-based position in
// that list.
struct NetworkRealization {
    std::vector<Vec2> ap_pos;              // L
    std::vector<Vec2> ue_pos;              // K
    Eigen::MatrixXd beta;                  // K x L, linear scale
    std::vector<std::vector<int>> cluster; // per UE: L_k AP indices, strongest first
    std::vector<int> pilot_group;          // per UE, in [0, tau_p/N_UE)

    bool serves(int k, int l) const
    {
        for (int ap : cluster[k])
            if (ap == l) return true;
        return false;
    }
    // 1-based codeword row index of AP l for UE k; 0 if l does not serve k
    int row_index(int k, int l) const
    {
        for (std::size_t p = 0; p < cluster[k].size(); ++p)
            if (cluster[k][p] == l) return static_cast<int>(p) + 1;
        return 0;
    }
};

struct PlacementFailure : std::runtime_error {
    long draws;
    int placed;
    PlacementFailure(long d, int p, int want)
        : std::runtime_error("AP placement failed: " + std::to_string(p) + "/" +
                             std::to_string(want) + " points after " + std::to_string(d) +
                             " draws"),
          draws(d), placed(p)
    {}
};

// Hard-core placement: uniform darts accepted only if >= d_min from all
// accepted points. At d_min = sqrt(A/L) plain dart throwing jams below L, so
// after a run of consecutive rejections a candidate blocked by exactly one
// point replaces it (the accepted count never decreases and the pairwise
// distance bound holds at every step). Throws PlacementFailure after 10^6
// draws; retrying with a fresh substream is the caller's job.
std::vector<Vec2> place_aps_hcpp(Rng& rng, int L, double area_side_m, double d_min);

std::vector<Vec2> place_ues_uniform(Rng& rng, int K, double area_side_m);

// beta_{k,l}[dB] = pl_intercept - pl_slope*log10(d3D) + F, F ~ N(0, shadow^2),
// with d3D including the AP/UE height difference. Returns linear scale.
Eigen::MatrixXd large_scale_fading(Rng& rng, const std::vector<Vec2>& ap_pos,
                                   const std::vector<Vec2>& ue_pos, const SystemConfig& cfg);

// Per UE: the L_k strongest APs (ties to the lowest AP index), ordered by
// descending beta. Throws std::invalid_argument if L_k > L.
std::vector<std::vector<int>> cluster_aps(const Eigen::MatrixXd& beta, int L_k);

// Greedy pilot-group assignment: UEs visited in random order; the first
// tau_p/N_UE get distinct groups; the rest join the group with the least
// accumulated gain at their strongest serving AP.
std::vector<int> assign_pilots(Rng& rng, const Eigen::MatrixXd& beta,
                               const std::vector<std::vector<int>>& cluster, int tau_p, int N_UE);

void dump_geometry_csv(const NetworkRealization& net, std::ostream& out);

} // namespace cfm

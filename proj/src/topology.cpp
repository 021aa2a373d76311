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

#include "cfm/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace cfm {

std::vector<Vec2> place_aps_hcpp(Rng& rng, int L, double area_side_m, double d_min)
{
    constexpr long kMaxDraws = 1000000;
    constexpr int kStall = 8; // rejections before a single-blocker swap is allowed

    std::vector<Vec2> pts;
    pts.reserve(L);
    const double d2 = d_min * d_min;
    long draws = 0;
    int consec_rejects = 0;
    while (static_cast<int>(pts.size()) < L) {
        if (draws >= kMaxDraws) throw PlacementFailure(draws, static_cast<int>(pts.size()), L);
        const Vec2 c{rng.uniform() * area_side_m, rng.uniform() * area_side_m};
        ++draws;
        int blocker = -1;
        int n_block = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double dx = pts[i].x - c.x;
            const double dy = pts[i].y - c.y;
            if (dx * dx + dy * dy < d2) {
                ++n_block;
                blocker = static_cast<int>(i);
                if (n_block > 1) break;
            }
        }
        if (n_block == 0) {
            pts.push_back(c);
            consec_rejects = 0;
            continue;
        }
        ++consec_rejects;
        if (n_block == 1 && consec_rejects >= kStall) {
            pts[blocker] = c; // swap: count unchanged, d_min invariant intact
            consec_rejects = 0;
        }
    }
    return pts;
}

std::vector<Vec2> place_ues_uniform(Rng& rng, int K, double area_side_m)
{
    std::vector<Vec2> pts;
    pts.reserve(K);
    for (int k = 0; k < K; ++k) {
        const double x = rng.uniform() * area_side_m;
        const double y = rng.uniform() * area_side_m;
        pts.push_back({x, y});
    }
    return pts;
}

Eigen::MatrixXd large_scale_fading(Rng& rng, const std::vector<Vec2>& ap_pos,
                                   const std::vector<Vec2>& ue_pos, const SystemConfig& cfg)
{
    const int K = static_cast<int>(ue_pos.size());
    const int L = static_cast<int>(ap_pos.size());
    const double dh = cfg.h_ap_m - cfg.h_ue_m;
    Eigen::MatrixXd beta(K, L);
    for (int k = 0; k < K; ++k) {
        for (int l = 0; l < L; ++l) {
            const double dx = ap_pos[l].x - ue_pos[k].x;
            const double dy = ap_pos[l].y - ue_pos[k].y;
            const double d3 = std::sqrt(dx * dx + dy * dy + dh * dh);
            const double shadow = cfg.shadow_sigma_dB * rng.normal();
            const double beta_dB = cfg.pl_intercept_dB - cfg.pl_slope_dB * std::log10(d3) + shadow;
            beta(k, l) = std::pow(10.0, beta_dB / 10.0);
        }
    }
    return beta;
}

std::vector<std::vector<int>> cluster_aps(const Eigen::MatrixXd& beta, int L_k)
{
    const int K = static_cast<int>(beta.rows());
    const int L = static_cast<int>(beta.cols());
    if (L_k > L) throw std::invalid_argument("cluster_aps: L_k exceeds the number of APs");

    std::vector<std::vector<int>> cluster(K);
    std::vector<int> order(L);
    for (int k = 0; k < K; ++k) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return beta(k, a) > beta(k, b); // stable: equal gains keep the lower index first
        });
        cluster[k].assign(order.begin(), order.begin() + L_k);
    }
    return cluster;
}

std::vector<int> assign_pilots(Rng& rng, const Eigen::MatrixXd& beta,
                               const std::vector<std::vector<int>>& cluster, int tau_p, int N_UE)
{
    const int K = static_cast<int>(beta.rows());
    const int n_groups = tau_p / N_UE;

    // random visiting order (Fisher-Yates)
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    for (int i = K - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[i], order[j]);
    }

    std::vector<int> group(K, -1);
    std::vector<std::vector<int>> members(n_groups);
    for (int pos = 0; pos < K; ++pos) {
        const int k = order[pos];
        if (pos < n_groups) {
            group[k] = pos;
        } else {
            const int l_star = cluster[k][0]; // strongest serving AP
            int best = 0;
            double best_sum = std::numeric_limits<double>::infinity();
            for (int g = 0; g < n_groups; ++g) {
                double s = 0.0;
                for (int i : members[g]) s += beta(i, l_star);
                if (s < best_sum) { // strict '<': ties keep the lowest group index
                    best_sum = s;
                    best = g;
                }
            }
            group[k] = best;
        }
        members[group[k]].push_back(k);
    }
    return group;
}

void dump_geometry_csv(const NetworkRealization& net, std::ostream& out)
{
    out << "entity,id,x_m,y_m\n";
    char buf[128];
    for (std::size_t l = 0; l < net.ap_pos.size(); ++l) {
        std::snprintf(buf, sizeof buf, "ap,%zu,%.12g,%.12g\n", l, net.ap_pos[l].x, net.ap_pos[l].y);
        out << buf;
    }
    for (std::size_t k = 0; k < net.ue_pos.size(); ++k) {
        std::snprintf(buf, sizeof buf, "ue,%zu,%.12g,%.12g\n", k, net.ue_pos[k].x, net.ue_pos[k].y);
        out << buf;
    }
}

} // namespace cfm

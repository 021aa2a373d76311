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

#include "cfm/channel.hpp"

#include <cmath>
#include <numbers>

namespace cfm {

std::vector<Eigen::MatrixXcd> draw_small_scale(Rng& rng, int K, int L, int N_AP, int N_UE)
{
    std::vector<Eigen::MatrixXcd> H(static_cast<std::size_t>(K) * L);
    for (int k = 0; k < K; ++k) {
        for (int l = 0; l < L; ++l) {
            Eigen::MatrixXcd& m = H[static_cast<std::size_t>(k) * L + l];
            m.resize(N_AP, N_UE);
            for (int c = 0; c < N_UE; ++c)
                for (int r = 0; r < N_AP; ++r) m(r, c) = rng.cnormal();
        }
    }
    return H;
}

std::vector<UEOffsets> draw_ue_offsets(Rng& rng, int K, int N_UE)
{
    std::vector<UEOffsets> off(K);
    for (int k = 0; k < K; ++k) {
        off[k].phi_tx.resize(N_UE);
        off[k].phi_rx.resize(N_UE);
        for (int m = 0; m < N_UE; ++m) {
            const double a = 2.0 * std::numbers::pi * rng.uniform();
            off[k].phi_tx(m) = {std::cos(a), std::sin(a)};
        }
        for (int m = 0; m < N_UE; ++m) {
            const double a = 2.0 * std::numbers::pi * rng.uniform();
            off[k].phi_rx(m) = {std::cos(a), std::sin(a)};
        }
    }
    return off;
}

std::vector<UEOffsets> identity_offsets(int K, int N_UE)
{
    std::vector<UEOffsets> off(K);
    for (int k = 0; k < K; ++k) {
        off[k].phi_tx = Eigen::VectorXcd::Ones(N_UE);
        off[k].phi_rx = Eigen::VectorXcd::Ones(N_UE);
    }
    return off;
}

PilotNoise draw_pilot_noise(Rng& rng, int L, int n_groups, int N_UE, int N_AP)
{
    PilotNoise pn;
    pn.n_groups = n_groups;
    pn.N_UE = N_UE;
    pn.n.resize(L);
    for (int l = 0; l < L; ++l) {
        pn.n[l].resize(N_AP, n_groups * N_UE);
        for (int c = 0; c < n_groups * N_UE; ++c)
            for (int r = 0; r < N_AP; ++r) pn.n[l](r, c) = rng.cnormal();
    }
    return pn;
}

void true_channels(const Eigen::MatrixXd& beta, const std::vector<Eigen::MatrixXcd>& H,
                   const std::vector<UEOffsets>& offsets, std::vector<Eigen::MatrixXcd>& G_ul_true,
                   std::vector<Eigen::MatrixXcd>& G_dl_true)
{
    const int K = static_cast<int>(beta.rows());
    const int L = static_cast<int>(beta.cols());
    G_ul_true.resize(static_cast<std::size_t>(K) * L);
    G_dl_true.resize(static_cast<std::size_t>(K) * L);
    for (int k = 0; k < K; ++k) {
        const auto& tx = offsets[k].phi_tx;
        const auto& rx = offsets[k].phi_rx;
        for (int l = 0; l < L; ++l) {
            const std::size_t idx = static_cast<std::size_t>(k) * L + l;
            const double s = std::sqrt(beta(k, l));
            const Eigen::MatrixXcd G = s * H[idx];
            G_ul_true[idx] = G * tx.asDiagonal();
            G_dl_true[idx] = rx.asDiagonal() * G.adjoint();
        }
    }
}

void mmse_estimate(const std::vector<Eigen::MatrixXcd>& G_ul_true, const Eigen::MatrixXd& beta,
                   const std::vector<int>& pilot_group, const SystemConfig& cfg, double sigma2_W,
                   const PilotNoise& noise, std::vector<Eigen::MatrixXcd>& G_ul_hat,
                   Eigen::MatrixXd& err_var)
{
    const int K = static_cast<int>(beta.rows());
    const int L = static_cast<int>(beta.cols());
    const int N_UE = cfg.N_UE;
    G_ul_hat.resize(static_cast<std::size_t>(K) * L);
    err_var.setZero(K, L);

    if (cfg.perfect_csi) {
        for (std::size_t i = 0; i < G_ul_true.size(); ++i) G_ul_hat[i] = G_ul_true[i];
        return;
    }

    const double tp = static_cast<double>(cfg.tau_p) * cfg.pilot_power_W();
    const double sq_tp = std::sqrt(tp);
    const int n_groups = cfg.tau_p / N_UE;

    // group membership
    std::vector<std::vector<int>> members(n_groups);
    for (int k = 0; k < K; ++k) members[pilot_group[k]].push_back(k);

    Eigen::MatrixXcd y(cfg.N_AP, N_UE);
    for (int l = 0; l < L; ++l) {
        for (int g = 0; g < n_groups; ++g) {
            if (members[g].empty()) continue;
            double beta_sum = 0.0;
            for (int i : members[g]) beta_sum += beta(i, l);
            const double denom = tp * beta_sum + sigma2_W;

            // shared despread observation of the group's pilot matrix at AP l
            y = std::sqrt(sigma2_W) * noise.n[l].middleCols(g * N_UE, N_UE);
            for (int i : members[g])
                y += sq_tp * G_ul_true[static_cast<std::size_t>(i) * L + l];

            for (int k : members[g]) {
                const double scale = sq_tp * beta(k, l) / denom;
                G_ul_hat[static_cast<std::size_t>(k) * L + l] = scale * y;
                err_var(k, l) = beta(k, l) - tp * beta(k, l) * beta(k, l) / denom;
            }
        }
    }
}

ChannelView make_view(const Eigen::MatrixXd& beta, const std::vector<Eigen::MatrixXcd>& H,
                      const std::vector<UEOffsets>& offsets, const std::vector<int>& pilot_group,
                      const SystemConfig& cfg, double sigma2_W, const PilotNoise& pilot_noise)
{
    ChannelView v;
    true_channels(beta, H, offsets, v.G_ul_true, v.G_dl_true);
    mmse_estimate(v.G_ul_true, beta, pilot_group, cfg, sigma2_W, pilot_noise, v.G_ul_hat, v.err_var);
    return v;
}

} // namespace cfm

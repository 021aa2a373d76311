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

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "cfm/config.hpp"
#include "cfm/rng.hpp"

namespace cfm {

// Per-UE diagonal RF-branch offsets, unit modulus. AP-side offsets are
// identity throughout (APs assumed calibrated).
struct UEOffsets {
    Eigen::VectorXcd phi_tx; // N_UE
    Eigen::VectorXcd phi_rx; // N_UE
};

// One offset hypothesis over a shared small-scale realization: the true
// UL/DL channels, the MMSE estimates of the UL channels, and the
// per-element estimation-error variances c_{k,l}. Index (k,l) -> k*L + l.
struct ChannelView {
    std::vector<Eigen::MatrixXcd> G_ul_true; // N_AP x N_UE
    std::vector<Eigen::MatrixXcd> G_dl_true; // N_UE x N_AP
    std::vector<Eigen::MatrixXcd> G_ul_hat;  // N_AP x N_UE
    Eigen::MatrixXd err_var;                 // K x L
};

// Despread pilot observations, one effective noise vector per
// (AP, pilot group, UE-antenna column); unit variance, scaled at use.
struct PilotNoise {
    int n_groups = 0;
    int N_UE = 0;
    // per AP: N_AP x (n_groups * N_UE)
    std::vector<Eigen::MatrixXcd> n;
};

// H_{k,l} with i.i.d. CN(0,1) entries; index k*L + l. Draw order is fixed
// (k-major, column-major within a matrix) so substreams are reproducible.
std::vector<Eigen::MatrixXcd> draw_small_scale(Rng& rng, int K, int L, int N_AP, int N_UE);

// Phases i.i.d. uniform on [0, 2pi); exactly unit modulus.
std::vector<UEOffsets> draw_ue_offsets(Rng& rng, int K, int N_UE);
std::vector<UEOffsets> identity_offsets(int K, int N_UE);

PilotNoise draw_pilot_noise(Rng& rng, int L, int n_groups, int N_UE, int N_AP);

// G_ul = sqrt(beta) * H * diag(phi_tx); G_dl = diag(phi_rx) * (sqrt(beta) H)^H.
void true_channels(const Eigen::MatrixXd& beta, const std::vector<Eigen::MatrixXcd>& H,
                   const std::vector<UEOffsets>& offsets, std::vector<Eigen::MatrixXcd>& G_ul_true,
                   std::vector<Eigen::MatrixXcd>& G_dl_true);

// Statistical pilot model: for each (AP, group, antenna column)
//   y = sqrt(tau_p p_p) * sum_{i in group} g_i + n,   n ~ CN(0, sigma2 I)
//   g_hat_k = sqrt(tau_p p_p) beta_k / (tau_p p_p sum_i beta_i + sigma2) * y
//   c_k     = beta_k - tau_p p_p beta_k^2 / (tau_p p_p sum_i beta_i + sigma2)
// perfect_csi short-circuits to g_hat = g_true, c = 0.
void mmse_estimate(const std::vector<Eigen::MatrixXcd>& G_ul_true, const Eigen::MatrixXd& beta,
                   const std::vector<int>& pilot_group, const SystemConfig& cfg, double sigma2_W,
                   const PilotNoise& noise, std::vector<Eigen::MatrixXcd>& G_ul_hat,
                   Eigen::MatrixXd& err_var);

// Convenience: builds a full view (true channels + estimates) for one
// offset hypothesis.
ChannelView make_view(const Eigen::MatrixXd& beta, const std::vector<Eigen::MatrixXcd>& H,
                      const std::vector<UEOffsets>& offsets, const std::vector<int>& pilot_group,
                      const SystemConfig& cfg, double sigma2_W, const PilotNoise& pilot_noise);

} // namespace cfm

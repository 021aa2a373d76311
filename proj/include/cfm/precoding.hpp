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

#include <vector>

#include <Eigen/Dense>

#include "cfm/topology.hpp"

namespace cfm {

/// UE-side decoding matrix M = I_{N_s} kron 1_{N_b}, size N_UE x N_s.
/// Exactly one nonzero (=1) per row; column j selects antenna group j.
Eigen::MatrixXcd decoding_matrix(int N_UE, int N_s);

/// Unit-power (rho = 1) precoder blocks for one channel realization.
struct UnitPrecoders {
    /// Per-(k,l) N_AP x N_UE blocks, indexed k*L + l; empty where a_{k,l} = 0.
    std::vector<Eigen::MatrixXcd> W;
    /// Squared Frobenius norm of each block (0 where non-serving).
    Eigen::MatrixXd fro2;
    /// True if any Gram/system matrix needed the eps*I fallback.
    bool regularized = false;
};

/// Per-AP interference-nulling precoder: W = Ghat (Ghat^H Ghat)^{-1} for every
/// serving (k,l) pair. Near-singular Gram matrices get eps*I added
/// (eps = 1e-12 * trace / N_UE) and set the `regularized` flag.
UnitPrecoders zisi_precoder_unit(const NetworkRealization& net,
                                 const std::vector<Eigen::MatrixXcd>& G_ul_hat, int N_AP, int N_UE);

/// Centralized regularized precoder. For each UE k the system matrix
///   A = sum_{i in P_k} eta * (Ghat_i Ghat_i^H + Z_i) + sigma2 * I
/// is assembled on the subspace of APs actually touched by the partial set
/// P_k = { i : clusters of i and k overlap }, where Z_i has diagonal blocks
/// N_UE * err_var(i,l) * I_{N_AP} on serving APs. The returned blocks are
/// eta * A^{-1} Ghat_k restricted to l in the cluster of k.
UnitPrecoders pmmse_precoder_unit(const NetworkRealization& net,
                                  const std::vector<Eigen::MatrixXcd>& G_ul_hat,
                                  const Eigen::MatrixXd& err_var, double eta, double sigma2_W,
                                  int N_AP, int N_UE);

/// Distributed rule: rho(k,l) = rho_max / fro2(k,l) * sqrt(beta(k,l)) / sum_{k' served by l} sqrt(beta(k',l)).
/// Entries are 0 where a_{k,l} = 0. Guarantees sum_{k in K_l} rho(k,l)*fro2(k,l) = rho_max
/// at every AP serving at least one UE.
Eigen::MatrixXd power_alloc_distributed(const NetworkRealization& net, const Eigen::MatrixXd& fro2,
                                        double rho_max);

/// Centralized rule:
///   rho_k = rho_max / rho_norm(k) * (sum_{l in L_k} beta^varsigma)^kappa
///           / max_{l in L_k} sum_{i in K_l} (sum_{l' in L_i} beta^varsigma)^kappa.
/// rho_norm(k) is the caller's estimate of E{ sum_l ||W_{k,l}^unit||_F^2 }.
Eigen::VectorXd power_alloc_centralized(const NetworkRealization& net,
                                        const Eigen::VectorXd& rho_norm, double rho_max,
                                        double varsigma, double kappa);

/// Scale unit blocks by sqrt(rho(k,l)) (distributed, per-(k,l) coefficients).
std::vector<Eigen::MatrixXcd> scale_precoders(const NetworkRealization& net,
                                              const std::vector<Eigen::MatrixXcd>& W_unit,
                                              const Eigen::MatrixXd& rho_kl);

/// Scale unit blocks by sqrt(rho(k)) (centralized, per-UE coefficients).
std::vector<Eigen::MatrixXcd> scale_precoders(const NetworkRealization& net,
                                              const std::vector<Eigen::MatrixXcd>& W_unit,
                                              const Eigen::VectorXd& rho_k);

} // namespace cfm

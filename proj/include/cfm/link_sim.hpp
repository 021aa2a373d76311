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
#include <vector>

#include <Eigen/Dense>

#include "cfm/config.hpp"
#include "cfm/dstbc.hpp"
#include "cfm/topology.hpp"

namespace cfm {

/// Bit-level outcome of one coherence block.
struct BlockResult {
    std::vector<std::uint64_t> bits_total; // per UE
    std::vector<std::uint64_t> bit_errors; // per UE
    bool regularized = false;              // precoder eps-fallback flag, set by the caller
    // Populated only when collect_bits is requested (unit tests).
    std::vector<std::vector<std::uint8_t>> tx_bits; // per UE
    std::vector<std::vector<std::uint8_t>> rx_bits; // per UE
};

/// Pre-drawn randomness for one block. Coherent and DSTBC transmissions use
/// independent substreams keyed by purpose, so running any subset of modes
/// never changes another mode's draws, while modes compared in one run see
/// the same symbols and noise (common random numbers).
struct BlockDraws {
    // coherent: constellation index at [k*(N_s*tau_d) + j*tau_d + p]
    std::vector<int> coh_symbols;
    std::vector<Eigen::MatrixXcd> coh_noise; // per UE: N_UE x tau_d, unit variance
    // dstbc: per (UE, stream) at [k*N_s + j]: (G-1)*n_s indices
    std::vector<std::vector<int>> dstbc_symbols;
    std::vector<Eigen::MatrixXcd> dstbc_noise; // per UE: N_UE x (G*L_k), unit variance
};

BlockDraws draw_block_randomness(std::uint64_t master, std::uint64_t setup, std::uint64_t block,
                                 const SystemConfig& cfg, bool want_coherent, bool want_dstbc);

/// One coherent downlink block: per symbol epoch every serving AP superimposes
/// its precoded streams, UE k receives through G_dl, applies M^H, and slices
/// each stream (no UE-side equalization; the slicer assumes the calibrated
/// phase reference). G_dl and W are per-(k,l) with index k*L + l. When
/// soft_out is non-null it receives the pre-slicer estimates, (K*N_s) x tau_d.
BlockResult simulate_coherent_block(const NetworkRealization& net,
                                    const std::vector<Eigen::MatrixXcd>& G_dl,
                                    const std::vector<Eigen::MatrixXcd>& W,
                                    const SystemConfig& cfg, double sigma2_W,
                                    const BlockDraws& draws, Eigen::MatrixXcd* soft_out = nullptr,
                                    bool collect_bits = false);

/// One DSTBC block: a reference interval (C^0 = I) plus G-1 differentially
/// encoded codeword intervals per stream. Each serving AP transmits the
/// codeword row matching its cluster position; every UE detects by comparing
/// consecutive received blocks (decoupled detector by default, exhaustive
/// search when use_full_search is set).
BlockResult simulate_dstbc_block(const NetworkRealization& net,
                                 const std::vector<Eigen::MatrixXcd>& G_dl,
                                 const std::vector<Eigen::MatrixXcd>& W,
                                 const SpaceTimeCodebook& cb, const SystemConfig& cfg,
                                 double sigma2_W, const BlockDraws& draws,
                                 bool use_full_search = false, bool collect_bits = false);

/// Expected per-epoch radiated power per AP over the i.i.d. unit-modulus
/// symbol ensemble: P_l = sum_{k served by l} ||W_{k,l} M||_F^2. A DSTBC
/// interval time-averages to the same figure: codeword rows carry unit
/// energy over L_k epochs and are transmitted scaled by sqrt(L_k).
Eigen::VectorXd ap_expected_power(const NetworkRealization& net,
                                  const std::vector<Eigen::MatrixXcd>& W,
                                  const Eigen::MatrixXcd& M);

} // namespace cfm

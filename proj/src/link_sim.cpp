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

#include "cfm/link_sim.hpp"

#include <cmath>

#include "cfm/precoding.hpp"
#include "cfm/psk.hpp"
#include "cfm/rng.hpp"

namespace cfm {

namespace {

void push_bits(std::vector<std::uint8_t>& v, int label, int bits)
{
    for (int b = bits - 1; b >= 0; --b) v.push_back(static_cast<std::uint8_t>((label >> b) & 1));
}

} // namespace

BlockDraws draw_block_randomness(std::uint64_t master, std::uint64_t setup, std::uint64_t block,
                                 const SystemConfig& cfg, bool want_coherent, bool want_dstbc)
{
    BlockDraws d;
    const int K = cfg.K, N_UE = cfg.N_UE, N_s = cfg.N_s, tau_d = cfg.tau_d, M_o = cfg.M_o;

    if (want_coherent) {
        Rng sym = substream(master, setup, block, RngPurpose::SymbolsCoherent);
        d.coh_symbols.resize(static_cast<std::size_t>(K) * N_s * tau_d);
        for (std::size_t i = 0; i < d.coh_symbols.size(); ++i)
            d.coh_symbols[i] = static_cast<int>(sym.below(M_o));

        Rng noi = substream(master, setup, block, RngPurpose::DataNoise, 0);
        d.coh_noise.resize(K);
        for (int k = 0; k < K; ++k) {
            d.coh_noise[k].resize(N_UE, tau_d);
            for (int p = 0; p < tau_d; ++p)
                for (int r = 0; r < N_UE; ++r) d.coh_noise[k](r, p) = noi.cnormal();
        }
    }

    if (want_dstbc) {
        const int L_k = cfg.L_k;
        const int G = tau_d / L_k;
        const int n_s = (L_k == 2) ? 2 : 3;

        Rng sym = substream(master, setup, block, RngPurpose::SymbolsDstbc);
        d.dstbc_symbols.resize(static_cast<std::size_t>(K) * N_s);
        for (auto& stream : d.dstbc_symbols) {
            stream.resize(static_cast<std::size_t>(G - 1) * n_s);
            for (auto& s : stream) s = static_cast<int>(sym.below(M_o));
        }

        Rng noi = substream(master, setup, block, RngPurpose::DataNoise, 1);
        d.dstbc_noise.resize(K);
        for (int k = 0; k < K; ++k) {
            d.dstbc_noise[k].resize(N_UE, G * L_k);
            for (int p = 0; p < G * L_k; ++p)
                for (int r = 0; r < N_UE; ++r) d.dstbc_noise[k](r, p) = noi.cnormal();
        }
    }
    return d;
}

BlockResult simulate_coherent_block(const NetworkRealization& net,
                                    const std::vector<Eigen::MatrixXcd>& G_dl,
                                    const std::vector<Eigen::MatrixXcd>& W,
                                    const SystemConfig& cfg, double sigma2_W,
                                    const BlockDraws& draws, Eigen::MatrixXcd* soft_out,
                                    bool collect_bits)
{
    const int K = cfg.K, L = cfg.L, N_UE = cfg.N_UE, N_s = cfg.N_s;
    const int tau_d = cfg.tau_d, M_o = cfg.M_o;
    const int bits = log2_int(M_o);
    const Eigen::MatrixXcd M = decoding_matrix(N_UE, N_s);

    // effective link matrix: block (k, i) = sum_{l in L_i} G_dl_{k,l} W_{i,l} M
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(K * N_UE, K * N_s);
    for (int i = 0; i < K; ++i)
        for (int l : net.cluster[i]) {
            const Eigen::MatrixXcd WM = W[static_cast<std::size_t>(i) * L + l] * M;
            for (int k = 0; k < K; ++k)
                T.block(k * N_UE, i * N_s, N_UE, N_s).noalias() +=
                    G_dl[static_cast<std::size_t>(k) * L + l] * WM;
        }

    Eigen::MatrixXcd S(K * N_s, tau_d);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < N_s; ++j)
            for (int p = 0; p < tau_d; ++p)
                S(k * N_s + j, p) = psk_point(
                    draws.coh_symbols[(static_cast<std::size_t>(k) * N_s + j) * tau_d + p], M_o);

    Eigen::MatrixXcd Y = T * S;
    if (sigma2_W > 0.0) {
        const double sn = std::sqrt(sigma2_W);
        for (int k = 0; k < K; ++k) Y.middleRows(k * N_UE, N_UE) += sn * draws.coh_noise[k];
    }

    BlockResult res;
    res.bits_total.assign(K, 0);
    res.bit_errors.assign(K, 0);
    if (collect_bits) { res.tx_bits.resize(K); res.rx_bits.resize(K); }
    if (soft_out) soft_out->resize(K * N_s, tau_d);

    Eigen::MatrixXcd soft(N_s, tau_d);
    for (int k = 0; k < K; ++k) {
        soft.noalias() = M.adjoint() * Y.middleRows(k * N_UE, N_UE);
        if (soft_out) soft_out->middleRows(k * N_s, N_s) = soft;
        for (int j = 0; j < N_s; ++j)
            for (int p = 0; p < tau_d; ++p) {
                const int tx =
                    draws.coh_symbols[(static_cast<std::size_t>(k) * N_s + j) * tau_d + p];
                const int rx = slice_psk(soft(j, p), M_o);
                res.bits_total[k] += bits;
                res.bit_errors[k] += gray_bit_errors(tx, rx);
                if (collect_bits) {
                    push_bits(res.tx_bits[k], gray_encode(tx), bits);
                    push_bits(res.rx_bits[k], gray_encode(rx), bits);
                }
            }
    }
    return res;
}

BlockResult simulate_dstbc_block(const NetworkRealization& net,
                                 const std::vector<Eigen::MatrixXcd>& G_dl,
                                 const std::vector<Eigen::MatrixXcd>& W,
                                 const SpaceTimeCodebook& cb, const SystemConfig& cfg,
                                 double sigma2_W, const BlockDraws& draws, bool use_full_search,
                                 bool collect_bits)
{
    const int K = cfg.K, L = cfg.L, N_UE = cfg.N_UE, N_s = cfg.N_s, M_o = cfg.M_o;
    const int L_k = cb.L_k, n_s = cb.n_s;
    const int G = cfg.tau_d / L_k;
    const int N_b = N_UE / N_s;
    const int bits = log2_int(M_o);
    const double sn = sigma2_W > 0.0 ? std::sqrt(sigma2_W) : 0.0;
    const Eigen::MatrixXcd M = decoding_matrix(N_UE, N_s);

    // effective link blocks per (receiver k; transmitter i, cluster slot pos):
    // T(k-rows; (i,pos)-cols) = G_dl_{k, cluster[i][pos]} W_{i, cluster[i][pos]} M
    const int cols = K * L_k * N_s;
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(K * N_UE, cols);
    for (int i = 0; i < K; ++i)
        for (int pos = 0; pos < L_k; ++pos) {
            const int l = net.cluster[i][pos];
            const Eigen::MatrixXcd WM = W[static_cast<std::size_t>(i) * L + l] * M;
            for (int k = 0; k < K; ++k)
                T.block(k * N_UE, (i * L_k + pos) * N_s, N_UE, N_s).noalias() =
                    G_dl[static_cast<std::size_t>(k) * L + l] * WM;
        }

    // row (i*L_k + pos)*N_s + j of B holds row pos of stream j's cumulative
    // codeword: the AP at cluster slot pos transmits exactly that row.
    // Rows of a unitary codeword carry unit energy spread over L_k epochs, so
    // they are scaled by sqrt(L_k) to spend the same average power per epoch
    // as a unit-modulus coherent symbol (the rho budget assumes that scale).
    const double tx = std::sqrt(static_cast<double>(L_k));
    std::vector<EncoderState> enc(static_cast<std::size_t>(K) * N_s, EncoderState(L_k));
    Eigen::MatrixXcd B(cols, L_k);
    for (int i = 0; i < K; ++i)
        for (int pos = 0; pos < L_k; ++pos)
            for (int j = 0; j < N_s; ++j)
                B.row((i * L_k + pos) * N_s + j) =
                    tx * Eigen::RowVectorXcd::Unit(L_k, pos); // reference interval, C^0 = I

    BlockResult res;
    res.bits_total.assign(K, 0);
    res.bit_errors.assign(K, 0);
    if (collect_bits) { res.tx_bits.resize(K); res.rx_bits.resize(K); }

    // previous received stream blocks, [k*N_s + j]
    std::vector<Eigen::MatrixXcd> prev(static_cast<std::size_t>(K) * N_s);
    Eigen::MatrixXcd Y(K * N_UE, L_k);

    auto receive = [&](int t) {
        Y.noalias() = T * B;
        if (sn > 0.0)
            for (int k = 0; k < K; ++k)
                Y.middleRows(k * N_UE, N_UE) += sn * draws.dstbc_noise[k].middleCols(t * L_k, L_k);
    };

    receive(0);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < N_s; ++j)
            prev[static_cast<std::size_t>(k) * N_s + j] =
                Y.block(k * N_UE + j * N_b, 0, N_b, L_k);

    int tuple[3];
    int detected[3];
    for (int t = 1; t < G; ++t) {
        for (int i = 0; i < K; ++i)
            for (int j = 0; j < N_s; ++j) {
                const auto& stream = draws.dstbc_symbols[static_cast<std::size_t>(i) * N_s + j];
                for (int u = 0; u < n_s; ++u) tuple[u] = stream[(t - 1) * n_s + u];
                const Eigen::MatrixXcd& C =
                    differential_encode(enc[static_cast<std::size_t>(i) * N_s + j],
                                        cb.entries[cb.index_of(tuple)]);
                for (int pos = 0; pos < L_k; ++pos)
                    B.row((i * L_k + pos) * N_s + j) = tx * C.row(pos);
            }

        receive(t);

        for (int k = 0; k < K; ++k)
            for (int j = 0; j < N_s; ++j) {
                const std::size_t kj = static_cast<std::size_t>(k) * N_s + j;
                const Eigen::MatrixXcd Yt = Y.block(k * N_UE + j * N_b, 0, N_b, L_k);
                if (use_full_search) {
                    const FullDetect fd = detect_ml_full(Yt, prev[kj], cb);
                    for (int u = 0; u < n_s; ++u) detected[u] = fd.tuple[u];
                } else {
                    detect_ml_decoupled(Yt, prev[kj], cb, detected);
                }
                const auto& stream = draws.dstbc_symbols[kj];
                for (int u = 0; u < n_s; ++u) {
                    const int tx = stream[(t - 1) * n_s + u];
                    res.bits_total[k] += bits;
                    res.bit_errors[k] += gray_bit_errors(tx, detected[u]);
                    if (collect_bits) {
                        push_bits(res.tx_bits[k], gray_encode(tx), bits);
                        push_bits(res.rx_bits[k], gray_encode(detected[u]), bits);
                    }
                }
                prev[kj] = Yt;
            }
    }
    return res;
}

Eigen::VectorXd ap_expected_power(const NetworkRealization& net,
                                  const std::vector<Eigen::MatrixXcd>& W,
                                  const Eigen::MatrixXcd& M)
{
    const int K = static_cast<int>(net.beta.rows());
    const int L = static_cast<int>(net.beta.cols());
    Eigen::VectorXd P = Eigen::VectorXd::Zero(L);
    for (int k = 0; k < K; ++k)
        for (int l : net.cluster[k])
            P(l) += (W[static_cast<std::size_t>(k) * L + l] * M).squaredNorm();
    return P;
}

} // namespace cfm

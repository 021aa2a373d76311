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

#include "cfm/precoding.hpp"

#include <algorithm>
#include <cmath>

namespace cfm {

Eigen::MatrixXcd decoding_matrix(int N_UE, int N_s)
{
    const int N_b = N_UE / N_s;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(N_UE, N_s);
    for (int j = 0; j < N_s; ++j)
        for (int b = 0; b < N_b; ++b) M(j * N_b + b, j) = 1.0;
    return M;
}

UnitPrecoders zisi_precoder_unit(const NetworkRealization& net,
                                 const std::vector<Eigen::MatrixXcd>& G_ul_hat, int N_AP, int N_UE)
{
    const int K = static_cast<int>(net.beta.rows());
    const int L = static_cast<int>(net.beta.cols());
    UnitPrecoders out;
    out.W.resize(static_cast<std::size_t>(K) * L);
    out.fro2.setZero(K, L);

    for (int k = 0; k < K; ++k) {
        for (int l : net.cluster[k]) {
            const Eigen::MatrixXcd& G = G_ul_hat[static_cast<std::size_t>(k) * L + l];
            Eigen::MatrixXcd gram = G.adjoint() * G;
            Eigen::LLT<Eigen::MatrixXcd> llt(gram);
            if (llt.info() != Eigen::Success) {
                const double eps = 1e-12 * gram.trace().real() / N_UE;
                gram += eps * Eigen::MatrixXcd::Identity(N_UE, N_UE);
                llt.compute(gram);
                out.regularized = true;
            }
            Eigen::MatrixXcd W =
                llt.solve(G.adjoint()).adjoint(); // G * gram^{-1}, gram Hermitian
            out.fro2(k, l) = W.squaredNorm();
            out.W[static_cast<std::size_t>(k) * L + l] = std::move(W);
        }
    }
    (void)N_AP;
    return out;
}

UnitPrecoders pmmse_precoder_unit(const NetworkRealization& net,
                                  const std::vector<Eigen::MatrixXcd>& G_ul_hat,
                                  const Eigen::MatrixXd& err_var, double eta, double sigma2_W,
                                  int N_AP, int N_UE)
{
    const int K = static_cast<int>(net.beta.rows());
    const int L = static_cast<int>(net.beta.cols());
    UnitPrecoders out;
    out.W.resize(static_cast<std::size_t>(K) * L);
    out.fro2.setZero(K, L);

    std::vector<char> in_union(L);
    std::vector<int> union_aps;
    std::vector<int> pos(L);

    for (int k = 0; k < K; ++k) {
        // partial set: every UE whose cluster overlaps UE k's cluster
        std::vector<int> partial;
        for (int i = 0; i < K; ++i) {
            bool overlap = false;
            for (int l : net.cluster[i])
                if (net.serves(k, l)) { overlap = true; break; }
            if (overlap) partial.push_back(i);
        }

        // union of serving APs across the partial set
        std::fill(in_union.begin(), in_union.end(), 0);
        union_aps.clear();
        for (int i : partial)
            for (int l : net.cluster[i]) in_union[l] = 1;
        for (int l = 0; l < L; ++l)
            if (in_union[l]) { pos[l] = static_cast<int>(union_aps.size()); union_aps.push_back(l); }

        const int n = static_cast<int>(union_aps.size()) * N_AP;
        Eigen::MatrixXcd A = sigma2_W * Eigen::MatrixXcd::Identity(n, n);
        Eigen::MatrixXcd G_stack(n, N_UE);

        for (int i : partial) {
            G_stack.setZero();
            for (int l : net.cluster[i])
                G_stack.middleRows(pos[l] * N_AP, N_AP) =
                    G_ul_hat[static_cast<std::size_t>(i) * L + l];
            A.noalias() += eta * (G_stack * G_stack.adjoint());
            for (int l : net.cluster[i]) {
                const double z = eta * N_UE * err_var(i, l);
                if (z > 0.0)
                    A.block(pos[l] * N_AP, pos[l] * N_AP, N_AP, N_AP) +=
                        z * Eigen::MatrixXcd::Identity(N_AP, N_AP);
            }
        }

        Eigen::LLT<Eigen::MatrixXcd> llt(A);
        if (llt.info() != Eigen::Success) {
            // only reachable when sigma2 = 0 (noiseless runs)
            const double eps = 1e-12 * A.trace().real() / n;
            A += eps * Eigen::MatrixXcd::Identity(n, n);
            llt.compute(A);
            out.regularized = true;
        }

        G_stack.setZero();
        for (int l : net.cluster[k])
            G_stack.middleRows(pos[l] * N_AP, N_AP) =
                G_ul_hat[static_cast<std::size_t>(k) * L + l];
        const Eigen::MatrixXcd V = eta * llt.solve(G_stack);

        for (int l : net.cluster[k]) {
            Eigen::MatrixXcd Wl = V.middleRows(pos[l] * N_AP, N_AP);
            out.fro2(k, l) = Wl.squaredNorm();
            out.W[static_cast<std::size_t>(k) * L + l] = std::move(Wl);
        }
    }
    return out;
}

Eigen::MatrixXd power_alloc_distributed(const NetworkRealization& net, const Eigen::MatrixXd& fro2,
                                        double rho_max)
{
    const int K = static_cast<int>(net.beta.rows());
    const int L = static_cast<int>(net.beta.cols());
    Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(K, L);
    for (int l = 0; l < L; ++l) {
        double denom = 0.0;
        for (int k = 0; k < K; ++k)
            if (net.serves(k, l)) denom += std::sqrt(net.beta(k, l));
        if (denom == 0.0) continue; // AP serves no UE
        for (int k = 0; k < K; ++k)
            if (net.serves(k, l))
                rho(k, l) = rho_max / fro2(k, l) * std::sqrt(net.beta(k, l)) / denom;
    }
    return rho;
}

Eigen::VectorXd power_alloc_centralized(const NetworkRealization& net,
                                        const Eigen::VectorXd& rho_norm, double rho_max,
                                        double varsigma, double kappa)
{
    const int K = static_cast<int>(net.beta.rows());
    const int L = static_cast<int>(net.beta.cols());

    Eigen::VectorXd weight(K); // (sum_{l in L_i} beta^varsigma)^kappa
    for (int i = 0; i < K; ++i) {
        double s = 0.0;
        for (int l : net.cluster[i]) s += std::pow(net.beta(i, l), varsigma);
        weight(i) = std::pow(s, kappa);
    }

    Eigen::VectorXd ap_load = Eigen::VectorXd::Zero(L); // sum_{i in K_l} weight(i)
    for (int i = 0; i < K; ++i)
        for (int l : net.cluster[i]) ap_load(l) += weight(i);

    Eigen::VectorXd rho(K);
    for (int k = 0; k < K; ++k) {
        double denom = 0.0;
        for (int l : net.cluster[k]) denom = std::max(denom, ap_load(l));
        rho(k) = rho_max / rho_norm(k) * weight(k) / denom;
    }
    return rho;
}

std::vector<Eigen::MatrixXcd> scale_precoders(const NetworkRealization& net,
                                              const std::vector<Eigen::MatrixXcd>& W_unit,
                                              const Eigen::MatrixXd& rho_kl)
{
    const int K = static_cast<int>(net.beta.rows());
    const int L = static_cast<int>(net.beta.cols());
    std::vector<Eigen::MatrixXcd> W(W_unit.size());
    for (int k = 0; k < K; ++k)
        for (int l : net.cluster[k]) {
            const std::size_t idx = static_cast<std::size_t>(k) * L + l;
            W[idx] = std::sqrt(rho_kl(k, l)) * W_unit[idx];
        }
    return W;
}

std::vector<Eigen::MatrixXcd> scale_precoders(const NetworkRealization& net,
                                              const std::vector<Eigen::MatrixXcd>& W_unit,
                                              const Eigen::VectorXd& rho_k)
{
    const int K = static_cast<int>(net.beta.rows());
    const int L = static_cast<int>(net.beta.cols());
    std::vector<Eigen::MatrixXcd> W(W_unit.size());
    for (int k = 0; k < K; ++k) {
        const double s = std::sqrt(rho_k(k));
        for (int l : net.cluster[k]) {
            const std::size_t idx = static_cast<std::size_t>(k) * L + l;
            W[idx] = s * W_unit[idx];
        }
    }
    return W;
}

} // namespace cfm

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "cfm/channel.hpp"
#include "cfm/precoding.hpp"

using namespace cfm;
using cd = std::complex<double>;

namespace {

// A tiny network plus random estimated channels, for exercising the
// precoders without the full pipeline.
struct Bench {
    NetworkRealization net;
    std::vector<Eigen::MatrixXcd> G; // UL estimates, k*L + l
    Eigen::MatrixXd err;
    int N_AP, N_UE;

    Bench(int K, int L, int L_k, int n_ap, int n_ue, std::uint64_t salt = 0)
        : N_AP(n_ap), N_UE(n_ue)
    {
        Rng rng = substream(21, salt, 0, RngPurpose::SmallScale);
        net.beta.resize(K, L);
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < L; ++l) net.beta(k, l) = 1e-8 * (0.5 + rng.uniform());
        net.cluster = cluster_aps(net.beta, L_k);
        net.pilot_group.resize(K, 0);
        G.resize(static_cast<std::size_t>(K) * L);
        err.setZero(K, L);
        for (int k = 0; k < K; ++k)
            for (int l : net.cluster[k]) {
                auto& m = G[static_cast<std::size_t>(k) * L + l];
                m.resize(N_AP, N_UE);
                for (int c = 0; c < N_UE; ++c)
                    for (int r = 0; r < N_AP; ++r) m(r, c) = std::sqrt(net.beta(k, l)) * rng.cnormal();
                err(k, l) = 0.1 * net.beta(k, l);
            }
    }
};

} // namespace

TEST_CASE("decoding matrix: trivial and grouped layouts")
{
    Eigen::MatrixXcd M22 = decoding_matrix(2, 2);
    CHECK((M22 - Eigen::MatrixXcd::Identity(2, 2)).norm() == 0.0);

    Eigen::MatrixXcd M42 = decoding_matrix(4, 2);
    REQUIRE(M42.rows() == 4);
    REQUIRE(M42.cols() == 2);
    Eigen::MatrixXcd expect(4, 2);
    expect << 1, 0, 1, 0, 0, 1, 0, 1;
    CHECK((M42 - expect).norm() == 0.0);
}

TEST_CASE("decoding matrix: one unit entry per row, M^H M = N_b I")
{
    for (auto [n_ue, n_s] : {std::pair{2, 1}, {4, 2}, {4, 4}, {6, 3}}) {
        Eigen::MatrixXcd M = decoding_matrix(n_ue, n_s);
        const int N_b = n_ue / n_s;
        for (int r = 0; r < n_ue; ++r) {
            int nonzero = 0;
            for (int c = 0; c < n_s; ++c)
                if (M(r, c) != cd(0, 0)) {
                    ++nonzero;
                    CHECK(M(r, c) == cd(1, 0));
                }
            CHECK(nonzero == 1);
        }
        Eigen::MatrixXcd gram = M.adjoint() * M;
        CHECK((gram - double(N_b) * Eigen::MatrixXcd::Identity(n_s, n_s)).norm() < 1e-15);
    }
}

TEST_CASE("interference nulling: orthonormal columns are a fixed point")
{
    Bench b(1, 2, 2, 4, 2);
    // replace estimates with orthonormal columns: Ghat^H Ghat = I
    for (int l : b.net.cluster[0]) {
        Eigen::MatrixXcd Q(4, 2);
        Q.setZero();
        Q(0, 0) = 1.0;
        Q(2, 1) = cd(0, 1); // unit column, orthogonal to the first
        b.G[l] = Q;
    }
    auto up = zisi_precoder_unit(b.net, b.G, 4, 2);
    CHECK(!up.regularized);
    for (int l : b.net.cluster[0]) {
        CHECK((up.W[l] - b.G[l]).norm() < 1e-13);
        CHECK(up.fro2(0, l) == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("interference nulling: single antenna column reduces to g/||g||^2")
{
    Bench b(1, 2, 2, 4, 1);
    auto up = zisi_precoder_unit(b.net, b.G, 4, 1);
    for (int l : b.net.cluster[0]) {
        const Eigen::MatrixXcd expect = b.G[l] / b.G[l].squaredNorm();
        CHECK((up.W[l] - expect).norm() <= 1e-12 * expect.norm());
    }
}

TEST_CASE("interference nulling: Ghat^H W = I on every serving AP")
{
    Bench b(4, 6, 2, 8, 2, 1);
    auto up = zisi_precoder_unit(b.net, b.G, 8, 2);
    CHECK(!up.regularized);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(2, 2);
    int checked = 0;
    for (int k = 0; k < 4; ++k)
        for (int l : b.net.cluster[k]) {
            const auto& W = up.W[static_cast<std::size_t>(k) * 6 + l];
            const auto& G = b.G[static_cast<std::size_t>(k) * 6 + l];
            CHECK((G.adjoint() * W - I).norm() < 1e-10);
            CHECK(up.fro2(k, l) == doctest::Approx(W.squaredNorm()).epsilon(1e-12));
            ++checked;
        }
    CHECK(checked == 8);
    // non-serving blocks stay empty with zero norm
    CHECK(up.fro2.sum() > 0.0);
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 6; ++l)
            if (!b.net.serves(k, l)) {
                CHECK(up.W[static_cast<std::size_t>(k) * 6 + l].size() == 0);
                CHECK(up.fro2(k, l) == 0.0);
            }
}

TEST_CASE("interference nulling: rank-deficient estimate trips the fallback")
{
    Bench b(1, 2, 2, 4, 2);
    for (int l : b.net.cluster[0]) b.G[l].col(1).setZero(); // Gram has an exact zero pivot
    auto up = zisi_precoder_unit(b.net, b.G, 4, 2);
    CHECK(up.regularized);
    for (int l : b.net.cluster[0]) CHECK(up.W[l].allFinite());
}

TEST_CASE("regularized precoder: huge noise tends to maximum ratio")
{
    Bench b(1, 2, 2, 4, 2);
    const double eta = 0.05;
    const double sigma2 = 1e6; // >> eta * ||G G^H||
    auto up = pmmse_precoder_unit(b.net, b.G, b.err, eta, sigma2, 4, 2);
    for (int l : b.net.cluster[0]) {
        const Eigen::MatrixXcd mr = (eta / sigma2) * b.G[l];
        CHECK((up.W[l] - mr).norm() <= 1e-6 * mr.norm());
    }
}

TEST_CASE("regularized precoder: vanishing noise diagonalizes a single-UE link")
{
    Bench b(1, 2, 2, 4, 2);
    b.err.setZero(); // perfect CSI
    const double eta = 0.05;
    const double sigma2 = 1e-20; // tiny but nonzero
    auto up = pmmse_precoder_unit(b.net, b.G, b.err, eta, sigma2, 4, 2);
    // stack the serving blocks: G^H W over the whole cluster approaches c*I
    const int L = 2;
    Eigen::MatrixXcd GHW = Eigen::MatrixXcd::Zero(2, 2);
    for (int l : b.net.cluster[0])
        GHW += b.G[l].adjoint() * up.W[static_cast<std::size_t>(0) * L + l];
    const double off = std::abs(GHW(0, 1)) + std::abs(GHW(1, 0));
    const double on = std::abs(GHW(0, 0)) + std::abs(GHW(1, 1));
    CHECK(off < 1e-6 * on);
}

TEST_CASE("regularized precoder: disjoint partial sets decouple")
{
    // two UEs with non-overlapping clusters: UE 0 never sees UE 1's channel
    Bench b(2, 4, 2, 4, 2, 2);
    b.net.cluster[0] = {0, 1};
    b.net.cluster[1] = {2, 3};
    Rng rng = substream(22, 0, 0, RngPurpose::SmallScale);
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 4; ++l) {
            auto& m = b.G[static_cast<std::size_t>(k) * 4 + l];
            if (!b.net.serves(k, l)) {
                m.resize(0, 0);
                b.err(k, l) = 0.0;
                continue;
            }
            m.resize(4, 2);
            for (int c = 0; c < 2; ++c)
                for (int r = 0; r < 4; ++r) m(r, c) = 1e-4 * rng.cnormal();
            b.err(k, l) = 1e-9;
        }

    auto before = pmmse_precoder_unit(b.net, b.G, b.err, 0.05, 1e-9, 4, 2);
    for (int l : b.net.cluster[1]) b.G[static_cast<std::size_t>(1) * 4 + l] *= cd(0.0, 2.0);
    auto after = pmmse_precoder_unit(b.net, b.G, b.err, 0.05, 1e-9, 4, 2);

    for (int l : b.net.cluster[0]) {
        const auto& w0 = before.W[l];
        const auto& w1 = after.W[l];
        CHECK((w0 - w1).norm() == 0.0); // identical arithmetic, bit for bit
    }
    double moved = 0;
    for (int l : b.net.cluster[1])
        moved += (before.W[static_cast<std::size_t>(1) * 4 + l] -
                  after.W[static_cast<std::size_t>(1) * 4 + l])
                     .norm();
    CHECK(moved > 0.0);
}

TEST_CASE("regularized precoder: error variance enters the system matrix")
{
    Bench b(2, 2, 2, 8, 2, 3);
    b.net.cluster[0] = {0, 1};
    b.net.cluster[1] = {0, 1}; // full overlap: partners in each other's partial sets
    auto low = pmmse_precoder_unit(b.net, b.G, b.err, 0.05, 1e-10, 8, 2);
    Eigen::MatrixXd big_err = 1e3 * b.err;
    auto high = pmmse_precoder_unit(b.net, b.G, big_err, 0.05, 1e-10, 8, 2);
    double diff = 0;
    for (int l : b.net.cluster[0]) diff += (low.W[l] - high.W[l]).norm();
    CHECK(diff > 0.0);
}

TEST_CASE("distributed allocation: closed forms and the per-AP budget")
{
    SUBCASE("single UE takes the whole budget")
    {
        Bench b(1, 2, 2, 4, 2);
        auto up = zisi_precoder_unit(b.net, b.G, 4, 2);
        Eigen::MatrixXd rho = power_alloc_distributed(b.net, up.fro2, 0.2);
        for (int l : b.net.cluster[0])
            CHECK(rho(0, l) == doctest::Approx(0.2 / up.fro2(0, l)).epsilon(1e-12));
    }
    SUBCASE("two equal-gain UEs split the budget in half")
    {
        Bench b(2, 2, 2, 4, 2, 4);
        b.net.beta(1, 0) = b.net.beta(0, 0);
        b.net.beta(1, 1) = b.net.beta(0, 1);
        b.net.cluster = cluster_aps(b.net.beta, 2);
        auto up = zisi_precoder_unit(b.net, b.G, 4, 2);
        Eigen::MatrixXd rho = power_alloc_distributed(b.net, up.fro2, 0.2);
        for (int l = 0; l < 2; ++l)
            for (int k = 0; k < 2; ++k)
                CHECK(rho(k, l) * up.fro2(k, l) == doctest::Approx(0.1).epsilon(1e-12));
    }
    SUBCASE("per-AP spend sums to rho_max")
    {
        Bench b(5, 3, 2, 8, 2, 5);
        auto up = zisi_precoder_unit(b.net, b.G, 8, 2);
        Eigen::MatrixXd rho = power_alloc_distributed(b.net, up.fro2, 0.2);
        for (int l = 0; l < 3; ++l) {
            double spend = 0;
            bool loaded = false;
            for (int k = 0; k < 5; ++k) {
                if (!b.net.serves(k, l)) {
                    CHECK(rho(k, l) == 0.0);
                    continue;
                }
                loaded = true;
                spend += rho(k, l) * up.fro2(k, l);
            }
            if (loaded) CHECK(spend == doctest::Approx(0.2).epsilon(1e-12));
        }
    }
}

TEST_CASE("centralized allocation: closed forms")
{
    SUBCASE("single UE gets fraction one")
    {
        Bench b(1, 2, 2, 4, 2);
        Eigen::VectorXd rho_norm(1);
        rho_norm << 3.7;
        Eigen::VectorXd rho = power_alloc_centralized(b.net, rho_norm, 0.2, 0.2, 0.5);
        CHECK(rho(0) == doctest::Approx(0.2 / 3.7).epsilon(1e-12));
    }
    SUBCASE("two identical UEs each get half")
    {
        Bench b(2, 2, 2, 4, 2, 6);
        b.net.beta.row(1) = b.net.beta.row(0);
        b.net.cluster = cluster_aps(b.net.beta, 2);
        Eigen::VectorXd rho_norm = Eigen::VectorXd::Constant(2, 2.0);
        Eigen::VectorXd rho = power_alloc_centralized(b.net, rho_norm, 0.2, 0.2, 0.5);
        CHECK(rho(0) == doctest::Approx(0.5 * 0.2 / 2.0).epsilon(1e-12));
        CHECK(rho(1) == doctest::Approx(rho(0)).epsilon(1e-12));
    }
    SUBCASE("fractions are scale-invariant in beta")
    {
        Bench b(3, 4, 2, 4, 2, 7);
        Eigen::VectorXd rho_norm = Eigen::VectorXd::Constant(3, 1.5);
        Eigen::VectorXd r1 = power_alloc_centralized(b.net, rho_norm, 0.2, 0.2, 0.5);
        b.net.beta *= 37.0;
        Eigen::VectorXd r2 = power_alloc_centralized(b.net, rho_norm, 0.2, 0.2, 0.5);
        CHECK((r1 - r2).norm() <= 1e-12 * r1.norm());
    }
}

TEST_CASE("scaling spreads sqrt(rho) over the unit blocks")
{
    Bench b(2, 3, 2, 4, 2, 8);
    auto up = zisi_precoder_unit(b.net, b.G, 4, 2);

    Eigen::MatrixXd rho_kl = Eigen::MatrixXd::Constant(2, 3, 0.04);
    auto Wd = scale_precoders(b.net, up.W, rho_kl);
    Eigen::VectorXd rho_k(2);
    rho_k << 0.09, 0.16;
    auto Wc = scale_precoders(b.net, up.W, rho_k);

    for (int k = 0; k < 2; ++k)
        for (int l : b.net.cluster[k]) {
            const std::size_t i = static_cast<std::size_t>(k) * 3 + l;
            CHECK((Wd[i] - 0.2 * up.W[i]).norm() <= 1e-14 * up.W[i].norm());
            const double s = (k == 0) ? 0.3 : 0.4;
            CHECK((Wc[i] - s * up.W[i]).norm() <= 1e-14 * up.W[i].norm());
        }
}

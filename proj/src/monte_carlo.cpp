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

#include "cfm/monte_carlo.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

#include "cfm/channel.hpp"
#include "cfm/link_sim.hpp"
#include "cfm/precoding.hpp"

namespace cfm {

namespace {

constexpr int kPlacementAttempts = 3;

int mode_slot(Mode m) { return m == Mode::pcal ? 0 : m == Mode::uncal ? 1 : 2; }
int prec_slot(Precoder p) { return p == Precoder::zisi ? 0 : 1; }

struct BlockCache {
    std::vector<Eigen::MatrixXcd> G_dl_cal, G_dl_off;
    std::vector<Eigen::MatrixXcd> Wz_cal, Wz_off, Wp_cal, Wp_off; // unit precoders
    Eigen::MatrixXd fz_cal, fz_off;                               // ZISI block norms
    bool regularized = false;
};

} // namespace

NetworkRealization realize_network(const SystemConfig& cfg, const DerivedConstants& dc,
                                   int setup_id, int* placement_retries)
{
    NetworkRealization net;
    for (int attempt = 0;; ++attempt) {
        try {
            Rng ar = substream(cfg.seed, setup_id, kSetupLevel, RngPurpose::ApPlacement, attempt);
            net.ap_pos = place_aps_hcpp(ar, cfg.L, cfg.area_side_m, dc.d_min_m);
            break;
        } catch (const PlacementFailure&) {
            if (placement_retries) ++*placement_retries;
            if (attempt + 1 == kPlacementAttempts) throw;
        }
    }
    Rng ur = substream(cfg.seed, setup_id, kSetupLevel, RngPurpose::UePlacement);
    net.ue_pos = place_ues_uniform(ur, cfg.K, cfg.area_side_m);
    Rng sr = substream(cfg.seed, setup_id, kSetupLevel, RngPurpose::Shadowing);
    net.beta = large_scale_fading(sr, net.ap_pos, net.ue_pos, cfg);
    net.cluster = cluster_aps(net.beta, cfg.L_k);
    Rng pr = substream(cfg.seed, setup_id, kSetupLevel, RngPurpose::PilotOrder);
    net.pilot_group = assign_pilots(pr, net.beta, net.cluster, cfg.tau_p, cfg.N_UE);
    return net;
}

SetupOutcome run_setup(const SystemConfig& cfg, const DerivedConstants& dc, int setup_id,
                       const SpaceTimeCodebook* cb)
{
    const int K = cfg.K, L = cfg.L, N_AP = cfg.N_AP, N_UE = cfg.N_UE;
    const int n_blocks = cfg.n_blocks_per_setup;
    const double sigma2 = dc.noise_power_W;
    const double eta = cfg.pilot_power_W();
    const double rho_max = cfg.rho_max_W();

    const bool want_pcal = cfg.mode == Mode::all || cfg.mode == Mode::pcal;
    const bool want_uncal = cfg.mode == Mode::all || cfg.mode == Mode::uncal;
    const bool want_dstbc = cfg.mode == Mode::all || cfg.mode == Mode::dstbc;
    const bool want_off = want_uncal || want_dstbc;
    const bool want_coh = want_pcal || want_uncal;
    const bool zisi_on = cfg.precoder == Precoder::all || cfg.precoder == Precoder::zisi;
    const bool pmmse_on = cfg.precoder == Precoder::all || cfg.precoder == Precoder::pmmse;

    SetupOutcome out;
    const NetworkRealization net = realize_network(cfg, dc, setup_id, &out.placement_retries);
    const Eigen::MatrixXcd M = decoding_matrix(N_UE, cfg.N_s);
    const std::vector<UEOffsets> ident = identity_offsets(K, N_UE);

    std::vector<UEOffsets> off_setup;
    if (want_off && !cfg.redraw_offsets_per_block) {
        Rng r = substream(cfg.seed, setup_id, kSetupLevel, RngPurpose::UeOffsets);
        off_setup = draw_ue_offsets(r, K, N_UE);
    }

    // Phase A: channels, estimates and unit precoders per block. Estimates
    // and precoders are cached; the centralized allocation needs the
    // setup-mean precoder norms before any block can be simulated.
    std::vector<BlockCache> cache(n_blocks);
    Eigen::VectorXd rho_norm_p_cal = Eigen::VectorXd::Zero(K);
    Eigen::VectorXd rho_norm_p_off = Eigen::VectorXd::Zero(K);

    for (int b = 0; b < n_blocks; ++b) {
        BlockCache& c = cache[b];
        Rng hr = substream(cfg.seed, setup_id, b, RngPurpose::SmallScale);
        const std::vector<Eigen::MatrixXcd> H = draw_small_scale(hr, K, L, N_AP, N_UE);
        PilotNoise pn;
        if (!cfg.perfect_csi) {
            Rng nr = substream(cfg.seed, setup_id, b, RngPurpose::PilotNoise);
            pn = draw_pilot_noise(nr, L, cfg.tau_p / N_UE, N_UE, N_AP);
        }

        auto build = [&](const std::vector<UEOffsets>& offs, std::vector<Eigen::MatrixXcd>& G_dl,
                         std::vector<Eigen::MatrixXcd>& Wz, Eigen::MatrixXd& fz,
                         std::vector<Eigen::MatrixXcd>& Wp, Eigen::VectorXd& rho_norm_acc) {
            ChannelView v = make_view(net.beta, H, offs, net.pilot_group, cfg, sigma2, pn);
            G_dl = std::move(v.G_dl_true);
            if (zisi_on) {
                UnitPrecoders u = zisi_precoder_unit(net, v.G_ul_hat, N_AP, N_UE);
                c.regularized |= u.regularized;
                Wz = std::move(u.W);
                fz = std::move(u.fro2);
            }
            if (pmmse_on) {
                UnitPrecoders u =
                    pmmse_precoder_unit(net, v.G_ul_hat, v.err_var, eta, sigma2, N_AP, N_UE);
                c.regularized |= u.regularized;
                for (int k = 0; k < K; ++k)
                    for (int l : net.cluster[k]) rho_norm_acc(k) += u.fro2(k, l);
                Wp = std::move(u.W);
            }
        };

        if (want_pcal) build(ident, c.G_dl_cal, c.Wz_cal, c.fz_cal, c.Wp_cal, rho_norm_p_cal);
        if (want_off) {
            if (cfg.redraw_offsets_per_block) {
                Rng r = substream(cfg.seed, setup_id, b, RngPurpose::UeOffsets);
                off_setup = draw_ue_offsets(r, K, N_UE);
            }
            build(off_setup, c.G_dl_off, c.Wz_off, c.fz_off, c.Wp_off, rho_norm_p_off);
        }
    }

    Eigen::VectorXd rho_p_cal, rho_p_off;
    if (pmmse_on) {
        if (want_pcal)
            rho_p_cal = power_alloc_centralized(net, rho_norm_p_cal / n_blocks, rho_max,
                                                cfg.varsigma, cfg.kappa);
        if (want_off)
            rho_p_off = power_alloc_centralized(net, rho_norm_p_off / n_blocks, rho_max,
                                                cfg.varsigma, cfg.kappa);
    }

    // Phase B: scale the cached precoders and run every enabled
    // (mode, precoder) pair on shared per-block symbol and noise draws.
    // Accumulator slot: (mode, precoder, UE) flattened.
    std::vector<std::uint64_t> bits(static_cast<std::size_t>(6) * K, 0);
    std::vector<std::uint64_t> errs(static_cast<std::size_t>(6) * K, 0);
    auto accumulate = [&](Mode m, Precoder p, const BlockResult& r) {
        const std::size_t base = static_cast<std::size_t>(mode_slot(m) * 2 + prec_slot(p)) * K;
        for (int k = 0; k < K; ++k) {
            bits[base + k] += r.bits_total[k];
            errs[base + k] += r.bit_errors[k];
        }
    };

    Eigen::VectorXd ap_pow_cal = Eigen::VectorXd::Zero(L);
    Eigen::VectorXd ap_pow_off = Eigen::VectorXd::Zero(L);

    for (int b = 0; b < n_blocks; ++b) {
        BlockCache& c = cache[b];
        const BlockDraws draws =
            draw_block_randomness(cfg.seed, setup_id, b, cfg, want_coh, want_dstbc);

        if (zisi_on) {
            if (want_pcal) {
                const Eigen::MatrixXd rho = power_alloc_distributed(net, c.fz_cal, rho_max);
                const auto W = scale_precoders(net, c.Wz_cal, rho);
                ap_pow_cal += ap_expected_power(net, W, M);
                accumulate(Mode::pcal, Precoder::zisi,
                           simulate_coherent_block(net, c.G_dl_cal, W, cfg, sigma2, draws));
            }
            if (want_off) {
                const Eigen::MatrixXd rho = power_alloc_distributed(net, c.fz_off, rho_max);
                const auto W = scale_precoders(net, c.Wz_off, rho);
                ap_pow_off += ap_expected_power(net, W, M);
                if (want_uncal)
                    accumulate(Mode::uncal, Precoder::zisi,
                               simulate_coherent_block(net, c.G_dl_off, W, cfg, sigma2, draws));
                if (want_dstbc)
                    accumulate(Mode::dstbc, Precoder::zisi,
                               simulate_dstbc_block(net, c.G_dl_off, W, *cb, cfg, sigma2, draws));
            }
        }
        if (pmmse_on) {
            if (want_pcal) {
                const auto W = scale_precoders(net, c.Wp_cal, rho_p_cal);
                accumulate(Mode::pcal, Precoder::pmmse,
                           simulate_coherent_block(net, c.G_dl_cal, W, cfg, sigma2, draws));
            }
            if (want_off) {
                const auto W = scale_precoders(net, c.Wp_off, rho_p_off);
                if (want_uncal)
                    accumulate(Mode::uncal, Precoder::pmmse,
                               simulate_coherent_block(net, c.G_dl_off, W, cfg, sigma2, draws));
                if (want_dstbc)
                    accumulate(Mode::dstbc, Precoder::pmmse,
                               simulate_dstbc_block(net, c.G_dl_off, W, *cb, cfg, sigma2, draws));
            }
        }
        if (c.regularized) ++out.regularized_blocks;
        c = BlockCache{}; // free as we go
    }

    if (zisi_on) {
        double pmax = 0.0;
        if (want_pcal) pmax = std::max(pmax, ap_pow_cal.maxCoeff() / n_blocks);
        if (want_off) pmax = std::max(pmax, ap_pow_off.maxCoeff() / n_blocks);
        out.max_ap_power_W_distributed = pmax;
        // the sqrt(L_k) block scaling makes the dstbc interval-average spend
        // equal the per-epoch coherent spend of the same precoders
        if (want_dstbc) out.max_ap_power_W_dstbc = ap_pow_off.maxCoeff() / n_blocks;
    }

    const Mode mode_order[3] = {Mode::pcal, Mode::uncal, Mode::dstbc};
    const bool mode_on[3] = {want_pcal, want_uncal, want_dstbc};
    const Precoder prec_order[2] = {Precoder::zisi, Precoder::pmmse};
    const bool prec_on[2] = {zisi_on, pmmse_on};
    for (int mi = 0; mi < 3; ++mi) {
        if (!mode_on[mi]) continue;
        for (int pi = 0; pi < 2; ++pi) {
            if (!prec_on[pi]) continue;
            for (int k = 0; k < K; ++k) {
                TrialMetrics t;
                t.setup_id = setup_id;
                t.ue_id = k;
                t.mode = mode_order[mi];
                t.precoder = prec_order[pi];
                t.bits_total = bits[static_cast<std::size_t>(mi * 2 + pi) * K + k];
                t.bit_errors = errs[static_cast<std::size_t>(mi * 2 + pi) * K + k];
                t.ber = static_cast<double>(t.bit_errors) / static_cast<double>(t.bits_total);
                t.se = se_from_ber(t.ber, prelog_for(t.mode, dc), cfg.M_o);
                out.rows.push_back(t);
            }
        }
    }
    return out;
}

AggregateReport run_monte_carlo(const SystemConfig& cfg, const RunOptions& opt)
{
    const DerivedConstants dc = derive_constants(cfg);
    const bool want_dstbc = cfg.mode == Mode::all || cfg.mode == Mode::dstbc;
    SpaceTimeCodebook cb;
    if (want_dstbc)
        cb = build_codebook(cfg.M_o,
                            cfg.L_k == 2 ? StDesign::alamouti2 : StDesign::ostbc4_rate34);

    const int n = cfg.n_setups;
    std::vector<SetupOutcome> outcomes(n);

    if (opt.threads <= 1 || n <= 1) {
        for (int s = 0; s < n; ++s)
            outcomes[s] = run_setup(cfg, dc, opt.setup_first + s, want_dstbc ? &cb : nullptr);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr err;
        std::mutex err_mu;
        auto worker = [&] {
            for (;;) {
                const int s = next.fetch_add(1);
                if (s >= n) return;
                try {
                    outcomes[s] =
                        run_setup(cfg, dc, opt.setup_first + s, want_dstbc ? &cb : nullptr);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        const int nt = std::min(opt.threads, n);
        pool.reserve(nt);
        for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (err) std::rethrow_exception(err);
    }

    AggregateReport rep;
    rep.cfg = cfg;
    rep.derived = dc;
    for (SetupOutcome& o : outcomes) {
        rep.max_ap_power_W_distributed =
            std::max(rep.max_ap_power_W_distributed, o.max_ap_power_W_distributed);
        rep.max_ap_power_W_dstbc = std::max(rep.max_ap_power_W_dstbc, o.max_ap_power_W_dstbc);
        rep.regularized_blocks += o.regularized_blocks;
        rep.placement_retries += o.placement_retries;
        rep.rows.insert(rep.rows.end(), std::make_move_iterator(o.rows.begin()),
                        std::make_move_iterator(o.rows.end()));
    }
    return rep;
}

} // namespace cfm

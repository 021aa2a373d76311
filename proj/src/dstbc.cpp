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

#include "cfm/dstbc.hpp"

#include <cmath>
#include <limits>

#include "cfm/psk.hpp"

namespace cfm {

namespace dstbc_detail {
thread_local std::uint64_t metric_evals = 0;
} // namespace dstbc_detail

namespace {

constexpr int kReorthPeriod = 32;

int design_dim(StDesign d) { return d == StDesign::alamouti2 ? 2 : 4; }
int design_syms(StDesign d) { return d == StDesign::alamouti2 ? 2 : 3; }
double design_scale(StDesign d) { return d == StDesign::alamouti2 ? 1.0 / std::sqrt(2.0) : 1.0 / std::sqrt(3.0); }

} // namespace

Eigen::MatrixXcd st_codeword(StDesign design, const std::complex<double>* s)
{
    using std::conj;
    const double a = design_scale(design);
    if (design == StDesign::alamouti2) {
        Eigen::MatrixXcd X(2, 2);
        X << s[0], s[1], //
            -conj(s[1]), conj(s[0]);
        return a * X;
    }
    if (design == StDesign::ostbc4_rate34) {
        const std::complex<double> z = 0.0;
        Eigen::MatrixXcd X(4, 4);
        X << s[0], s[1], s[2], z, //
            -conj(s[1]), conj(s[0]), z, s[2], //
            -conj(s[2]), z, conj(s[0]), -s[1], //
            z, -conj(s[2]), conj(s[1]), s[0];
        return a * X;
    }
    throw std::invalid_argument("st_codeword: unsupported design");
}

SpaceTimeCodebook build_codebook(int M_o, StDesign design)
{
    SpaceTimeCodebook cb;
    cb.design = design;
    cb.L_k = design_dim(design);
    cb.n_s = design_syms(design);
    cb.M_o = M_o;
    cb.constellation.resize(M_o);
    for (int m = 0; m < M_o; ++m) cb.constellation[m] = psk_point(m, M_o);

    int count = 1;
    for (int i = 0; i < cb.n_s; ++i) count *= M_o;
    cb.entries.reserve(count);
    int tuple[3];
    std::complex<double> s[3];
    for (int idx = 0; idx < count; ++idx) {
        cb.tuple_of(idx, tuple);
        for (int i = 0; i < cb.n_s; ++i) s[i] = cb.constellation[tuple[i]];
        cb.entries.push_back(st_codeword(design, s));
    }
    return cb;
}

std::vector<std::vector<int>> segment_stream(const std::vector<int>& symbols, int n_s, int G)
{
    if (static_cast<int>(symbols.size()) != (G - 1) * n_s)
        throw std::invalid_argument("segment_stream: symbol count does not equal (G-1)*n_s");
    std::vector<std::vector<int>> seg(G - 1);
    for (int t = 0; t < G - 1; ++t)
        seg[t].assign(symbols.begin() + t * n_s, symbols.begin() + (t + 1) * n_s);
    return seg;
}

const Eigen::MatrixXcd& differential_encode(EncoderState& state, const Eigen::MatrixXcd& X)
{
    state.C_prev = (state.C_prev * X).eval();
    if (++state.encodings % kReorthPeriod == 0) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(state.C_prev,
                                               Eigen::ComputeThinU | Eigen::ComputeThinV);
        state.C_prev = svd.matrixU() * svd.matrixV().adjoint();
    }
    return state.C_prev;
}

Eigen::RowVectorXcd rows_for_ap(const Eigen::MatrixXcd& C_prev, const Eigen::MatrixXcd& X, int m)
{
    if (m < 1 || m > C_prev.rows()) throw std::out_of_range("rows_for_ap: row index out of range");
    return C_prev.row(m - 1) * X;
}

Eigen::MatrixXcd build_block(const std::vector<Eigen::RowVectorXcd>& rows)
{
    if (rows.empty()) throw std::invalid_argument("build_block: no stream rows");
    Eigen::MatrixXcd B(static_cast<int>(rows.size()), rows[0].cols());
    for (int j = 0; j < B.rows(); ++j) {
        if (rows[j].cols() != B.cols()) throw std::invalid_argument("build_block: row length mismatch");
        B.row(j) = rows[j];
    }
    return B;
}

Eigen::MatrixXcd extract_stream(const Eigen::MatrixXcd& Y, int j, int N_b)
{
    if (j < 1 || static_cast<Eigen::Index>(j) * N_b > Y.rows())
        throw std::out_of_range("extract_stream: stream index out of range");
    return Y.middleRows((j - 1) * N_b, N_b);
}

FullDetect detect_ml_full(const Eigen::MatrixXcd& Y_t, const Eigen::MatrixXcd& Y_tm1,
                          const SpaceTimeCodebook& cb)
{
    const Eigen::MatrixXcd D = Y_t.adjoint() * Y_tm1;
    const Eigen::MatrixXcd Dt = D.transpose();
    double best = -std::numeric_limits<double>::infinity();
    int best_idx = 0;
    for (int i = 0; i < static_cast<int>(cb.entries.size()); ++i) {
        // Re tr{X D} = Re sum_{a,b} X(a,b) D(b,a)
        const double metric = cb.entries[i].cwiseProduct(Dt).sum().real();
        if (metric > best) { best = metric; best_idx = i; }
    }
    FullDetect r;
    r.index = best_idx;
    cb.tuple_of(best_idx, r.tuple);
    return r;
}

void detect_ml_decoupled(const Eigen::MatrixXcd& Y_t, const Eigen::MatrixXcd& Y_tm1,
                         const SpaceTimeCodebook& cb, int* out)
{
    using std::conj;
    const Eigen::MatrixXcd D = Y_t.adjoint() * Y_tm1;
    const double a = design_scale(cb.design);

    // Re tr{X D} = a * sum_i Re{ s_i * gamma_i }: the orthogonal design makes
    // the metric separable, so each slot is maximized on its own.
    std::complex<double> gamma[3];
    if (cb.design == StDesign::alamouti2) {
        gamma[0] = D(0, 0) + conj(D(1, 1));
        gamma[1] = D(1, 0) - conj(D(0, 1));
    } else {
        gamma[0] = D(0, 0) + D(3, 3) + conj(D(1, 1)) + conj(D(2, 2));
        gamma[1] = D(1, 0) - D(3, 2) - conj(D(0, 1)) + conj(D(2, 3));
        gamma[2] = D(2, 0) + D(3, 1) - conj(D(0, 2)) - conj(D(1, 3));
    }

    for (int i = 0; i < cb.n_s; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int m = 0; m < cb.M_o; ++m) {
            const double v = a * (cb.constellation[m] * gamma[i]).real();
            ++dstbc_detail::metric_evals;
            if (v > best) { best = v; arg = m; }
        }
        out[i] = arg;
    }
}

} // namespace cfm

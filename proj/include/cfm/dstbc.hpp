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
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace cfm {

enum class StDesign {
    alamouti2,     // 2x2, n_s = 2, rate 1
    ostbc4_rate34, // 4x4, n_s = 3, rate 3/4
};

/// Unitary space-time codeword for a tuple of unit-modulus symbols.
/// alamouti2:      (s1,s2)    -> (1/sqrt2) [[s1, s2], [-s2*, s1*]]
/// ostbc4_rate34:  (s1,s2,s3) -> (1/sqrt3) [[s1,s2,s3,0], [-s2*,s1*,0,s3],
///                                          [-s3*,0,s1*,-s2], [0,-s3*,s2*,s1]]
Eigen::MatrixXcd st_codeword(StDesign design, const std::complex<double>* s);

struct SpaceTimeCodebook {
    StDesign design;
    int L_k;  // codeword dimension
    int n_s;  // symbols per codeword
    int M_o;  // constellation size
    std::vector<std::complex<double>> constellation; // M_o-PSK points
    std::vector<Eigen::MatrixXcd> entries;           // M_o^{n_s} unitary matrices

    /// Entry index of a symbol tuple; slot 0 is the most significant digit,
    /// so index order equals lexicographic tuple order.
    int index_of(const int* tuple) const
    {
        int idx = 0;
        for (int i = 0; i < n_s; ++i) idx = idx * M_o + tuple[i];
        return idx;
    }
    void tuple_of(int index, int* tuple) const
    {
        for (int i = n_s - 1; i >= 0; --i) { tuple[i] = index % M_o; index /= M_o; }
    }
};

/// All M_o^{n_s} codewords over the M_o-PSK constellation.
SpaceTimeCodebook build_codebook(int M_o, StDesign design);

/// Split a stream of (G-1)*n_s constellation indices into G-1 segments of n_s.
std::vector<std::vector<int>> segment_stream(const std::vector<int>& symbols, int n_s, int G);

/// Differential encoder state for one (UE, stream).
struct EncoderState {
    Eigen::MatrixXcd C_prev; // cumulative codeword, starts at identity
    int encodings = 0;
    explicit EncoderState(int L_k) : C_prev(Eigen::MatrixXcd::Identity(L_k, L_k)) {}
};

/// C_t = C_{t-1} * X, stored back into the state. A polar correction
/// (SVD U*V^H) is applied every 32 encodings to bound unitarity drift.
const Eigen::MatrixXcd& differential_encode(EncoderState& state, const Eigen::MatrixXcd& X);

/// Row m (1-based) of C_prev * X, i.e. the row of C^t assigned to the AP with
/// cluster position m.
Eigen::RowVectorXcd rows_for_ap(const Eigen::MatrixXcd& C_prev, const Eigen::MatrixXcd& X, int m);

/// Stack per-stream transmit rows into B^t (N_s x L_k).
Eigen::MatrixXcd build_block(const std::vector<Eigen::RowVectorXcd>& rows);

/// Rows (j-1)*N_b .. j*N_b - 1 of Y (j is 1-based): antenna group j.
Eigen::MatrixXcd extract_stream(const Eigen::MatrixXcd& Y, int j, int N_b);

struct FullDetect {
    int index;    // codebook entry index
    int tuple[3]; // first n_s entries valid
};

/// Exhaustive argmax over the codebook of Re tr{ X * Y_t^H * Y_tm1 };
/// ties broken by lowest entry index.
FullDetect detect_ml_full(const Eigen::MatrixXcd& Y_t, const Eigen::MatrixXcd& Y_tm1,
                          const SpaceTimeCodebook& cb);

/// Symbol-wise detection: the trace metric separates into independent linear
/// terms per symbol for orthogonal designs; each slot is maximized over the
/// constellation independently (ties to the lowest point index). Writes n_s
/// indices into `out`. Agrees with detect_ml_full whenever the full-search
/// maximizer is unique, and on ties by construction of the index order.
void detect_ml_decoupled(const Eigen::MatrixXcd& Y_t, const Eigen::MatrixXcd& Y_tm1,
                         const SpaceTimeCodebook& cb, int* out);

namespace dstbc_detail {
/// Metric-evaluation counter for complexity assertions (per thread).
extern thread_local std::uint64_t metric_evals;
} // namespace dstbc_detail

} // namespace cfm

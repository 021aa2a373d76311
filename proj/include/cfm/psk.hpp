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

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>

namespace cfm {

// Gray-labeled M-PSK. Constellation index m carries the point
// exp(j*2*pi*m/M); its bit label is gray_encode(m). Transmit side maps bit
// words through gray_decode so adjacent points differ in one bit.

inline std::complex<double> psk_point(int m, int M)
{
    const double a = 2.0 * std::numbers::pi * m / M;
    return {std::cos(a), std::sin(a)};
}

inline int gray_encode(int m) { return m ^ (m >> 1); }

inline int gray_decode(int v)
{
    int m = v;
    for (int s = 1; s < 32; s <<= 1) m ^= m >> s;
    return m;
}

inline int log2_int(int M)
{
    int b = 0;
    while ((1 << b) < M) ++b;
    return b;
}

// Hamming distance between the Gray labels of two constellation indices.
inline int gray_bit_errors(int m_tx, int m_rx)
{
    return std::popcount(static_cast<unsigned>(gray_encode(m_tx) ^ gray_encode(m_rx)));
}

// Index of the M-PSK point with the smallest angular distance to arg(z);
// exact boundary ties go to the lower index, z = 0 maps to index 0.
inline int slice_psk(std::complex<double> z, int M)
{
    if (z == std::complex<double>(0.0, 0.0)) return 0;
    const double sector = 2.0 * std::numbers::pi / M;
    const double t = std::arg(z) / sector; // in [-M/2, M/2]
    const double f = std::floor(t);
    const double frac = t - f;
    const int lo = ((static_cast<int>(f) % M) + M) % M;
    const int hi = (lo + 1) % M;
    if (frac < 0.5) return lo;
    if (frac > 0.5) return hi;
    return std::min(lo, hi);
}

} // namespace cfm

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
#include <initializer_list>
#include <random>

namespace cfm {

// Every random draw in the simulator comes from a substream keyed by
// (master seed, setup index, block index, purpose, entity). This makes each
// draw a pure function of its key: reruns are byte-identical, setups can be
// re-executed in isolation, and results do not depend on the thread count.

enum class RngPurpose : std::uint64_t {
    ApPlacement = 1,
    UePlacement,
    Shadowing,
    PilotOrder,
    UeOffsets,
    SmallScale,
    PilotNoise,
    SymbolsCoherent,
    SymbolsDstbc,
    DataNoise,
};

// Block id used for draws that happen once per setup.
inline constexpr std::uint64_t kSetupLevel = ~std::uint64_t{0};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t mix_keys(std::initializer_list<std::uint64_t> keys);

// mt19937_64 (output pinned by the standard) with explicit Box-Muller
// normals; std::normal_distribution is implementation-defined and would
// break cross-platform reproducibility.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform on [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double normal();

    // CN(0,1): real and imaginary parts N(0, 1/2)
    std::complex<double> cnormal();

    std::uint64_t raw() { return gen_(); }

    // integer in [0, n), rejection-free enough for permutation shuffles
    std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

Rng substream(std::uint64_t master, std::uint64_t setup, std::uint64_t block, RngPurpose purpose,
              std::uint64_t entity = 0);

} // namespace cfm

// SPDX-License-Identifier: Apache-2.0
//
// hadoa - direction-of-arrival estimation for hybrid analog-digital arrays
// Copyright (C) 2026 The hadoa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef HADOA_RANDOM_HPP
#define HADOA_RANDOM_HPP

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace hadoa
{
    // SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective 64-bit mixer.
    std::uint64_t splitmix64(std::uint64_t x);

    // Derives a child seed from a master seed and a path of indices, e.g.
    // derive_seed(master, {snr_index, trial_index}). Order-sensitive, so
    // {1, 2} and {2, 1} give unrelated streams. Used for per-trial seeds so
    // that Monte Carlo results do not depend on scheduling.
    std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

    // Deterministic random source: std::mt19937_64 seeded through splitmix64.
    // Not thread safe; each worker owns its own instance.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed);

        double uniform();                                  // [0, 1)
        double normal();                                   // N(0, 1)
        std::complex<double> complex_normal(double variance); // CN(0, variance), circular
        std::uint64_t next_u64();

    private:
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_{0.0, 1.0};
    };
}

#endif

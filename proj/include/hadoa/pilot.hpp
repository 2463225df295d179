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

#ifndef HADOA_PILOT_HPP
#define HADOA_PILOT_HPP

#include "hadoa/array_model.hpp"
#include "hadoa/combiner.hpp"
#include "hadoa/music.hpp"

#include <cstdint>
#include <vector>

namespace hadoa
{
    // K_p pilot slots, one unit-modulus pilot symbol and one random-phase combiner per slot.
    class PilotSchedule
    {
    public:
        PilotSchedule(std::vector<cplx> pilot_symbols, std::uint64_t combiner_seed);

        // Pilots e^{i 2 pi u}, u uniform, drawn from seed.
        static PilotSchedule random(int num_slots, std::uint64_t seed);

        int num_slots() const { return static_cast<int>(pilots_.size()); }
        const std::vector<cplx> &pilots() const { return pilots_; }
        std::uint64_t combiner_seed() const { return combiner_seed_; }

        // random_phase_combiner(M, L, derive_seed(combiner_seed, {k})).
        Combiner combiner(int k, int M, int L) const;

    private:
        std::vector<cplx> pilots_;
        std::uint64_t combiner_seed_;
    };

    struct VirtualObservation
    {
        CMatrix frames;                  // (K_p L) x frames, column n stacks z_{k,n} over k
        CMatrix stacked;                 // G: (K_p L) x M, row block k is W_k^H
        std::vector<Combiner> combiners; // W_k in slot order
        int chains = 0;

        int dimension() const { return static_cast<int>(frames.rows()); }
        int num_frames() const { return static_cast<int>(frames.cols()); }
    };

    // Slot k, frame n: x = sum_i a(theta_i) p_k s_{i,n} + w, z = conj(p_k) W_k^H x.
    // Source symbols s_{i,n} are common to all slots, noise is fresh.
    VirtualObservation collect_virtual_observation(const ArrayGeometry &geometry, const SourceScenario &scenario,
                                                   const NoiseSpec &noise, const PilotSchedule &schedule, int L,
                                                   int frames_per_slot, std::uint64_t seed);

    // Same with explicit per-slot combiners (one per pilot).
    VirtualObservation collect_virtual_observation(const ArrayGeometry &geometry, const SourceScenario &scenario,
                                                   const NoiseSpec &noise, const std::vector<cplx> &pilots,
                                                   const std::vector<Combiner> &combiners, int frames_per_slot,
                                                   std::uint64_t seed);

    // Block-diagonal (W_k^H W_k)^(-1/2) applied to frames and to G.
    VirtualObservation whiten(const VirtualObservation &obs);

    // MUSIC on the stacked-frame covariance with effective steering G a(theta).
    DoaEstimate virtual_music(const VirtualObservation &obs, const ArrayGeometry &geometry, int K, const SpectrumGrid &grid,
                              bool allow_fallback = false);

    // Single-source estimate maximizing the frame-averaged correlation power
    // sum_n |(G a)^H z_n|^2 / ||G a||^2.
    DoaEstimate matched_filter_estimate(const VirtualObservation &obs, const ArrayGeometry &geometry, const SpectrumGrid &grid);
}

#endif

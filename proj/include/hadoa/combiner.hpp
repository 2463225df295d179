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

#ifndef HADOA_COMBINER_HPP
#define HADOA_COMBINER_HPP

#include "hadoa/array_model.hpp"
#include "hadoa/random.hpp"
#include "hadoa/types.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace hadoa
{
    // Every RF chain sees every antenna through a phase shifter.
    struct FullyConnected
    {
    };

    // RF chain l owns antennas [l*s, (l+1)*s).
    struct PartiallyConnected
    {
        int subarray_size = 1;
    };

    // Switches instead of phase shifters: each chain sums active_per_chain antennas.
    struct SwitchBased
    {
        int active_per_chain = 1;
        bool allow_overlap = false;
    };

    // Antennas are grouped in num_subarrays contiguous subarrays; a switch
    // between chain l and subarray s connects the whole subarray.
    struct DynamicSubarray
    {
        int num_subarrays = 1;
        double closure_ratio = 1.0;
        int switch_offset = 0;
    };

    using CombinerSpec = std::variant<FullyConnected, PartiallyConnected, SwitchBased, DynamicSubarray>;

    // Short tag: fc, pc, se or hds.
    std::string architecture_tag(const CombinerSpec &spec);

    // Round-trippable text form, e.g. "hds:num_subarrays=4:closure_ratio=0.5:switch_offset=0".
    std::string spec_to_string(const CombinerSpec &spec);
    CombinerSpec spec_from_string(const std::string &text);

    // Number of closed switches for an HDS spec with L chains (round half up).
    int hds_closed_count(const DynamicSubarray &spec, int num_chains);

    // Analog combining matrix W (M x L) with its architecture.
    class Combiner
    {
    public:
        Combiner(CMatrix matrix, CombinerSpec spec);

        const CMatrix &matrix() const { return matrix_; }
        const CombinerSpec &spec() const { return spec_; }
        int num_antennas() const { return static_cast<int>(matrix_.rows()); }
        int num_chains() const { return static_cast<int>(matrix_.cols()); }

        // True iff ||W^H W - I||_F <= 1e-10.
        bool column_normalized() const { return column_normalized_; }

    private:
        CMatrix matrix_;
        CombinerSpec spec_;
        bool column_normalized_;
    };

    // Default combiner for an architecture. Phases come from DFT columns
    // k_l = floor(l*M/L), i.e. steering vectors on a uniform sine grid, masked
    // to the architecture's support and normalized per column. SE picks
    // contiguous blocks, HDS closes switches round robin. The seed is accepted
    // for interface symmetry; the default construction is deterministic.
    Combiner build_combiner(const CombinerSpec &spec, int M, int L, std::uint64_t seed = 0);

    // Checks (M, L) against the spec constraints; throws ConfigError naming the violation.
    void check_spec(const CombinerSpec &spec, int M, int L);

    // Y = W^H X. Throws DimensionError when X is not antenna-domain with M rows.
    SnapshotMatrix apply_combiner(const Combiner &c, const SnapshotMatrix &x);

    // W^H a(theta).
    CVector effective_steering(const Combiner &c, const ArrayGeometry &geometry, double angle_deg);

    // Human-readable constraint violations; empty means valid.
    std::vector<std::string> validate(const Combiner &c);

    // Rounds the phase of each nonzero entry to the nearest multiple of 2 pi / 2^bits.
    Combiner quantize_phases(const Combiner &c, int bits);

    // (W^H W)^(-1/2); identity when the columns are already orthonormal.
    CMatrix whitening_matrix(const Combiner &c);

    // Fully connected combiner with i.i.d. uniform phases and modulus 1/sqrt(M).
    Combiner random_phase_combiner(int M, int L, std::uint64_t seed);

    // Columns are the given unit-norm DFT columns e^{i 2 pi m k / M} / sqrt(M), times optional phases.
    Combiner dft_combiner(int M, const std::vector<int> &columns, const std::vector<cplx> &phases = {});

    // Switch combiner whose column l selects the antennas in rows[l] with weight 1/sqrt(|rows[l]|).
    Combiner selection_combiner(int M, const std::vector<std::vector<int>> &rows, bool allow_overlap = false);

    // HDS combiner from an explicit L x S switch pattern; entry (m, l) takes the
    // phase of phases(m, l) (M x L). The closure ratio is set to match the pattern.
    Combiner hds_combiner(int M, int num_subarrays, const std::vector<std::vector<bool>> &switches,
                          const CMatrix &phases, int switch_offset = 0);

    // Support pattern of the spec's default construction (true = nonzero).
    std::vector<std::vector<bool>> default_support(const CombinerSpec &spec, int M, int L);

    // Same support as the default construction, i.i.d. uniform phases.
    Combiner random_support_combiner(const CombinerSpec &spec, int M, int L, Rng &rng);

    // Y = W^H (A S) + W^H N with N ~ CN(0, sigma^2 I), drawn directly in the
    // RF-chain domain as CN(0, sigma^2 W^H W).
    SnapshotMatrix observe(const Combiner &c, const SignalBlock &block, const NoiseSpec &noise, Rng &rng);
}

#endif

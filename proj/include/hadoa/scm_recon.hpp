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

#ifndef HADOA_SCM_RECON_HPP
#define HADOA_SCM_RECON_HPP

#include "hadoa/array_model.hpp"
#include "hadoa/combiner.hpp"
#include "hadoa/types.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace hadoa
{
    // Combiners switched across T training slots, all M x L.
    class ReconstructionPlan
    {
    public:
        ReconstructionPlan(std::vector<Combiner> combiners, int snapshots_per_slot);

        const std::vector<Combiner> &combiners() const { return combiners_; }
        int snapshots_per_slot() const { return snapshots_per_slot_; }
        int num_antennas() const { return combiners_.front().num_antennas(); }
        int num_chains() const { return combiners_.front().num_chains(); }
        int num_slots() const { return static_cast<int>(combiners_.size()); }

    private:
        std::vector<Combiner> combiners_;
        int snapshots_per_slot_;
    };

    // ceil(M^2 / L^2): fewest slots an entrywise plan can be full rank with.
    int minimum_entrywise_slots(int M, int L);

    enum class ReconMode
    {
        entrywise,
        toeplitz
    };

    struct IdentifiabilityReport
    {
        int numerical_rank = 0;
        int unknowns = 0;
        double condition_estimate = 0.0;
        bool feasible = false;
        bool structured = false; // solved by pair averaging in a common orthonormal basis
    };

    // Condition estimates above this raise IdentifiabilityError.
    inline constexpr double max_condition = 1e8;

    // Largest M handled by the dense entrywise solver (M^2 complex unknowns).
    inline constexpr int max_dense_entrywise_M = 32;

    // Least squares for vec(R) from {W_t^H R W_t = R_t}. Plans whose columns
    // are unit-phase multiples of identity or DFT columns are solved by
    // averaging in that basis; the rest go through a dense pseudo-inverse.
    // The operator is factored once, solve() may then be called repeatedly.
    class EntrywiseSolver
    {
    public:
        explicit EntrywiseSolver(const ReconstructionPlan &plan, bool allow_min_norm = false);
        ~EntrywiseSolver();
        EntrywiseSolver(EntrywiseSolver &&) noexcept;

        const IdentifiabilityReport &report() const { return report_; }
        CovarianceMatrix solve(const std::vector<CovarianceMatrix> &hybrid_scms) const;

    private:
        struct Impl;
        std::unique_ptr<Impl> impl_;
        IdentifiabilityReport report_;
    };

    // Least squares over the 2M-1 real lag parameters of a Hermitian Toeplitz R.
    class ToeplitzSolver
    {
    public:
        explicit ToeplitzSolver(const ReconstructionPlan &plan);
        ~ToeplitzSolver();
        ToeplitzSolver(ToeplitzSolver &&) noexcept;

        const IdentifiabilityReport &report() const { return report_; }
        CovarianceMatrix solve(const std::vector<CovarianceMatrix> &hybrid_scms) const;

        // Lags r_0 .. r_{M-1} of a Hermitian Toeplitz matrix, R[m, n] = r_{m-n} for m >= n.
        static CVector lags(const CovarianceMatrix &toeplitz);

    private:
        struct Impl;
        std::unique_ptr<Impl> impl_;
        IdentifiabilityReport report_;
    };

    IdentifiabilityReport identifiability_report(const ReconstructionPlan &plan, ReconMode mode = ReconMode::entrywise);

    // Throws IdentifiabilityError unless the plan is feasible (unless allow_min_norm).
    CovarianceMatrix entrywise_reconstruct(const ReconstructionPlan &plan, const std::vector<CovarianceMatrix> &hybrid_scms,
                                           bool allow_min_norm = false);
    CovarianceMatrix toeplitz_reconstruct(const ReconstructionPlan &plan, const std::vector<CovarianceMatrix> &hybrid_scms);

    // Block SCM of all chains of all combiners applied to the same snapshots: (1/N) (B^H X)(B^H X)^H.
    CovarianceMatrix block_hybrid_scm(const std::vector<Combiner> &combiners, const SnapshotMatrix &x);

    // R = (B^+)^H R_block B^+ with B = [W_1 ... W_T]. R_block is TL x TL.
    CovarianceMatrix beamspace_reconstruct(const std::vector<Combiner> &combiners, const CovarianceMatrix &block_scm);

    // Hardware-faithful variant: only the diagonal blocks W_t^H R W_t are
    // measured, which is the entrywise system.
    CovarianceMatrix beamspace_reconstruct(const std::vector<Combiner> &combiners,
                                           const std::vector<CovarianceMatrix> &diagonal_blocks);

    // Nearest PSD matrix in Frobenius norm (eigenvalues clipped at 0).
    CovarianceMatrix psd_project(const CovarianceMatrix &r);

    // W_t^H R W_t for every slot.
    std::vector<CovarianceMatrix> project_covariance(const ReconstructionPlan &plan, const CMatrix &r);

    // DFT column sets of the default plan. Columns are split into G groups of
    // g = floor(L/2) indices with stride G; slot j uses the union of one
    // pair of groups, padded cyclically to L columns. num_slots = 0 means one
    // slot per group pair; larger values cycle through the pairs.
    std::vector<std::vector<int>> dft_pair_columns(int M, int L, int num_slots = 0);

    ReconstructionPlan dft_pair_plan(int M, int L, int num_slots, int snapshots_per_slot);

    // Switch plan with one antenna per chain, same pairing over antenna indices.
    ReconstructionPlan selection_pair_plan(int M, int L, int num_slots, int snapshots_per_slot);

    // Default-support combiners of the given architecture with i.i.d. phases.
    // HDS slots advance the switch offset by one per slot.
    ReconstructionPlan random_plan(const CombinerSpec &spec, int M, int L, int num_slots, int snapshots_per_slot,
                                   std::uint64_t seed);
}

#endif

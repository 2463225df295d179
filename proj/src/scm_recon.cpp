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

#include "hadoa/scm_recon.hpp"
#include "hadoa/hermitian_eig.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <set>

namespace hadoa
{
    namespace
    {
        constexpr double basis_tol = 1e-9;

        // Columns of a unitary basis U for which every combiner column is phi * u_k.
        struct BasisMatch
        {
            CMatrix basis; // empty means identity
            std::vector<std::vector<int>> index;
            std::vector<std::vector<cplx>> phase;
        };

        bool match_basis(const ReconstructionPlan &plan, const CMatrix *basis, BasisMatch &out)
        {
            const int M = plan.num_antennas();
            out.index.assign(static_cast<std::size_t>(plan.num_slots()), {});
            out.phase.assign(static_cast<std::size_t>(plan.num_slots()), {});
            for (int t = 0; t < plan.num_slots(); ++t)
            {
                const CMatrix &w = plan.combiners()[static_cast<std::size_t>(t)].matrix();
                const CMatrix coeff = basis ? CMatrix(basis->adjoint() * w) : w;
                for (Eigen::Index a = 0; a < w.cols(); ++a)
                {
                    Eigen::Index k = 0;
                    coeff.col(a).cwiseAbs().maxCoeff(&k);
                    const cplx phi = coeff(k, a);
                    if (std::abs(std::abs(phi) - 1.0) > basis_tol)
                        return false;
                    const double resid = std::sqrt(std::max(0.0, coeff.col(a).squaredNorm() - std::norm(phi)));
                    if (resid > basis_tol || std::abs(w.col(a).squaredNorm() - 1.0) > basis_tol)
                        return false;
                    out.index[static_cast<std::size_t>(t)].push_back(static_cast<int>(k));
                    out.phase[static_cast<std::size_t>(t)].push_back(phi);
                }
            }
            if (basis)
                out.basis = *basis;
            (void)M;
            return true;
        }

        CMatrix unitary_dft(int M)
        {
            CMatrix f(M, M);
            for (int m = 0; m < M; ++m)
                for (int k = 0; k < M; ++k)
                    f(m, k) = std::polar(1.0 / std::sqrt(static_cast<double>(M)),
                                         2.0 * pi * static_cast<double>((static_cast<long long>(m) * k) % M) / M);
            return f;
        }

        void check_inputs(const ReconstructionPlan &plan, const std::vector<CovarianceMatrix> &hybrid)
        {
            if (static_cast<int>(hybrid.size()) != plan.num_slots())
                throw DimensionError(fmt::format("plan has {} slots but {} hybrid covariances were given",
                                                 plan.num_slots(), hybrid.size()));
            for (const auto &h : hybrid)
                if (h.dimension() != plan.num_chains())
                    throw DimensionError(fmt::format("hybrid covariance is {}x{}, plan has L = {}",
                                                     h.dimension(), h.dimension(), plan.num_chains()));
        }

        template <class Svd>
        void fill_report(const Svd &svd, Eigen::Index rows, Eigen::Index cols, IdentifiabilityReport &rep)
        {
            const auto &s = svd.singularValues();
            const double smax = s.size() ? s(0) : 0.0;
            const double tol = smax * static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
            int rank = 0;
            for (Eigen::Index i = 0; i < s.size(); ++i)
                rank += s(i) > tol ? 1 : 0;
            rep.numerical_rank = rank;
            rep.unknowns = static_cast<int>(cols);
            const double smin = (s.size() == cols && cols > 0) ? s(cols - 1) : 0.0;
            rep.condition_estimate = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
            rep.feasible = rank == cols && rep.condition_estimate <= max_condition;
        }

        template <class Svd, class Mat>
        Mat pseudo_inverse(const Svd &svd, int rank)
        {
            const auto &u = svd.matrixU();
            const auto &v = svd.matrixV();
            const auto &s = svd.singularValues();
            Mat vs = v.leftCols(rank);
            for (int i = 0; i < rank; ++i)
                vs.col(i) /= s(i);
            return vs * u.leftCols(rank).adjoint();
        }

        [[noreturn]] void throw_unidentifiable(const char *route, const IdentifiabilityReport &rep)
        {
            throw IdentifiabilityError(
                fmt::format("{} reconstruction is not identifiable: numerical rank {} of {} unknowns, condition estimate {:.3e}",
                            route, rep.numerical_rank, rep.unknowns, rep.condition_estimate),
                rep.numerical_rank, rep.unknowns, rep.condition_estimate);
        }

        CovarianceMatrix hermitian_part(const CMatrix &r)
        {
            return CovarianceMatrix(0.5 * (r + r.adjoint()), CovRole::reconstructed);
        }
    }

    ReconstructionPlan::ReconstructionPlan(std::vector<Combiner> combiners, int snapshots_per_slot)
        : combiners_(std::move(combiners)), snapshots_per_slot_(snapshots_per_slot)
    {
        if (combiners_.empty())
            throw ConfigError("reconstruction plan needs at least one combiner");
        if (snapshots_per_slot < 1)
            throw ConfigError(fmt::format("snapshots per slot must be positive, got {}", snapshots_per_slot));
        const int M = combiners_.front().num_antennas(), L = combiners_.front().num_chains();
        for (const auto &c : combiners_)
            if (c.num_antennas() != M || c.num_chains() != L)
                throw ConfigError(fmt::format("plan combiners must share (M, L) = ({}, {}), got ({}, {})",
                                              M, L, c.num_antennas(), c.num_chains()));
    }

    int minimum_entrywise_slots(int M, int L) { return (M * M + L * L - 1) / (L * L); }

    // ---------------------------------------------------------------- entrywise

    struct EntrywiseSolver::Impl
    {
        int M = 0, L = 0;
        bool structured = false;
        BasisMatch match;
        Eigen::MatrixXi counts;
        CMatrix pinv; // dense path
    };

    EntrywiseSolver::EntrywiseSolver(const ReconstructionPlan &plan, bool allow_min_norm) : impl_(std::make_unique<Impl>())
    {
        Impl &im = *impl_;
        im.M = plan.num_antennas();
        im.L = plan.num_chains();
        const int M = im.M, L = im.L;

        bool found = match_basis(plan, nullptr, im.match);
        if (!found)
        {
            const CMatrix f = unitary_dft(M);
            found = match_basis(plan, &f, im.match);
        }

        if (found)
        {
            im.structured = true;
            im.counts = Eigen::MatrixXi::Zero(M, M);
            for (int t = 0; t < plan.num_slots(); ++t)
            {
                const auto &idx = im.match.index[static_cast<std::size_t>(t)];
                for (int a = 0; a < L; ++a)
                    for (int b = 0; b < L; ++b)
                        ++im.counts(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
            }
            int covered = 0, cmax = 0, cmin = std::numeric_limits<int>::max();
            for (int j = 0; j < M; ++j)
                for (int i = 0; i < M; ++i)
                    if (im.counts(i, j) > 0)
                    {
                        ++covered;
                        cmax = std::max(cmax, im.counts(i, j));
                        cmin = std::min(cmin, im.counts(i, j));
                    }
            report_.structured = true;
            report_.unknowns = M * M;
            report_.numerical_rank = covered;
            report_.condition_estimate = covered == M * M ? std::sqrt(static_cast<double>(cmax) / cmin)
                                                          : std::numeric_limits<double>::infinity();
            report_.feasible = covered == M * M && report_.condition_estimate <= max_condition;
        }
        else
        {
            if (M > max_dense_entrywise_M)
                throw ConfigError(fmt::format("dense entrywise reconstruction supports M <= {}, got M = {}; use a DFT or "
                                              "selection plan, or the Toeplitz route",
                                              max_dense_entrywise_M, M));
            const int T = plan.num_slots();
            CMatrix a(static_cast<Eigen::Index>(T) * L * L, static_cast<Eigen::Index>(M) * M);
            for (int t = 0; t < T; ++t)
            {
                const CMatrix &w = plan.combiners()[static_cast<std::size_t>(t)].matrix();
                for (int b = 0; b < L; ++b)
                    for (int aa = 0; aa < L; ++aa)
                    {
                        const Eigen::Index row = static_cast<Eigen::Index>(t) * L * L + aa + static_cast<Eigen::Index>(b) * L;
                        for (int n = 0; n < M; ++n)
                            for (int m = 0; m < M; ++m)
                                a(row, m + static_cast<Eigen::Index>(n) * M) = std::conj(w(m, aa)) * w(n, b);
                    }
            }
            Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
            fill_report(svd, a.rows(), a.cols(), report_);
            if (report_.feasible || allow_min_norm)
                im.pinv = pseudo_inverse<Eigen::BDCSVD<CMatrix>, CMatrix>(svd, report_.numerical_rank);
        }
        if (!report_.feasible && !allow_min_norm)
            throw_unidentifiable("entrywise", report_);
    }

    EntrywiseSolver::~EntrywiseSolver() = default;
    EntrywiseSolver::EntrywiseSolver(EntrywiseSolver &&) noexcept = default;

    CovarianceMatrix EntrywiseSolver::solve(const std::vector<CovarianceMatrix> &hybrid) const
    {
        const Impl &im = *impl_;
        const int M = im.M, L = im.L;
        if (hybrid.empty())
            throw DimensionError("no hybrid covariances given");

        if (im.structured)
        {
            if (hybrid.size() != im.match.index.size())
                throw DimensionError(fmt::format("plan has {} slots but {} hybrid covariances were given",
                                                 im.match.index.size(), hybrid.size()));
            CMatrix q = CMatrix::Zero(M, M);
            for (std::size_t t = 0; t < hybrid.size(); ++t)
            {
                const CMatrix &ry = hybrid[t].data();
                if (ry.rows() != L)
                    throw DimensionError("hybrid covariance size does not match the plan");
                const auto &idx = im.match.index[t];
                const auto &ph = im.match.phase[t];
                for (int b = 0; b < L; ++b)
                    for (int a = 0; a < L; ++a)
                        q(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]) +=
                            ph[static_cast<std::size_t>(a)] * ry(a, b) * std::conj(ph[static_cast<std::size_t>(b)]);
            }
            for (int j = 0; j < M; ++j)
                for (int i = 0; i < M; ++i)
                    if (im.counts(i, j) > 0)
                        q(i, j) /= static_cast<double>(im.counts(i, j));
            if (im.match.basis.size() == 0)
                return hermitian_part(q);
            return hermitian_part(im.match.basis * q * im.match.basis.adjoint());
        }

        const Eigen::Index T = static_cast<Eigen::Index>(hybrid.size());
        if (T * L * L != im.pinv.cols())
            throw DimensionError("hybrid covariance count does not match the plan");
        CVector y(T * L * L);
        for (Eigen::Index t = 0; t < T; ++t)
        {
            const CMatrix &ry = hybrid[static_cast<std::size_t>(t)].data();
            if (ry.rows() != L)
                throw DimensionError("hybrid covariance size does not match the plan");
            for (int b = 0; b < L; ++b)
                for (int a = 0; a < L; ++a)
                    y(t * L * L + a + static_cast<Eigen::Index>(b) * L) = ry(a, b);
        }
        const CVector x = im.pinv * y;
        return hermitian_part(Eigen::Map<const CMatrix>(x.data(), M, M));
    }

    // ---------------------------------------------------------------- toeplitz

    struct ToeplitzSolver::Impl
    {
        int M = 0, L = 0, T = 0;
        RMatrix pinv;
    };

    ToeplitzSolver::ToeplitzSolver(const ReconstructionPlan &plan) : impl_(std::make_unique<Impl>())
    {
        Impl &im = *impl_;
        const int M = plan.num_antennas(), L = plan.num_chains(), T = plan.num_slots();
        im.M = M;
        im.L = L;
        im.T = T;
        const Eigen::Index eqs = static_cast<Eigen::Index>(T) * L * L;
        const Eigen::Index unknowns = 2 * M - 1;
        RMatrix a(2 * eqs, unknowns);

        for (int t = 0; t < T; ++t)
        {
            const CMatrix &w = plan.combiners()[static_cast<std::size_t>(t)].matrix();
            const Eigen::Index base = static_cast<Eigen::Index>(t) * L * L;
            auto put = [&](Eigen::Index col, const CMatrix &op)
            {
                for (int b = 0; b < L; ++b)
                    for (int aa = 0; aa < L; ++aa)
                    {
                        const Eigen::Index row = base + aa + static_cast<Eigen::Index>(b) * L;
                        a(row, col) = op(aa, b).real();
                        a(eqs + row, col) = op(aa, b).imag();
                    }
            };
            put(0, w.adjoint() * w);
            for (int l = 1; l < M; ++l)
            {
                const CMatrix cl = w.bottomRows(M - l).adjoint() * w.topRows(M - l);
                put(2 * l - 1, cl + cl.adjoint());
                put(2 * l, cplx(0.0, 1.0) * (cl - cl.adjoint()));
            }
        }
        Eigen::BDCSVD<RMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        fill_report(svd, a.rows(), a.cols(), report_);
        if (!report_.feasible)
            throw_unidentifiable("Toeplitz", report_);
        im.pinv = pseudo_inverse<Eigen::BDCSVD<RMatrix>, RMatrix>(svd, report_.numerical_rank);
    }

    ToeplitzSolver::~ToeplitzSolver() = default;
    ToeplitzSolver::ToeplitzSolver(ToeplitzSolver &&) noexcept = default;

    CovarianceMatrix ToeplitzSolver::solve(const std::vector<CovarianceMatrix> &hybrid) const
    {
        const Impl &im = *impl_;
        const int M = im.M, L = im.L;
        if (static_cast<int>(hybrid.size()) != im.T)
            throw DimensionError(fmt::format("plan has {} slots but {} hybrid covariances were given", im.T, hybrid.size()));
        const Eigen::Index eqs = static_cast<Eigen::Index>(im.T) * L * L;
        RVector y(2 * eqs);
        for (int t = 0; t < im.T; ++t)
        {
            const CMatrix &ry = hybrid[static_cast<std::size_t>(t)].data();
            if (ry.rows() != L)
                throw DimensionError("hybrid covariance size does not match the plan");
            for (int b = 0; b < L; ++b)
                for (int a = 0; a < L; ++a)
                {
                    const Eigen::Index row = static_cast<Eigen::Index>(t) * L * L + a + static_cast<Eigen::Index>(b) * L;
                    y(row) = ry(a, b).real();
                    y(eqs + row) = ry(a, b).imag();
                }
        }
        const RVector x = im.pinv * y;
        CMatrix r(M, M);
        for (int m = 0; m < M; ++m)
            for (int n = 0; n <= m; ++n)
            {
                const int l = m - n;
                const cplx v = l == 0 ? cplx(x(0), 0.0) : cplx(x(2 * l - 1), x(2 * l));
                r(m, n) = v;
                r(n, m) = std::conj(v);
            }
        return CovarianceMatrix(std::move(r), CovRole::reconstructed);
    }

    CVector ToeplitzSolver::lags(const CovarianceMatrix &toeplitz)
    {
        return toeplitz.data().col(0);
    }

    IdentifiabilityReport identifiability_report(const ReconstructionPlan &plan, ReconMode mode)
    {
        try
        {
            if (mode == ReconMode::entrywise)
                return EntrywiseSolver(plan, true).report();
            return ToeplitzSolver(plan).report();
        }
        catch (const IdentifiabilityError &e)
        {
            IdentifiabilityReport rep;
            rep.numerical_rank = e.numerical_rank;
            rep.unknowns = e.unknowns;
            rep.condition_estimate = e.condition_estimate;
            rep.feasible = false;
            return rep;
        }
    }

    CovarianceMatrix entrywise_reconstruct(const ReconstructionPlan &plan, const std::vector<CovarianceMatrix> &hybrid,
                                           bool allow_min_norm)
    {
        check_inputs(plan, hybrid);
        return EntrywiseSolver(plan, allow_min_norm).solve(hybrid);
    }

    CovarianceMatrix toeplitz_reconstruct(const ReconstructionPlan &plan, const std::vector<CovarianceMatrix> &hybrid)
    {
        check_inputs(plan, hybrid);
        return ToeplitzSolver(plan).solve(hybrid);
    }

    // ---------------------------------------------------------------- beamspace

    namespace
    {
        CMatrix stack_combiners(const std::vector<Combiner> &combiners)
        {
            if (combiners.empty())
                throw ConfigError("beamspace reconstruction needs at least one combiner");
            const Eigen::Index M = combiners.front().num_antennas();
            Eigen::Index cols = 0;
            for (const auto &c : combiners)
            {
                if (c.num_antennas() != M)
                    throw DimensionError("beamspace combiners must share the antenna count");
                cols += c.num_chains();
            }
            CMatrix b(M, cols);
            Eigen::Index at = 0;
            for (const auto &c : combiners)
            {
                b.middleCols(at, c.num_chains()) = c.matrix();
                at += c.num_chains();
            }
            return b;
        }
    }

    CovarianceMatrix block_hybrid_scm(const std::vector<Combiner> &combiners, const SnapshotMatrix &x)
    {
        const CMatrix b = stack_combiners(combiners);
        if (x.domain != Domain::antenna || x.rows() != b.rows())
            throw DimensionError("block hybrid SCM needs antenna-domain snapshots matching the combiners");
        SnapshotMatrix y;
        y.domain = Domain::rf_chain;
        y.data = b.adjoint() * x.data;
        return sample_scm(y);
    }

    CovarianceMatrix beamspace_reconstruct(const std::vector<Combiner> &combiners, const CovarianceMatrix &block_scm)
    {
        const CMatrix b = stack_combiners(combiners);
        if (block_scm.dimension() != b.cols())
            throw DimensionError(fmt::format("block SCM is {}x{}, stacked combiners have {} columns",
                                             block_scm.dimension(), block_scm.dimension(), b.cols()));
        Eigen::JacobiSVD<CMatrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
        IdentifiabilityReport rep;
        // Identifiability of B is about its row space: rank must reach M.
        const auto &s = svd.singularValues();
        const double tol = s(0) * static_cast<double>(std::max(b.rows(), b.cols())) * std::numeric_limits<double>::epsilon();
        int rank = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
            rank += s(i) > tol ? 1 : 0;
        rep.numerical_rank = rank;
        rep.unknowns = static_cast<int>(b.rows());
        rep.condition_estimate = rank == b.rows() ? s(0) / s(b.rows() - 1) : std::numeric_limits<double>::infinity();
        if (rank < b.rows() || rep.condition_estimate > max_condition)
            throw_unidentifiable("beamspace", rep);
        const CMatrix pinv = pseudo_inverse<Eigen::JacobiSVD<CMatrix>, CMatrix>(svd, rank); // TL x M
        return hermitian_part(pinv.adjoint() * block_scm.data() * pinv);
    }

    CovarianceMatrix beamspace_reconstruct(const std::vector<Combiner> &combiners,
                                           const std::vector<CovarianceMatrix> &diagonal_blocks)
    {
        const ReconstructionPlan plan(combiners, 1);
        return entrywise_reconstruct(plan, diagonal_blocks);
    }

    CovarianceMatrix psd_project(const CovarianceMatrix &r)
    {
        // Subtract the negative part only, so the change is no larger than the
        // clipped eigenvalues and PSD input comes back untouched.
        const EigenDecomposition e = hermitian_eig(r);
        if (e.values(0) >= 0.0)
            return r;
        const RVector negative = e.values.cwiseMin(0.0);
        const CMatrix out = r.data() - e.vectors * negative.cast<cplx>().asDiagonal() * e.vectors.adjoint();
        return CovarianceMatrix(0.5 * (out + out.adjoint()), r.role());
    }

    std::vector<CovarianceMatrix> project_covariance(const ReconstructionPlan &plan, const CMatrix &r)
    {
        std::vector<CovarianceMatrix> out;
        out.reserve(static_cast<std::size_t>(plan.num_slots()));
        for (const auto &c : plan.combiners())
        {
            const CMatrix h = c.matrix().adjoint() * r * c.matrix();
            out.emplace_back(0.5 * (h + h.adjoint()), CovRole::hybrid);
        }
        return out;
    }

    // ---------------------------------------------------------------- plans

    std::vector<std::vector<int>> dft_pair_columns(int M, int L, int num_slots)
    {
        if (L < 2 || L > M)
            throw ConfigError(fmt::format("pair plans need 2 <= L <= M, got L = {}, M = {}", L, M));
        if (num_slots < 0)
            throw ConfigError("slot count must be non-negative");
        const int g = L / 2;
        const int G = (M + g - 1) / g;
        std::vector<std::vector<int>> groups(static_cast<std::size_t>(G));
        for (int k = 0; k < G; ++k)
            for (int m = k; m < M; m += G)
                groups[static_cast<std::size_t>(k)].push_back(m);

        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < G; ++i)
            for (int j = i + 1; j < G; ++j)
                pairs.emplace_back(i, j);
        if (pairs.empty())
            pairs.emplace_back(0, 0);

        const int T = num_slots == 0 ? static_cast<int>(pairs.size()) : num_slots;
        std::vector<std::vector<int>> out;
        out.reserve(static_cast<std::size_t>(T));
        for (int s = 0; s < T; ++s)
        {
            const auto [i, j] = pairs[static_cast<std::size_t>(s) % pairs.size()];
            std::set<int> cols(groups[static_cast<std::size_t>(i)].begin(), groups[static_cast<std::size_t>(i)].end());
            cols.insert(groups[static_cast<std::size_t>(j)].begin(), groups[static_cast<std::size_t>(j)].end());
            std::vector<int> slot(cols.begin(), cols.end());
            int next = (slot.back() + 1) % M;
            while (static_cast<int>(slot.size()) < L)
            {
                if (!cols.count(next))
                {
                    cols.insert(next);
                    slot.push_back(next);
                }
                next = (next + 1) % M;
            }
            out.push_back(std::move(slot));
        }
        return out;
    }

    ReconstructionPlan dft_pair_plan(int M, int L, int num_slots, int snapshots_per_slot)
    {
        std::vector<Combiner> combiners;
        for (const auto &cols : dft_pair_columns(M, L, num_slots))
            combiners.push_back(dft_combiner(M, cols));
        return ReconstructionPlan(std::move(combiners), snapshots_per_slot);
    }

    ReconstructionPlan selection_pair_plan(int M, int L, int num_slots, int snapshots_per_slot)
    {
        std::vector<Combiner> combiners;
        for (const auto &cols : dft_pair_columns(M, L, num_slots))
        {
            std::vector<std::vector<int>> rows;
            for (int m : cols)
                rows.push_back({m});
            combiners.push_back(selection_combiner(M, rows));
        }
        return ReconstructionPlan(std::move(combiners), snapshots_per_slot);
    }

    ReconstructionPlan random_plan(const CombinerSpec &spec, int M, int L, int num_slots, int snapshots_per_slot,
                                   std::uint64_t seed)
    {
        if (const auto *se = std::get_if<SwitchBased>(&spec))
        {
            if (se->active_per_chain != 1)
                throw ConfigError("switch-based training plans select one antenna per chain (active_per_chain = 1)");
            return selection_pair_plan(M, L, num_slots, snapshots_per_slot);
        }
        const int T = num_slots > 0 ? num_slots : 2 * minimum_entrywise_slots(M, L);
        Rng rng(seed);
        std::vector<Combiner> combiners;
        for (int t = 0; t < T; ++t)
        {
            CombinerSpec s = spec;
            if (auto *hds = std::get_if<DynamicSubarray>(&s))
                hds->switch_offset += t;
            combiners.push_back(random_support_combiner(s, M, L, rng));
        }
        return ReconstructionPlan(std::move(combiners), snapshots_per_slot);
    }
}

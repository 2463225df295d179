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

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>

using namespace hadoa;

namespace
{
    double rel(const CMatrix &a, const CMatrix &b) { return (a - b).norm() / b.norm(); }

    CMatrix random_cov(int M, Rng &rng)
    {
        CMatrix a(M, M);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                a(i, j) = rng.complex_normal(1.0);
        return a * a.adjoint() / M + 0.1 * CMatrix::Identity(M, M);
    }

    // Independent oracle: stack vec(W^H R W) = (W^T kron W^H) vec(R) and solve densely.
    CMatrix dense_ls_oracle(const ReconstructionPlan &plan, const std::vector<CovarianceMatrix> &hyb)
    {
        const int M = plan.num_antennas();
        const int L = plan.num_chains();
        const int T = plan.num_slots();
        CMatrix A(T * L * L, M * M);
        CVector b(T * L * L);
        for (int t = 0; t < T; ++t)
        {
            const CMatrix &w = plan.combiners()[static_cast<std::size_t>(t)].matrix();
            const CMatrix wt = w.transpose();
            const CMatrix wh = w.adjoint();
            for (int i = 0; i < L; ++i)
                for (int j = 0; j < L; ++j)
                {
                    // vec index of (i, j) in column-major: j * L + i.
                    const int row = t * L * L + j * L + i;
                    for (int n = 0; n < M; ++n)
                        for (int m = 0; m < M; ++m)
                            A(row, n * M + m) = wh(i, m) * wt(j, n);
                    b(row) = hyb[static_cast<std::size_t>(t)].data()(i, j);
                }
        }
        const CVector x = Eigen::CompleteOrthogonalDecomposition<CMatrix>(A).solve(b);
        CMatrix r = Eigen::Map<const CMatrix>(x.data(), M, M);
        return 0.5 * (r + r.adjoint());
    }

    CMatrix diagonal_average(const CMatrix &r)
    {
        const int M = static_cast<int>(r.rows());
        CMatrix out(M, M);
        for (int l = 0; l < M; ++l)
        {
            cplx s = 0.0;
            for (int m = l; m < M; ++m)
                s += r(m, m - l);
            s /= static_cast<double>(M - l);
            for (int m = l; m < M; ++m)
            {
                out(m, m - l) = s;
                out(m - l, m) = std::conj(s);
            }
        }
        return out;
    }

    std::vector<CovarianceMatrix> noisy_hybrids(const ReconstructionPlan &plan, const CMatrix &r, int N, Rng &rng)
    {
        const Eigen::LLT<CMatrix> llt(r);
        const CMatrix f = llt.matrixL();
        std::vector<CovarianceMatrix> out;
        for (const auto &c : plan.combiners())
        {
            CMatrix z(r.rows(), N);
            for (int i = 0; i < z.rows(); ++i)
                for (int n = 0; n < N; ++n)
                    z(i, n) = rng.complex_normal(1.0);
            out.push_back(sample_scm(SnapshotMatrix{c.matrix().adjoint() * f * z, Domain::rf_chain}));
        }
        return out;
    }

    // Selection plan of cyclic shifts of a difference cover: slot s uses antennas (s + e) mod M.
    ReconstructionPlan cyclic_selection_plan(int M, const std::vector<int> &cover)
    {
        std::vector<Combiner> cs;
        for (int s = 0; s < M; ++s)
        {
            std::vector<std::vector<int>> rows;
            for (int e : cover)
                rows.push_back({(s + e) % M});
            cs.push_back(selection_combiner(M, rows));
        }
        return ReconstructionPlan(cs, 1);
    }

    // Equal-modulus weights on a multi-antenna support see only the sum of the
    // diagonal entries under it, unless another chain of the same slot overlaps
    // that support with different phases.
    bool diagonal_blind(const ReconstructionPlan &plan)
    {
        bool wide = false;
        for (const auto &c : plan.combiners())
        {
            const CMatrix &w = c.matrix();
            for (int a = 0; a < w.cols(); ++a)
            {
                int count = 0;
                for (int m = 0; m < w.rows(); ++m)
                    count += w(m, a) != cplx(0.0, 0.0);
                wide = wide || count > 1;
                for (int b = a + 1; b < w.cols(); ++b)
                    for (int m = 0; m < w.rows(); ++m)
                        if (w(m, a) != cplx(0.0, 0.0) && w(m, b) != cplx(0.0, 0.0))
                            return false;
            }
        }
        return wide;
    }

    ReconstructionPlan full_rank_plan(const CombinerSpec &spec, int M, int L, std::uint64_t seed)
    {
        if (std::holds_alternative<SwitchBased>(spec))
            return selection_pair_plan(M, L, 0, 1);
        if (std::holds_alternative<FullyConnected>(spec))
            return dft_pair_plan(M, L, 0, 1);
        return random_plan(spec, M, L, 0, 1, seed);
    }
}

TEST_CASE("identity combiner returns its input", "[recon]")
{
    Rng rng(1);
    const CMatrix r = random_cov(5, rng);
    const ReconstructionPlan plan({Combiner(CMatrix::Identity(5, 5), SwitchBased{1, false})}, 1);
    const CovarianceMatrix out = entrywise_reconstruct(plan, project_covariance(plan, r));
    CHECK(out.role() == CovRole::reconstructed);
    CHECK(rel(out.data(), r) < 1e-14);
}

TEST_CASE("DFT pair plan M = 4, L = 2, T = 8 matches the dense oracle", "[recon]")
{
    Rng rng(2);
    const CMatrix r = true_covariance(ArrayGeometry(4), SourceScenario({10.0, 60.0}, {1.0, 1.0}, 1), NoiseSpec(0.1)).data();
    const ReconstructionPlan plan = dft_pair_plan(4, 2, 8, 1);
    REQUIRE(plan.num_slots() == 8);
    const auto rep = identifiability_report(plan);
    CHECK(rep.numerical_rank == 16);
    CHECK(rep.feasible);
    const auto exact = project_covariance(plan, r);
    CHECK(rel(entrywise_reconstruct(plan, exact).data(), r) <= 1e-8);
    CHECK(rel(dense_ls_oracle(plan, exact), r) <= 1e-8);

    // Noisy input: both are the same least-squares solution.
    const auto noisy = noisy_hybrids(plan, r, 50, rng);
    const CMatrix ours = entrywise_reconstruct(plan, noisy).data();
    CHECK(rel(ours, dense_ls_oracle(plan, noisy)) < 1e-10);
}

TEST_CASE("dense solver path matches the oracle", "[recon]")
{
    Rng rng(3);
    for (int M : {4, 6, 8})
    {
        const CMatrix r = random_cov(M, rng);
        const ReconstructionPlan plan = random_plan(FullyConnected{}, M, 2, 0, 1, 40 + M);
        const auto rep = identifiability_report(plan);
        REQUIRE(rep.feasible);
        CHECK(!rep.structured);
        const auto noisy = noisy_hybrids(plan, r, 30, rng);
        CHECK(rel(entrywise_reconstruct(plan, noisy).data(), dense_ls_oracle(plan, noisy)) < 1e-9);
    }
}

TEST_CASE("underdetermined plans raise an identifiability error", "[recon]")
{
    const ReconstructionPlan single({build_combiner(FullyConnected{}, 8, 4)}, 1);
    const auto rep = identifiability_report(single);
    CHECK(!rep.feasible);
    CHECK(rep.numerical_rank == 16);
    CHECK(rep.unknowns == 64);
    try
    {
        entrywise_reconstruct(single, project_covariance(single, CMatrix::Identity(8, 8)));
        FAIL("expected IdentifiabilityError");
    }
    catch (const IdentifiabilityError &e)
    {
        CHECK(e.numerical_rank == 16);
        CHECK(e.unknowns == 64);
    }

    // Repeated combiners add no rank.
    const Combiner w = random_phase_combiner(8, 3, 1);
    const ReconstructionPlan repeated(std::vector<Combiner>(6, w), 1);
    CHECK(identifiability_report(repeated).numerical_rank == 9);

    // Minimum-norm solution only on request.
    CHECK_NOTHROW(entrywise_reconstruct(single, project_covariance(single, CMatrix::Identity(8, 8)), true));
}

TEST_CASE("minimum entrywise slots", "[recon]")
{
    CHECK(minimum_entrywise_slots(4, 2) == 4);
    CHECK(minimum_entrywise_slots(16, 3) == 29);
    CHECK(minimum_entrywise_slots(64, 16) == 16);
}

TEST_CASE("DFT pair columns cover every column pair", "[recon]")
{
    for (auto [M, L] : {std::pair{8, 2}, {8, 4}, {16, 4}, {16, 5}, {64, 16}})
    {
        const auto cols = dft_pair_columns(M, L);
        std::vector<std::vector<bool>> covered(static_cast<std::size_t>(M), std::vector<bool>(static_cast<std::size_t>(M), false));
        for (const auto &s : cols)
        {
            REQUIRE(static_cast<int>(s.size()) == L);
            for (int a : s)
                for (int b : s)
                    covered[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
        }
        for (int a = 0; a < M; ++a)
            for (int b = 0; b < M; ++b)
                CHECK(covered[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
    }
}

TEST_CASE("exact reconstruction for every architecture and route", "[recon]")
{
    Rng rng(4);
    for (int M : {4, 8, 16})
        for (int L : {2, 4})
        {
            const std::vector<CombinerSpec> specs{FullyConnected{}, PartiallyConnected{M / L}, SwitchBased{1, false},
                                                  DynamicSubarray{M, 0.5, 0}, DynamicSubarray{2, 0.5, 0}};
            for (const CombinerSpec &spec : specs)
            {
                INFO(spec_to_string(spec) << " M=" << M << " L=" << L);
                const ReconstructionPlan plan = full_rank_plan(spec, M, L, 100 + M + L);
                CMatrix b(M, plan.num_slots() * L);
                for (int t = 0; t < plan.num_slots(); ++t)
                    b.middleCols(t * L, L) = plan.combiners()[static_cast<std::size_t>(t)].matrix();

                const bool grouped = diagonal_blind(plan);
                const CMatrix r = random_cov(M, rng);
                CHECK(identifiability_report(plan).feasible == !grouped);
                if (!grouped)
                    CHECK(rel(entrywise_reconstruct(plan, project_covariance(plan, r)).data(), r) <= 1e-8);
                else
                    CHECK_THROWS_AS(entrywise_reconstruct(plan, project_covariance(plan, r)), IdentifiabilityError);

                const CovarianceMatrix block(b.adjoint() * r * b, CovRole::hybrid);
                CHECK(rel(beamspace_reconstruct(plan.combiners(), block).data(), r) <= 1e-8);

                const CMatrix rt = true_covariance(ArrayGeometry(M), SourceScenario({-30.0, 12.0}, {1.0, 2.0}, 1), NoiseSpec(0.2)).data();
                CHECK(rel(toeplitz_reconstruct(plan, project_covariance(plan, rt)).data(), rt) <= 1e-8);
            }
        }
}

TEST_CASE("Toeplitz rank and lags", "[recon]")
{
    const ReconstructionPlan plan = random_plan(FullyConnected{}, 8, 2, 4, 1, 11);
    const auto rep = identifiability_report(plan, ReconMode::toeplitz);
    CHECK(rep.numerical_rank == 15);
    CHECK(rep.unknowns == 15);
    CHECK(rep.feasible);

    const CovarianceMatrix rt = true_covariance(ArrayGeometry(8), SourceScenario({-7.0, 41.0}, {1.0, 0.5}, 1), NoiseSpec(0.3));
    const CVector truth = ToeplitzSolver::lags(rt);
    const CVector got = ToeplitzSolver::lags(toeplitz_reconstruct(plan, project_covariance(plan, rt.data())));
    for (int l = 0; l < 8; ++l)
        CHECK(std::abs(got(l) - truth(l)) <= 1e-8 * std::abs(truth(0)));

    // Broadside source without noise: every lag is 1.
    const CovarianceMatrix one(CMatrix::Ones(8, 8), CovRole::true_cov);
    const CVector lags = ToeplitzSolver::lags(toeplitz_reconstruct(plan, project_covariance(plan, one.data())));
    for (int l = 0; l < 8; ++l)
        CHECK(std::abs(lags(l) - cplx(1.0, 0.0)) < 1e-8);
}

TEST_CASE("Toeplitz output is exactly Toeplitz", "[recon]")
{
    Rng rng(5);
    const ReconstructionPlan plan = dft_pair_plan(8, 4, 0, 1);
    const CMatrix r = random_cov(8, rng);
    const CMatrix t = toeplitz_reconstruct(plan, noisy_hybrids(plan, r, 20, rng)).data();
    for (int m = 1; m < 8; ++m)
        for (int n = 1; n < 8; ++n)
            CHECK(std::abs(t(m, n) - t(m - 1, n - 1)) <= 1e-12);
    CHECK((t - t.adjoint()).norm() <= 1e-12);
}

TEST_CASE("Toeplitz solve equals diagonal averaging of the entrywise solve", "[recon]")
{
    // The identity needs slot coverage that depends on the lag only; cyclic
    // shifts of the difference cover {0, 1, 2, 4} of Z_8 give that.
    Rng rng(6);
    const ReconstructionPlan plan = cyclic_selection_plan(8, {0, 1, 2, 4});
    REQUIRE(identifiability_report(plan).feasible);
    const CMatrix r = random_cov(8, rng);
    for (int trial = 0; trial < 5; ++trial)
    {
        const auto noisy = noisy_hybrids(plan, r, 25, rng);
        const CMatrix ew = entrywise_reconstruct(plan, noisy).data();
        const CMatrix tp = toeplitz_reconstruct(plan, noisy).data();
        CHECK((tp - diagonal_average(ew)).norm() <= 1e-6 * ew.norm());
    }
}

TEST_CASE("Toeplitz identifiability failure", "[recon]")
{
    // A single selection of antennas {0, 1} only sees lags 0 and 1.
    const ReconstructionPlan plan({selection_combiner(8, {{0}, {1}})}, 1);
    CHECK(!identifiability_report(plan, ReconMode::toeplitz).feasible);
    CHECK_THROWS_AS(toeplitz_reconstruct(plan, project_covariance(plan, CMatrix::Identity(8, 8))), IdentifiabilityError);
}

TEST_CASE("beamspace reconstruction", "[recon]")
{
    Rng rng(7);
    const CMatrix r = random_cov(8, rng);
    const std::vector<Combiner> halves{dft_combiner(8, {0, 1, 2, 3}), dft_combiner(8, {4, 5, 6, 7})};

    SECTION("unitary beamspace is exact")
    {
        CMatrix b(8, 8);
        b << halves[0].matrix(), halves[1].matrix();
        const CovarianceMatrix block(b.adjoint() * r * b, CovRole::hybrid);
        CHECK(rel(beamspace_reconstruct(halves, block).data(), r) <= 1e-8);
    }
    SECTION("sample block statistics agree with the entrywise route on a full-rank plan")
    {
        // Exact inputs: both routes return R, so they agree with each other.
        const ReconstructionPlan plan = dft_pair_plan(8, 4, 0, 1);
        CMatrix b(8, 8);
        b << halves[0].matrix(), halves[1].matrix();
        const CMatrix via_beams = beamspace_reconstruct(halves, CovarianceMatrix(b.adjoint() * r * b, CovRole::hybrid)).data();
        const CMatrix via_entries = entrywise_reconstruct(plan, project_covariance(plan, r)).data();
        CHECK(rel(via_beams, via_entries) <= 1e-8);

        // With snapshots, the block SCM route is the antenna SCM re-expressed.
        const SnapshotMatrix x = generate_snapshots(ArrayGeometry(8), SourceScenario::equal_power({5.0, 50.0}, 40), NoiseSpec(0.2), 3);
        CHECK(rel(beamspace_reconstruct(halves, block_hybrid_scm(halves, x)).data(), sample_scm(x).data()) < 1e-12);
    }
    SECTION("diagonal blocks only need a full-rank entrywise plan")
    {
        CHECK_THROWS_AS(beamspace_reconstruct(halves, project_covariance(ReconstructionPlan(halves, 1), r)), IdentifiabilityError);
        const ReconstructionPlan plan = dft_pair_plan(8, 4, 0, 1);
        CHECK(rel(beamspace_reconstruct(plan.combiners(), project_covariance(plan, r)).data(), r) <= 1e-8);
    }
    SECTION("rank-deficient beam map")
    {
        const std::vector<Combiner> same{halves[0], halves[0]};
        CMatrix b(8, 8);
        b << same[0].matrix(), same[1].matrix();
        CHECK_THROWS_AS(beamspace_reconstruct(same, CovarianceMatrix(b.adjoint() * r * b, CovRole::hybrid)), IdentifiabilityError);
    }
}

TEST_CASE("PSD projection", "[recon]")
{
    Rng rng(8);
    const CMatrix p = random_cov(4, rng);
    CHECK((psd_project(CovarianceMatrix(p, CovRole::sample)).data() - p).norm() <= 1e-12 * p.norm());

    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -0.1;
    CMatrix expected = CMatrix::Zero(2, 2);
    expected(0, 0) = 1.0;
    CHECK((psd_project(CovarianceMatrix(d, CovRole::reconstructed)).data() - expected).norm() <= 1e-12);

    for (int t = 0; t < 20; ++t)
    {
        CMatrix h(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                h(i, j) = rng.complex_normal(1.0);
        h = (0.5 * (h + h.adjoint())).eval();
        const CovarianceMatrix in(h, CovRole::reconstructed);
        const CMatrix out = psd_project(in).data();

        // Oracle: clip the eigenvalues of an independent solver.
        const Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        const CMatrix oracle = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
        CHECK((out - oracle).norm() <= 1e-10);
        CHECK(Eigen::SelfAdjointEigenSolver<CMatrix>(out).eigenvalues().minCoeff() >= -1e-12);

        // No random PSD perturbation of the output gets closer.
        const double best = (out - h).norm();
        for (int k = 0; k < 50; ++k)
        {
            CMatrix g(4, 1);
            for (int i = 0; i < 4; ++i)
                g(i, 0) = rng.complex_normal(0.01);
            const CMatrix cand = psd_project(CovarianceMatrix(out + g * g.adjoint(), CovRole::reconstructed)).data();
            CHECK((cand - h).norm() >= best - 1e-12);
        }

        const CMatrix twice = psd_project(psd_project(in)).data();
        CHECK((twice - out).norm() <= 1e-12);
    }
}

TEST_CASE("reconstruction error shrinks with snapshots per slot", "[recon][slow]")
{
    const CMatrix r = true_covariance(ArrayGeometry(8), SourceScenario({10.0, 60.0}, {1.0, 1.0}, 1), NoiseSpec(0.5)).data();
    const ReconstructionPlan plan = dft_pair_plan(8, 4, 0, 1);
    std::vector<double> medians;
    for (int N : {100, 1000, 10000})
    {
        Rng rng(1000 + N);
        std::vector<double> errs;
        for (int t = 0; t < 50; ++t)
            errs.push_back(rel(entrywise_reconstruct(plan, noisy_hybrids(plan, r, N, rng)).data(), r));
        std::nth_element(errs.begin(), errs.begin() + 25, errs.end());
        medians.push_back(errs[25]);
    }
    CHECK(medians[1] <= medians[0]);
    CHECK(medians[2] <= medians[1]);
}

TEST_CASE("hybrid sample covariance converges to W^H R W", "[recon][slow]")
{
    const ArrayGeometry g(8);
    const SourceScenario sc({-15.0, 40.0}, {1.0, 1.0}, 100000);
    const NoiseSpec noise(0.3);
    const Combiner c = build_combiner(FullyConnected{}, 8, 4);
    const CMatrix expected = c.matrix().adjoint() * true_covariance(g, sc, noise).data() * c.matrix();
    const CovarianceMatrix got = sample_scm(apply_combiner(c, generate_snapshots(g, sc, noise, 21)));
    CHECK(got.role() == CovRole::hybrid);
    CHECK(rel(got.data(), expected) <= 0.05);
}

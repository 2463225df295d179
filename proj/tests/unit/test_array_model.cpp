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


#include "hadoa/array_model.hpp"
#include "hadoa/hermitian_eig.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

using namespace hadoa;
using Catch::Matchers::WithinAbs;

TEST_CASE("steering vector closed forms", "[array]")
{
    const CVector a0 = steering_vector(ArrayGeometry(4), 0.0);
    for (int m = 0; m < 4; ++m)
        CHECK(std::abs(a0(m) - cplx(1.0, 0.0)) < 1e-15);

    const CVector a30 = steering_vector(ArrayGeometry(2, 0.5), 30.0);
    CHECK(std::abs(a30(0) - cplx(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(a30(1) - cplx(0.0, 1.0)) < 1e-12);

    const CVector edge = steering_vector(ArrayGeometry(2, 0.5), 90.0 - 1e-7);
    CHECK(std::abs(edge(1) - cplx(-1.0, 0.0)) < 1e-9);
}

TEST_CASE("steering vector rejects angles outside the open half plane", "[array]")
{
    const ArrayGeometry g(4);
    CHECK_THROWS_AS(steering_vector(g, 90.0), DomainError);
    CHECK_THROWS_AS(steering_vector(g, -90.0), DomainError);
    CHECK_THROWS_AS(steering_vector(g, 123.0), DomainError);
    CHECK_THROWS_AS(steering_vector(g, std::nan("")), DomainError);
}

TEST_CASE("steering vector entries have unit modulus", "[array]")
{
    Rng rng(11);
    const ArrayGeometry g(16, 0.37);
    for (int i = 0; i < 10000; ++i)
    {
        const double theta = -89.999 + 179.998 * rng.uniform();
        const CVector a = steering_vector(g, theta);
        REQUIRE(std::abs(a(0) - cplx(1.0, 0.0)) < 1e-15);
        REQUIRE((a.array().abs() - 1.0).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("geometry and scenario validation", "[array]")
{
    CHECK_THROWS_AS(ArrayGeometry(1), ConfigError);
    CHECK_THROWS_AS(ArrayGeometry(4, 0.0), ConfigError);
    CHECK_THROWS_AS(SourceScenario({10.0}, {1.0, 1.0}, 10), ConfigError);
    CHECK_THROWS_AS(SourceScenario({10.0}, {-1.0}, 10), ConfigError);
    CHECK_THROWS_AS(SourceScenario({10.0}, {1.0}, 0), ConfigError);
    CHECK_THROWS_AS(NoiseSpec(-1.0), ConfigError);
    CHECK_THAT(NoiseSpec::from_snr_db(10.0).variance(), WithinAbs(0.1, 1e-15));
}

TEST_CASE("generate_snapshots is deterministic in the seed", "[array]")
{
    const ArrayGeometry g(8);
    const auto sc = SourceScenario::equal_power({10.0, 60.0}, 50);
    const NoiseSpec noise(0.3);
    const SnapshotMatrix x1 = generate_snapshots(g, sc, noise, 42);
    const SnapshotMatrix x2 = generate_snapshots(g, sc, noise, 42);
    const SnapshotMatrix x3 = generate_snapshots(g, sc, noise, 43);
    CHECK(x1.domain == Domain::antenna);
    CHECK(x1.rows() == 8);
    CHECK(x1.snapshots() == 50);
    CHECK(x1.data == x2.data);
    CHECK(x1.data != x3.data);
}

TEST_CASE("noise-only sample covariance approaches sigma^2 I", "[array][slow]")
{
    const ArrayGeometry g(4);
    const double s2 = 0.7;
    const SnapshotMatrix x = generate_snapshots(g, SourceScenario({20.0}, {0.0}, 100000), NoiseSpec(s2), 5);
    const CMatrix r = sample_scm(x).data();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
        {
            const double expected = i == j ? s2 : 0.0;
            CHECK(std::abs(r(i, j) - expected) <= 0.05 * s2);
        }
}

TEST_CASE("low-noise single source gives a dominant eigenvector along a(theta)", "[array]")
{
    const ArrayGeometry g(8);
    const SnapshotMatrix x = generate_snapshots(g, SourceScenario::equal_power({25.0}, 20000), NoiseSpec(1e-6), 9);
    const auto eig = hermitian_eig(sample_scm(x));
    const CVector v = eig.vectors.col(7);
    const CVector a = steering_vector(g, 25.0);
    CHECK(std::abs(v.dot(a)) * std::sqrt(8.0) >= 0.999 * 8.0);
}

TEST_CASE("sample covariance converges to the true covariance", "[array][slow]")
{
    for (int M : {2, 4, 8})
    {
        const ArrayGeometry g(M);
        const SourceScenario sc({-20.0, 35.0}, {1.0, 0.5}, 100000);
        const NoiseSpec noise(0.2);
        const CMatrix r = true_covariance(g, sc, noise).data();
        const CMatrix rh = sample_scm(generate_snapshots(g, sc, noise, 77 + M)).data();
        CHECK((rh - r).norm() / r.norm() <= 0.05);
    }
}

TEST_CASE("true covariance closed forms", "[array]")
{
    {
        const CMatrix r = true_covariance(ArrayGeometry(2), SourceScenario({0.0}, {1.0}, 1), NoiseSpec(1.0)).data();
        CMatrix expected(2, 2);
        expected << 2.0, 1.0, 1.0, 2.0;
        CHECK((r - expected).norm() < 1e-14);
    }
    {
        const CMatrix r = true_covariance(ArrayGeometry(5), SourceScenario({}, {}, 1), NoiseSpec(0.3)).data();
        CHECK((r - 0.3 * CMatrix::Identity(5, 5)).norm() < 1e-15);
    }
    {
        // Element-by-element oracle: R[m,n] = sum_k p_k e^{i pi (m-n) sin th_k} + s2 delta.
        const std::vector<double> th{10.0, 60.0};
        const CMatrix r = true_covariance(ArrayGeometry(4), SourceScenario(th, {1.0, 1.0}, 1), NoiseSpec(0.1)).data();
        CMatrix oracle = CMatrix::Zero(4, 4);
        for (int m = 0; m < 4; ++m)
            for (int n = 0; n < 4; ++n)
            {
                for (double t : th)
                    oracle(m, n) += std::polar(1.0, pi * (m - n) * std::sin(deg2rad(t)));
                if (m == n)
                    oracle(m, n) += 0.1;
            }
        CHECK((r - oracle).norm() < 1e-12);
    }
}

TEST_CASE("true covariance is Hermitian PD with the expected trace", "[array]")
{
    Rng rng(3);
    for (int t = 0; t < 50; ++t)
    {
        const int M = 2 + static_cast<int>(rng.uniform() * 12);
        const int K = 1 + static_cast<int>(rng.uniform() * 3);
        std::vector<double> th, p;
        for (int k = 0; k < K; ++k)
        {
            th.push_back(-80.0 + 160.0 * rng.uniform());
            p.push_back(0.1 + rng.uniform());
        }
        const double s2 = 0.01 + rng.uniform();
        const CovarianceMatrix rc = true_covariance(ArrayGeometry(M), SourceScenario(th, p, 1), NoiseSpec(s2));
        const CMatrix &r = rc.data();
        CHECK(rc.role() == CovRole::true_cov);
        CHECK((r - r.adjoint()).norm() <= 1e-12);
        const Eigen::SelfAdjointEigenSolver<CMatrix> es(r);
        CHECK(es.eigenvalues().minCoeff() >= s2 - 1e-10);
        double psum = 0.0;
        for (double v : p)
            psum += v;
        CHECK_THAT(r.trace().real(), WithinAbs(M * s2 + M * psum, 1e-9));
    }
}

TEST_CASE("sample_scm of one column is the outer product", "[array]")
{
    SnapshotMatrix y;
    y.data = CMatrix(3, 1);
    y.data << cplx(1, 2), cplx(-0.5, 0), cplx(0, 3);
    y.domain = Domain::rf_chain;
    const CovarianceMatrix r = sample_scm(y);
    CHECK(r.role() == CovRole::hybrid);
    CHECK((r.data() - y.data * y.data.adjoint()).norm() < 1e-14);
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(r.data());
    CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);
    CHECK(std::abs(es.eigenvalues()(1)) < 1e-12);
}

TEST_CASE("sample_scm with orthogonal equal-norm rows is diagonal", "[array]")
{
    // Rows of a 4-point DFT are orthogonal with norm 2.
    SnapshotMatrix y;
    y.data = CMatrix(4, 4);
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
            y.data(m, n) = std::polar(1.0, 2.0 * pi * m * n / 4.0);
    const CMatrix r = sample_scm(y).data();
    CHECK((r - CMatrix::Identity(4, 4)).norm() < 1e-14);
}

TEST_CASE("covariance constructor rejects malformed input", "[array]")
{
    CHECK_THROWS_AS(CovarianceMatrix(CMatrix::Zero(2, 3), CovRole::sample), DimensionError);
    CMatrix nh = CMatrix::Identity(2, 2);
    nh(0, 1) = 1.0;
    CHECK_THROWS_AS(CovarianceMatrix(nh, CovRole::sample), DomainError);
    CMatrix nf = CMatrix::Identity(2, 2);
    nf(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(CovarianceMatrix(nf, CovRole::sample), DomainError);
}

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

#ifndef HADOA_ARRAY_MODEL_HPP
#define HADOA_ARRAY_MODEL_HPP

#include "hadoa/random.hpp"
#include "hadoa/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hadoa
{
    // Uniform linear array. Element m sits at m * spacing wavelengths from element 0.
    class ArrayGeometry
    {
    public:
        explicit ArrayGeometry(int num_elements, double spacing_wavelengths = 0.5);

        int num_elements() const { return num_elements_; }
        double spacing() const { return spacing_; }

    private:
        int num_elements_;
        double spacing_;
    };

    // Far-field narrowband sources: one angle and one signal variance per source.
    class SourceScenario
    {
    public:
        SourceScenario(std::vector<double> angles_deg, std::vector<double> powers, int num_snapshots);

        const std::vector<double> &angles_deg() const { return angles_; }
        const std::vector<double> &powers() const { return powers_; }
        int num_snapshots() const { return num_snapshots_; }
        int num_sources() const { return static_cast<int>(angles_.size()); }

        // Equal unit-power sources at the given angles.
        static SourceScenario equal_power(std::vector<double> angles_deg, int num_snapshots);

    private:
        std::vector<double> angles_;
        std::vector<double> powers_;
        int num_snapshots_;
    };

    // Per-antenna circular complex white noise.
    class NoiseSpec
    {
    public:
        explicit NoiseSpec(double variance);
        double variance() const { return variance_; }

        // Unit-power sources at the given per-element SNR: variance = 10^(-snr/10).
        static NoiseSpec from_snr_db(double snr_db);

    private:
        double variance_;
    };

    enum class Domain
    {
        antenna,
        rf_chain
    };

    // Rows are antennas (or RF chains), columns are time snapshots.
    struct SnapshotMatrix
    {
        CMatrix data;
        Domain domain = Domain::antenna;

        int rows() const { return static_cast<int>(data.rows()); }
        int snapshots() const { return static_cast<int>(data.cols()); }
    };

    enum class CovRole
    {
        true_cov,
        sample,
        hybrid,
        reconstructed
    };

    const char *role_name(CovRole role);

    // Hermitian matrix with a role tag. The constructor rejects non-square,
    // non-finite or non-Hermitian input (relative Frobenius tolerance 1e-10).
    class CovarianceMatrix
    {
    public:
        CovarianceMatrix(CMatrix data, CovRole role);

        const CMatrix &data() const { return data_; }
        CovRole role() const { return role_; }
        int dimension() const { return static_cast<int>(data_.rows()); }

    private:
        CMatrix data_;
        CovRole role_;
    };

    // a(theta)[m] = exp(i 2 pi d m sin(theta)); broadside is 0 deg.
    CVector steering_vector(const ArrayGeometry &geometry, double angle_deg);

    // Columns are steering vectors of the given angles.
    CMatrix steering_matrix(const ArrayGeometry &geometry, std::span<const double> angles_deg);

    // Steering matrix A (M x K) and source waveforms S (K x N) for one realization.
    struct SignalBlock
    {
        CMatrix steering;
        CMatrix waveforms;
    };

    // Draws mutually uncorrelated CN(0, p_k) waveforms for every source.
    SignalBlock draw_signal_block(const ArrayGeometry &geometry, const SourceScenario &scenario, Rng &rng);

    // X = A S + W with fresh noise W drawn from rng.
    SnapshotMatrix antenna_snapshots(const SignalBlock &block, const NoiseSpec &noise, Rng &rng);

    // X = A(theta) S + W, deterministic in seed.
    SnapshotMatrix generate_snapshots(const ArrayGeometry &geometry, const SourceScenario &scenario,
                                      const NoiseSpec &noise, std::uint64_t seed);

    // R = A diag(p) A^H + sigma^2 I.
    CovarianceMatrix true_covariance(const ArrayGeometry &geometry, const SourceScenario &scenario,
                                     const NoiseSpec &noise);

    // (1/N) Y Y^H; role is sample for antenna-domain input and hybrid for rf-chain input.
    CovarianceMatrix sample_scm(const SnapshotMatrix &y);

    // Largest ||R - R^H||_F / ||R||_F accepted as Hermitian.
    inline constexpr double hermitian_tolerance = 1e-10;
}

#endif

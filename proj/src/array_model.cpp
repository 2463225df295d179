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

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace hadoa
{
    ArrayGeometry::ArrayGeometry(int num_elements, double spacing_wavelengths)
        : num_elements_(num_elements), spacing_(spacing_wavelengths)
    {
        if (num_elements < 2)
            throw ConfigError(fmt::format("array needs at least 2 elements, got {}", num_elements));
        if (!(spacing_wavelengths > 0.0) || !std::isfinite(spacing_wavelengths))
            throw ConfigError(fmt::format("element spacing must be positive, got {}", spacing_wavelengths));
    }

    SourceScenario::SourceScenario(std::vector<double> angles_deg, std::vector<double> powers, int num_snapshots)
        : angles_(std::move(angles_deg)), powers_(std::move(powers)), num_snapshots_(num_snapshots)
    {
        if (angles_.size() != powers_.size())
            throw ConfigError(fmt::format("{} source angles but {} powers", angles_.size(), powers_.size()));
        if (num_snapshots < 1)
            throw ConfigError(fmt::format("snapshot count must be positive, got {}", num_snapshots));
        for (std::size_t k = 0; k < angles_.size(); ++k)
        {
            if (!(angles_[k] > -90.0 && angles_[k] < 90.0))
                throw ConfigError(fmt::format("source angle {} deg outside (-90, 90)", angles_[k]));
            if (!(powers_[k] >= 0.0) || !std::isfinite(powers_[k]))
                throw ConfigError(fmt::format("source power must be non-negative, got {}", powers_[k]));
            for (std::size_t j = 0; j < k; ++j)
                if (angles_[j] == angles_[k])
                    throw ConfigError(fmt::format("duplicate source angle {} deg", angles_[k]));
        }
    }

    SourceScenario SourceScenario::equal_power(std::vector<double> angles_deg, int num_snapshots)
    {
        std::vector<double> powers(angles_deg.size(), 1.0);
        return SourceScenario(std::move(angles_deg), std::move(powers), num_snapshots);
    }

    NoiseSpec::NoiseSpec(double variance) : variance_(variance)
    {
        if (!(variance >= 0.0) || !std::isfinite(variance))
            throw ConfigError(fmt::format("noise variance must be non-negative, got {}", variance));
    }

    NoiseSpec NoiseSpec::from_snr_db(double snr_db) { return NoiseSpec(std::pow(10.0, -snr_db / 10.0)); }

    const char *role_name(CovRole role)
    {
        switch (role)
        {
        case CovRole::true_cov:
            return "true";
        case CovRole::sample:
            return "sample";
        case CovRole::hybrid:
            return "hybrid";
        case CovRole::reconstructed:
            return "reconstructed";
        }
        return "unknown";
    }

    CovarianceMatrix::CovarianceMatrix(CMatrix data, CovRole role) : data_(std::move(data)), role_(role)
    {
        if (data_.rows() != data_.cols() || data_.rows() == 0)
            throw DimensionError(fmt::format("covariance must be square and non-empty, got {}x{}",
                                             data_.rows(), data_.cols()));
        if (!data_.allFinite())
            throw DomainError("covariance has non-finite entries");
        const double norm = data_.norm();
        const double asym = (data_ - data_.adjoint()).norm();
        if (asym > hermitian_tolerance * std::max(norm, 1e-300))
            throw DomainError(fmt::format("covariance is not Hermitian (relative asymmetry {:.3e})",
                                          asym / std::max(norm, 1e-300)));
    }

    CVector steering_vector(const ArrayGeometry &geometry, double angle_deg)
    {
        if (!(angle_deg > -90.0 && angle_deg < 90.0))
            throw DomainError(fmt::format("steering angle {} deg outside (-90, 90)", angle_deg));
        const int m_count = geometry.num_elements();
        const double phase_step = 2.0 * pi * geometry.spacing() * std::sin(deg2rad(angle_deg));
        CVector a(m_count);
        for (int m = 0; m < m_count; ++m)
            a(m) = std::polar(1.0, phase_step * m);
        return a;
    }

    CMatrix steering_matrix(const ArrayGeometry &geometry, std::span<const double> angles_deg)
    {
        CMatrix a(geometry.num_elements(), static_cast<Eigen::Index>(angles_deg.size()));
        for (std::size_t k = 0; k < angles_deg.size(); ++k)
            a.col(static_cast<Eigen::Index>(k)) = steering_vector(geometry, angles_deg[k]);
        return a;
    }

    SignalBlock draw_signal_block(const ArrayGeometry &geometry, const SourceScenario &scenario, Rng &rng)
    {
        SignalBlock block;
        block.steering = steering_matrix(geometry, scenario.angles_deg());
        const int k_count = scenario.num_sources();
        const int n = scenario.num_snapshots();
        block.waveforms.resize(k_count, n);
        // Row-wise so that source k's waveform does not depend on the other sources.
        for (int k = 0; k < k_count; ++k)
            for (int t = 0; t < n; ++t)
                block.waveforms(k, t) = rng.complex_normal(scenario.powers()[static_cast<std::size_t>(k)]);
        return block;
    }

    SnapshotMatrix antenna_snapshots(const SignalBlock &block, const NoiseSpec &noise, Rng &rng)
    {
        const Eigen::Index m_count = block.steering.rows();
        const Eigen::Index n = block.waveforms.cols();
        SnapshotMatrix x;
        x.domain = Domain::antenna;
        x.data.resize(m_count, n);
        for (Eigen::Index t = 0; t < n; ++t)
            for (Eigen::Index m = 0; m < m_count; ++m)
                x.data(m, t) = rng.complex_normal(noise.variance());
        if (block.waveforms.rows() > 0)
            x.data.noalias() += block.steering * block.waveforms;
        return x;
    }

    SnapshotMatrix generate_snapshots(const ArrayGeometry &geometry, const SourceScenario &scenario,
                                      const NoiseSpec &noise, std::uint64_t seed)
    {
        Rng rng(seed);
        const SignalBlock block = draw_signal_block(geometry, scenario, rng);
        return antenna_snapshots(block, noise, rng);
    }

    CovarianceMatrix true_covariance(const ArrayGeometry &geometry, const SourceScenario &scenario,
                                     const NoiseSpec &noise)
    {
        const int m_count = geometry.num_elements();
        CMatrix r = noise.variance() * CMatrix::Identity(m_count, m_count);
        for (int k = 0; k < scenario.num_sources(); ++k)
        {
            const CVector a = steering_vector(geometry, scenario.angles_deg()[static_cast<std::size_t>(k)]);
            r.noalias() += scenario.powers()[static_cast<std::size_t>(k)] * (a * a.adjoint());
        }
        return CovarianceMatrix(0.5 * (r + r.adjoint()), CovRole::true_cov);
    }

    CovarianceMatrix sample_scm(const SnapshotMatrix &y)
    {
        if (y.snapshots() < 1)
            throw DimensionError("sample covariance needs at least one snapshot");
        CMatrix r = CMatrix::Zero(y.rows(), y.rows());
        r.selfadjointView<Eigen::Lower>().rankUpdate(y.data, 1.0 / y.snapshots());
        CMatrix full = r.selfadjointView<Eigen::Lower>();
        return CovarianceMatrix(std::move(full), y.domain == Domain::antenna ? CovRole::sample : CovRole::hybrid);
    }
}

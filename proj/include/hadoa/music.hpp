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

#ifndef HADOA_MUSIC_HPP
#define HADOA_MUSIC_HPP

#include "hadoa/array_model.hpp"
#include "hadoa/combiner.hpp"
#include "hadoa/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace hadoa
{
    // Angles start + i * step that lie strictly inside (-90, 90) and do not exceed stop.
    class SpectrumGrid
    {
    public:
        SpectrumGrid(double start_deg = -90.0, double stop_deg = 90.0, double coarse_step_deg = 0.1, bool refine = true);

        double start_deg() const { return start_; }
        double stop_deg() const { return stop_; }
        double step_deg() const { return step_; }
        bool refine() const { return refine_; }
        const std::vector<double> &points() const { return points_; }
        int size() const { return static_cast<int>(points_.size()); }

    private:
        double start_, stop_, step_;
        bool refine_;
        std::vector<double> points_;
    };

    enum class Method
    {
        fd_music,
        had_music,
        scm_music,
        scan,
        pilot
    };

    const char *method_name(Method m);
    Method method_from_name(const std::string &name);

    struct DoaEstimate
    {
        std::vector<double> angles_deg; // ascending
        std::vector<double> spectrum_peak_values;
        Method method = Method::fd_music;
        bool fallback = false; // fewer genuine peaks than requested
    };

    // Unit-norm steering vectors a(theta) / sqrt(M) for every grid point (M x P).
    // Tables are cached per (geometry, grid) and shared between threads.
    std::shared_ptr<const CMatrix> steering_table(const ArrayGeometry &geometry, const SpectrumGrid &grid);

    // P(theta) = 1 / (v^H E_n E_n^H v) over the columns v of `steering`
    // (normalized internally). E_n spans the dim - K smallest eigenvectors.
    RVector music_spectrum(const CMatrix &r, int K, const CMatrix &steering);

    // Antenna-domain spectrum, or RF-chain-domain spectrum with effective
    // steering W^H a(theta) when a combiner is given. Non-orthonormal
    // combiners are whitened with (W^H W)^(-1/2) on both sides.
    RVector music_spectrum(const CovarianceMatrix &r, const ArrayGeometry &geometry, int K, const SpectrumGrid &grid,
                           const Combiner *combiner = nullptr);

    struct PeakOptions
    {
        bool allow_fallback = false;
        bool log_domain = true; // parabolic refinement on log P
    };

    struct Peaks
    {
        std::vector<double> angles_deg;
        std::vector<double> values;
        bool fallback = false;
    };

    // K largest local maxima (P[i] > P[i-1] and P[i] >= P[i+1]), refined by
    // three-point parabolic interpolation when the grid asks for it. Throws
    // PeakDeficitError when fewer than K maxima exist, unless fallback is
    // allowed: then the largest remaining samples (edges included, never
    // adjacent to a chosen one) fill the gap.
    Peaks find_peaks(const RVector &spectrum, const SpectrumGrid &grid, int K, const PeakOptions &options = {});

    // Vertex offset of the parabola through (-1, y_minus), (0, y0), (1, y_plus), in
    // units of the sample spacing, clamped to [-0.5, 0.5]; 0 when not concave.
    double parabolic_offset(double y_minus, double y0, double y_plus);

    DoaEstimate estimate_doa_music(const CovarianceMatrix &r, const ArrayGeometry &geometry, int K, const SpectrumGrid &grid,
                                   const Combiner *combiner = nullptr, bool allow_fallback = false);

    // angle_deg,value rows with %.17g values.
    void write_spectrum_csv(const std::string &path, const SpectrumGrid &grid, const RVector &spectrum);
}

#endif

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

#include "hadoa/music.hpp"
#include "hadoa/hermitian_eig.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

namespace hadoa
{
    SpectrumGrid::SpectrumGrid(double start_deg, double stop_deg, double coarse_step_deg, bool refine)
        : start_(start_deg), stop_(stop_deg), step_(coarse_step_deg), refine_(refine)
    {
        if (!(start_deg >= -90.0 && start_deg < stop_deg && stop_deg <= 90.0))
            throw ConfigError(fmt::format("spectrum grid needs -90 <= start < stop <= 90, got [{}, {}]", start_deg, stop_deg));
        if (!(coarse_step_deg > 0.0))
            throw ConfigError(fmt::format("spectrum grid step must be positive, got {}", coarse_step_deg));
        const double tol = 1e-9 * coarse_step_deg;
        for (long i = 0;; ++i)
        {
            const double p = start_deg + static_cast<double>(i) * coarse_step_deg;
            if (p > stop_deg + tol || p >= 90.0)
                break;
            if (p > -90.0)
                points_.push_back(p);
        }
        if (points_.empty())
            throw ConfigError("spectrum grid has no points strictly inside (-90, 90)");
    }

    const char *method_name(Method m)
    {
        switch (m)
        {
        case Method::fd_music:
            return "fd-music";
        case Method::had_music:
            return "had-music";
        case Method::scm_music:
            return "scm-music";
        case Method::scan:
            return "scan";
        case Method::pilot:
            return "pilot";
        }
        return "unknown";
    }

    Method method_from_name(const std::string &name)
    {
        for (Method m : {Method::fd_music, Method::had_music, Method::scm_music, Method::scan, Method::pilot})
            if (name == method_name(m))
                return m;
        throw ConfigError(fmt::format("unknown method '{}' (expected fd-music, had-music, scm-music, scan or pilot)", name));
    }

    std::shared_ptr<const CMatrix> steering_table(const ArrayGeometry &geometry, const SpectrumGrid &grid)
    {
        using Key = std::tuple<int, double, double, double, double>;
        static std::mutex mutex;
        static std::map<Key, std::shared_ptr<const CMatrix>> cache;
        const Key key{geometry.num_elements(), geometry.spacing(), grid.start_deg(), grid.stop_deg(), grid.step_deg()};
        {
            std::lock_guard<std::mutex> lock(mutex);
            if (auto it = cache.find(key); it != cache.end())
                return it->second;
        }
        auto table = std::make_shared<CMatrix>(geometry.num_elements(), grid.size());
        const double scale = 1.0 / std::sqrt(static_cast<double>(geometry.num_elements()));
        for (int j = 0; j < grid.size(); ++j)
            table->col(j) = scale * steering_vector(geometry, grid.points()[static_cast<std::size_t>(j)]);
        std::lock_guard<std::mutex> lock(mutex);
        return cache.emplace(key, std::move(table)).first->second;
    }

    RVector music_spectrum(const CMatrix &r, int K, const CMatrix &steering)
    {
        const Eigen::Index dim = r.rows();
        if (K < 1 || K >= dim)
            throw DomainError(fmt::format("MUSIC needs 1 <= K < dimension, got K = {}, dimension = {}", K, dim));
        if (steering.rows() != dim)
            throw DimensionError(fmt::format("steering vectors have {} rows, covariance is {}x{}", steering.rows(), dim, dim));
        const EigenDecomposition e = hermitian_eig(r);
        const CMatrix en = e.vectors.leftCols(dim - K);
        const CMatrix proj = en.adjoint() * steering;
        RVector p(steering.cols());
        for (Eigen::Index j = 0; j < steering.cols(); ++j)
        {
            const double vnorm = steering.col(j).squaredNorm();
            const double den = vnorm > 0.0 ? proj.col(j).squaredNorm() / vnorm : 1.0;
            p(j) = 1.0 / std::max(den, DBL_MIN);
        }
        return p;
    }

    RVector music_spectrum(const CovarianceMatrix &r, const ArrayGeometry &geometry, int K, const SpectrumGrid &grid,
                           const Combiner *combiner)
    {
        const auto table = steering_table(geometry, grid);
        if (!combiner)
        {
            if (r.dimension() != geometry.num_elements())
                throw DimensionError(fmt::format("covariance is {}x{} but the array has {} elements", r.dimension(),
                                                 r.dimension(), geometry.num_elements()));
            return music_spectrum(r.data(), K, *table);
        }
        if (combiner->num_antennas() != geometry.num_elements() || r.dimension() != combiner->num_chains())
            throw DimensionError("combiner, geometry and RF-chain covariance disagree on dimensions");
        if (combiner->column_normalized())
            return music_spectrum(r.data(), K, combiner->matrix().adjoint() * *table);
        const CMatrix wh = whitening_matrix(*combiner);
        CMatrix rw = wh * r.data() * wh.adjoint();
        rw = (0.5 * (rw + rw.adjoint())).eval();
        return music_spectrum(rw, K, wh * (combiner->matrix().adjoint() * *table));
    }

    double parabolic_offset(double y_minus, double y0, double y_plus)
    {
        const double den = y_minus - 2.0 * y0 + y_plus;
        if (!(den < 0.0))
            return 0.0;
        const double d = 0.5 * (y_minus - y_plus) / den;
        return std::clamp(d, -0.5, 0.5);
    }

    Peaks find_peaks(const RVector &spectrum, const SpectrumGrid &grid, int K, const PeakOptions &options)
    {
        const Eigen::Index n = spectrum.size();
        if (n != grid.size())
            throw DimensionError(fmt::format("spectrum has {} values, grid has {} points", n, grid.size()));
        if (K < 1)
            throw DomainError(fmt::format("peak count must be positive, got {}", K));

        std::vector<Eigen::Index> maxima;
        for (Eigen::Index i = 1; i + 1 < n; ++i)
            if (spectrum(i) > spectrum(i - 1) && spectrum(i) >= spectrum(i + 1))
                maxima.push_back(i);
        // Largest first; ties resolved by index so the order is deterministic.
        auto by_value = [&](Eigen::Index a, Eigen::Index b)
        { return spectrum(a) != spectrum(b) ? spectrum(a) > spectrum(b) : a < b; };
        std::stable_sort(maxima.begin(), maxima.end(), by_value);

        Peaks out;
        std::vector<Eigen::Index> chosen(maxima.begin(), maxima.begin() + std::min<std::size_t>(maxima.size(), static_cast<std::size_t>(K)));
        std::vector<bool> refinable(chosen.size(), true);
        if (static_cast<int>(chosen.size()) < K)
        {
            if (!options.allow_fallback)
                throw PeakDeficitError(fmt::format("found {} spectral peaks, {} requested", chosen.size(), K),
                                       static_cast<int>(chosen.size()), K);
            out.fallback = true;
            std::vector<Eigen::Index> rest(static_cast<std::size_t>(n));
            std::iota(rest.begin(), rest.end(), Eigen::Index{0});
            std::stable_sort(rest.begin(), rest.end(), by_value);
            for (Eigen::Index i : rest)
            {
                if (static_cast<int>(chosen.size()) >= K)
                    break;
                const bool near = std::any_of(chosen.begin(), chosen.end(), [&](Eigen::Index c) { return std::abs(c - i) <= 1; });
                if (near)
                    continue;
                chosen.push_back(i);
                refinable.push_back(false);
            }
            if (static_cast<int>(chosen.size()) < K)
                throw PeakDeficitError(fmt::format("grid too small for {} separated peaks", K), static_cast<int>(chosen.size()), K);
        }

        std::vector<std::pair<double, double>> found;
        for (std::size_t c = 0; c < chosen.size(); ++c)
        {
            const Eigen::Index i = chosen[c];
            double angle = grid.points()[static_cast<std::size_t>(i)];
            if (grid.refine() && refinable[c])
            {
                auto f = [&](Eigen::Index j) { return options.log_domain ? std::log(spectrum(j)) : spectrum(j); };
                angle += grid.step_deg() * parabolic_offset(f(i - 1), f(i), f(i + 1));
            }
            found.emplace_back(angle, spectrum(i));
        }
        std::sort(found.begin(), found.end());
        for (const auto &[a, v] : found)
        {
            out.angles_deg.push_back(a);
            out.values.push_back(v);
        }
        return out;
    }

    DoaEstimate estimate_doa_music(const CovarianceMatrix &r, const ArrayGeometry &geometry, int K, const SpectrumGrid &grid,
                                   const Combiner *combiner, bool allow_fallback)
    {
        const RVector p = music_spectrum(r, geometry, K, grid, combiner);
        PeakOptions opt;
        opt.allow_fallback = allow_fallback;
        const Peaks peaks = find_peaks(p, grid, K, opt);
        DoaEstimate est;
        est.angles_deg = peaks.angles_deg;
        est.spectrum_peak_values = peaks.values;
        est.fallback = peaks.fallback;
        if (combiner)
            est.method = Method::had_music;
        else
            est.method = r.role() == CovRole::reconstructed ? Method::scm_music : Method::fd_music;
        return est;
    }

    void write_spectrum_csv(const std::string &path, const SpectrumGrid &grid, const RVector &spectrum)
    {
        std::ofstream os(path);
        if (!os)
            throw Error(fmt::format("cannot open '{}' for writing", path));
        os << "angle_deg,value\n";
        for (int i = 0; i < grid.size(); ++i)
            os << fmt::format("{:.17g},{:.17g}\n", grid.points()[static_cast<std::size_t>(i)], spectrum(i));
        if (!os)
            throw Error(fmt::format("write to '{}' failed", path));
    }
}

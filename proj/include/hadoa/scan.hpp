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

#ifndef HADOA_SCAN_HPP
#define HADOA_SCAN_HPP

#include "hadoa/array_model.hpp"
#include "hadoa/combiner.hpp"
#include "hadoa/music.hpp"
#include "hadoa/random.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hadoa
{
    enum class ScanStage
    {
        coarse,
        fine
    };

    // Beams packed L per combiner; beam_centers_deg runs over all columns in order.
    struct ScanCodebook
    {
        ScanStage stage = ScanStage::coarse;
        std::vector<Combiner> combiners;
        std::vector<double> beam_centers_deg;
        double beam_spacing_sin = 0.0; // largest gap between consecutive centers allowed by the stage
        int active_elements = 0;       // aperture of each beam

        int num_beams() const { return static_cast<int>(beam_centers_deg.size()); }
    };

    // Largest divisor of M whose half-power beamwidth (sine domain) covers a sector of width 2 / num_sectors.
    int coarse_subaperture(const ArrayGeometry &geometry, int num_sectors);

    // Half-power full width, in sine space, of an unweighted n-element aperture.
    double half_power_width_sin(int n, double spacing);

    // Wide beams from the first M_w elements, centers at sin(theta) = -1 + (2s + 1) / num_sectors.
    ScanCodebook build_coarse_codebook(const ArrayGeometry &geometry, int L, int num_sectors);

    // Full-aperture beams a(theta) / sqrt(M) at center - span/2 + i * step, i = 0 .. round(span / step).
    ScanCodebook build_fine_codebook(const ArrayGeometry &geometry, int L, double center_deg, double span_deg, double step_deg);

    // Time-ordered supply of antenna-domain snapshot blocks, one per slot. Single consumer.
    class SnapshotSource
    {
    public:
        virtual ~SnapshotSource() = default;
        virtual SnapshotMatrix next_slot() = 0; // throws ScanUnderrunError when exhausted
        virtual int slots_delivered() const = 0;
    };

    // Static sources, fresh waveforms and noise every slot.
    class SimulatedSource : public SnapshotSource
    {
    public:
        SimulatedSource(ArrayGeometry geometry, SourceScenario scenario, NoiseSpec noise, std::uint64_t seed, int max_slots);
        SnapshotMatrix next_slot() override;
        int slots_delivered() const override { return delivered_; }

    private:
        ArrayGeometry geometry_;
        SourceScenario scenario_;
        NoiseSpec noise_;
        Rng rng_;
        int max_slots_;
        int delivered_ = 0;
    };

    struct ScanTraceRow
    {
        int slot;
        double beam_center_deg;
        double power;
    };

    struct ScanResult
    {
        std::vector<double> powers; // per beam, mean of |w^H x|^2 over the beam's samples
        std::vector<int> selected_sectors;
        std::optional<double> refined_angle_deg;
        int slots_used = 0;
        std::vector<ScanTraceRow> trace;
    };

    // Each combiner is held for slots_per_combiner slots.
    ScanResult scan_power(const ScanCodebook &codebook, SnapshotSource &source, int slots_per_combiner, int num_selected = 1);

    struct CoarseConfig
    {
        int num_sectors = 8;
        int slots_per_combiner = 1;
        int num_selected = 1;
    };

    struct FineConfig
    {
        double step_deg = 1.0;
        double overlap = 0.25; // fraction of the sector width added on each side
        int slots_per_combiner = 1;
    };

    // Fine beams per selected sector; the same for every sector so the budget is fixed.
    int fine_beam_count(const ArrayGeometry &geometry, const CoarseConfig &coarse, const FineConfig &fine);

    // Slots a two-stage scan consumes.
    int two_stage_slot_budget(const ArrayGeometry &geometry, int L, const CoarseConfig &coarse, const FineConfig &fine);

    // Fine window [lo, hi] in degrees for a coarse sector, overlap included.
    std::pair<double, double> fine_window(int sector, const CoarseConfig &coarse, const FineConfig &fine);

    struct TwoStageResult
    {
        DoaEstimate estimate;
        ScanResult coarse;
        std::vector<ScanResult> fine;
        int slots_used = 0;
        std::vector<ScanTraceRow> trace;
    };

    TwoStageResult two_stage_estimate(const ArrayGeometry &geometry, int L, SnapshotSource &source, const CoarseConfig &coarse,
                                      const FineConfig &fine);

    // Angle in [lo_deg, hi_deg] whose beam-power pattern best matches the
    // measured powers of the given beams (least squares with a free scale).
    double pattern_fit(const std::vector<CVector> &beams, const std::vector<double> &powers, const ArrayGeometry &geometry,
                       double lo_deg, double hi_deg);

    void write_scan_trace_csv(const std::string &path, const std::vector<ScanTraceRow> &trace);
}

#endif

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

#ifndef HADOA_HARNESS_HPP
#define HADOA_HARNESS_HPP

#include "hadoa/array_model.hpp"
#include "hadoa/combiner.hpp"
#include "hadoa/music.hpp"
#include "hadoa/scan.hpp"
#include "hadoa/scm_recon.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace hadoa
{
    enum class ReconRoute
    {
        entrywise,
        toeplitz,
        beamspace
    };

    enum class PlanKind
    {
        dft_pairs, // DFT column pairs (FC)
        random,    // random phases on the architecture's support
        selection  // one antenna per chain (SE)
    };

    enum class Training
    {
        coherent,   // every slot re-observes the same source waveform block
        independent // fresh waveforms per slot
    };

    enum class Allocation
    {
        full, // N snapshots per slot
        split // N / T per slot, remainder to the last slot
    };

    struct ScmSettings
    {
        PlanKind plan = PlanKind::dft_pairs;
        CombinerSpec architecture = FullyConnected{}; // used by random plans
        int slots = 0;                                // 0 = plan default
        ReconRoute route = ReconRoute::entrywise;
        Training training = Training::coherent;
        Allocation allocation = Allocation::full;
        bool psd_projection = false;
    };

    struct ScanSettings
    {
        CoarseConfig coarse;
        FineConfig fine;
    };

    struct PilotSettings
    {
        int slots = 8;
        int frames = 100;
    };

    struct ExperimentConfig
    {
        std::vector<Method> methods{Method::fd_music, Method::scm_music, Method::had_music};
        CombinerSpec architecture = FullyConnected{}; // HAD-MUSIC combiner
        int M = 64;
        int L = 16;
        double spacing = 0.5;
        std::vector<double> angles_deg{10.0, 60.0};
        std::vector<double> powers{1.0, 1.0};
        int snapshots = 1000;
        int trials = 100;
        std::uint64_t master_seed = 20240601;
        std::vector<double> snr_db_list{-10.0, -5.0, 0.0, 5.0, 10.0};
        double grid_step_deg = 0.1;
        bool refine = true;
        ScmSettings scm;
        ScanSettings scan;
        PilotSettings pilot;
        std::vector<int> M_list{16, 32};
        std::vector<int> L_list{2, 4, 8};
        double rf_snr_db = 0.0;
        double failure_ceiling = 1.0; // failure rate above this is an error
    };

    // A problem found while validating; key names the offending setting ("array.M", "scm.slots", ...).
    struct ConfigIssue
    {
        std::string key;
        std::string message;
    };

    // Checks every setting, including combiner constraints and plan
    // identifiability for each (M, L) the config will run.
    std::vector<ConfigIssue> validate_experiment(const ExperimentConfig &config, bool include_rf_sweep = true);

    // Absolute errors after the pairing of estimates to truths that minimizes
    // the total squared error (exhaustive for K <= 4). Errors follow the truth order.
    std::vector<double> pair_and_error(const std::vector<double> &estimates, const std::vector<double> &truths);

    struct TrialOutcome
    {
        std::vector<double> errors_deg;
        std::vector<double> estimates_deg;
        bool failed = false;
    };

    // Everything a trial needs for one (M, L): combiners, prefactored solvers,
    // codebook budget. Immutable; shared by all worker threads.
    class TrialRunner
    {
    public:
        TrialRunner(const ExperimentConfig &config, int M, int L);
        ~TrialRunner();

        // One outcome per configured method, in config order.
        std::vector<TrialOutcome> run(double snr_db, std::uint64_t trial_seed) const;

        // Spectra (or scan powers) of a single trial, one per method.
        struct Spectrum
        {
            Method method;
            SpectrumGrid grid;
            RVector values;
            std::vector<ScanTraceRow> trace;
        };
        std::vector<Spectrum> spectra(double snr_db, std::uint64_t trial_seed) const;

        const ReconstructionPlan *plan() const;

    private:
        struct Impl;
        std::unique_ptr<Impl> impl_;
    };

    // Seed of trial t at sweep point x: derive_seed(master, {x, t}).
    std::uint64_t trial_seed(std::uint64_t master, int point_index, int trial_index);

    // Outcomes of every configured method for one trial.
    std::vector<TrialOutcome> run_trial(const ExperimentConfig &config, int snr_index, int trial_index);

    struct RmseCurve
    {
        std::string x_label;
        std::string method;
        std::vector<double> x;
        std::vector<double> rmse_deg;
        std::vector<int> failures;
        int trials = 0;
        double runtime_seconds = 0.0;
    };

    struct SweepOptions
    {
        int jobs = 0; // 0 = hardware concurrency
    };

    // sqrt(mean of squared errors over trials and sources), fallback estimates included.
    double rmse(const std::vector<TrialOutcome> &outcomes);

    std::vector<RmseCurve> sweep_snr(const ExperimentConfig &config, const SweepOptions &options = {});

    // One curve per (method, M) over the L axis at config.rf_snr_db; method names become "<method>/M<M>".
    std::vector<RmseCurve> sweep_array_rf(const ExperimentConfig &config, const SweepOptions &options = {});

    // Rows "x,method,rmse_deg,failures,trials" ordered by x, then by curve order.
    void write_rmse_csv(std::ostream &os, const std::vector<RmseCurve> &curves);

    // Largest failures / trials over all points and curves.
    double worst_failure_rate(const std::vector<RmseCurve> &curves);
}

#endif

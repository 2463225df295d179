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

#include "hadoa/harness.hpp"
#include "hadoa/pilot.hpp"
#include "hadoa/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <thread>

namespace hadoa
{
    namespace
    {
        // Sub-stream tags inside one trial so that a method's randomness does
        // not depend on which other methods are enabled.
        enum StreamTag : std::uint64_t
        {
            stream_signal = 1,
            stream_antenna_noise = 2,
            stream_training = 3,
            stream_scan = 4,
            stream_pilot_schedule = 5,
            stream_pilot_frames = 6,
            stream_beamspace = 7
        };

        constexpr std::uint64_t random_plan_tag = 0x706C616EULL;

        int num_sources(const ExperimentConfig &c) { return static_cast<int>(c.angles_deg.size()); }

        bool uses(const ExperimentConfig &c, Method m)
        {
            return std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end();
        }

        std::vector<int> slot_snapshot_counts(const ExperimentConfig &c, int T)
        {
            std::vector<int> n(static_cast<std::size_t>(T), c.snapshots);
            if (c.scm.allocation == Allocation::split)
            {
                const int base = c.snapshots / T;
                std::fill(n.begin(), n.end(), base);
                n.back() = c.snapshots - base * (T - 1);
            }
            return n;
        }

        ReconstructionPlan make_plan(const ExperimentConfig &c, int M, int L)
        {
            switch (c.scm.plan)
            {
            case PlanKind::dft_pairs:
                return dft_pair_plan(M, L, c.scm.slots, 1);
            case PlanKind::selection:
                return selection_pair_plan(M, L, c.scm.slots, 1);
            case PlanKind::random:
                return random_plan(c.scm.architecture, M, L, c.scm.slots, 1, derive_seed(c.master_seed, {random_plan_tag}));
            }
            throw ConfigError("unknown plan kind");
        }

        void check_point(const ExperimentConfig &c, int M, int L, const std::string &where, std::vector<ConfigIssue> &issues)
        {
            auto issue = [&](const std::string &key, const std::string &msg)
            { issues.push_back({key, where.empty() ? msg : fmt::format("{} ({})", msg, where)}); };

            if (L < 1 || L > M)
            {
                issue("array.L", fmt::format("RF chain count L = {} must be in [1, M = {}]", L, M));
                return;
            }
            const int K = num_sources(c);
            const ArrayGeometry geometry(M, c.spacing);

            if (uses(c, Method::had_music))
            {
                try
                {
                    check_spec(c.architecture, M, L);
                }
                catch (const ConfigError &e)
                {
                    issue("had.architecture", e.what());
                }
                if (L < 2)
                    issue("array.L", "had-music needs at least 2 RF chains");
            }
            if (uses(c, Method::scm_music))
            {
                try
                {
                    const ReconstructionPlan plan = make_plan(c, M, L);
                    if (c.scm.allocation == Allocation::split && c.snapshots < plan.num_slots())
                        issue("scm.allocation", fmt::format("split allocation needs N >= T ({} < {})", c.snapshots, plan.num_slots()));
                    if (c.scm.route == ReconRoute::beamspace)
                    {
                        CMatrix b(M, static_cast<Eigen::Index>(plan.num_slots()) * L);
                        for (int t = 0; t < plan.num_slots(); ++t)
                            b.middleCols(static_cast<Eigen::Index>(t) * L, L) = plan.combiners()[static_cast<std::size_t>(t)].matrix();
                        Eigen::JacobiSVD<CMatrix> svd(b);
                        const auto &s = svd.singularValues();
                        if (s(M - 1) <= s(0) / max_condition)
                            issue("scm.slots", fmt::format("beamspace rank deficit: stacked combiners do not span all {} antennas", M));
                    }
                    else
                    {
                        const IdentifiabilityReport rep = identifiability_report(
                            plan, c.scm.route == ReconRoute::toeplitz ? ReconMode::toeplitz : ReconMode::entrywise);
                        if (!rep.feasible)
                            issue("scm.slots", fmt::format("reconstruction plan has a rank deficit: numerical rank {} of {} unknowns "
                                                           "(T = {} slots, L = {}), condition estimate {:.3e}",
                                                           rep.numerical_rank, rep.unknowns, plan.num_slots(), L, rep.condition_estimate));
                    }
                }
                catch (const ConfigError &e)
                {
                    issue("scm.plan", e.what());
                }
            }
            if (uses(c, Method::scan))
            {
                try
                {
                    ScanSettings s = c.scan;
                    s.coarse.num_selected = K;
                    if (K > s.coarse.num_sectors)
                        issue("scan.sectors", fmt::format("scan selects one sector per source; {} sources but {} sectors", K, s.coarse.num_sectors));
                    else
                    {
                        const int budget = two_stage_slot_budget(geometry, L, s.coarse, s.fine);
                        if (c.snapshots < budget)
                            issue("scan.fine_step", fmt::format("scan needs {} slots but only N = {} snapshots are available", budget, c.snapshots));
                    }
                }
                catch (const ConfigError &e)
                {
                    issue("scan.fine_step", e.what());
                }
            }
            if (uses(c, Method::pilot))
            {
                if (K >= c.pilot.slots * L)
                    issue("pilot.slots", fmt::format("pilot virtual dimension K_p * L = {} must exceed the source count {}", c.pilot.slots * L, K));
                if (c.pilot.frames < K + 1)
                    issue("pilot.frames", fmt::format("pilot needs at least K + 1 = {} frames", K + 1));
            }
        }
    }

    std::vector<ConfigIssue> validate_experiment(const ExperimentConfig &c, bool include_rf_sweep)
    {
        std::vector<ConfigIssue> issues;
        auto issue = [&](const std::string &key, const std::string &msg) { issues.push_back({key, msg}); };

        if (c.methods.empty())
            issue("experiment.methods", "no methods configured");
        {
            std::set<Method> seen(c.methods.begin(), c.methods.end());
            if (seen.size() != c.methods.size())
                issue("experiment.methods", "a method is listed twice");
        }
        if (c.M < 2)
            issue("array.M", fmt::format("array needs at least 2 elements, got M = {}", c.M));
        if (!(c.spacing > 0.0))
            issue("array.spacing", fmt::format("element spacing must be positive, got {}", c.spacing));
        if (c.angles_deg.empty() || c.angles_deg.size() > 4)
            issue("sources.angles", fmt::format("need 1 to 4 sources, got {}", c.angles_deg.size()));
        if (c.powers.size() != c.angles_deg.size())
            issue("sources.powers", fmt::format("{} angles but {} powers", c.angles_deg.size(), c.powers.size()));
        for (double a : c.angles_deg)
            if (!(a > -90.0 && a < 90.0))
                issue("sources.angles", fmt::format("source angle {} outside (-90, 90)", a));
        if (std::set<double>(c.angles_deg.begin(), c.angles_deg.end()).size() != c.angles_deg.size())
            issue("sources.angles", "source angles must be distinct");
        for (double p : c.powers)
            if (!(p > 0.0))
                issue("sources.powers", fmt::format("source power must be positive, got {}", p));
        if (c.snapshots < 1)
            issue("experiment.snapshots", fmt::format("snapshot count must be positive, got {}", c.snapshots));
        if (c.trials < 1)
            issue("experiment.trials", fmt::format("trial count must be positive, got {}", c.trials));
        if (c.snr_db_list.empty())
            issue("experiment.snr_db", "SNR list is empty");
        for (double s : c.snr_db_list)
            if (!std::isfinite(s))
                issue("experiment.snr_db", "SNR values must be finite");
        if (!(c.grid_step_deg > 0.0 && c.grid_step_deg < 10.0))
            issue("music.grid_step", fmt::format("grid step must be in (0, 10) degrees, got {}", c.grid_step_deg));
        if (!(c.failure_ceiling >= 0.0 && c.failure_ceiling <= 1.0))
            issue("experiment.failure_ceiling", fmt::format("failure ceiling must be in [0, 1], got {}", c.failure_ceiling));
        if (c.pilot.slots < 1)
            issue("pilot.slots", "pilot slot count must be positive");
        if (c.scm.slots < 0)
            issue("scm.slots", "slot count must be non-negative");
        if (c.scan.coarse.slots_per_combiner < 1 || c.scan.fine.slots_per_combiner < 1)
            issue("scan.slots_per_combiner", "slots per combiner must be positive");
        if (!issues.empty())
            return issues;

        check_point(c, c.M, c.L, "", issues);
        if (include_rf_sweep)
        {
            if (c.M_list.empty() || c.L_list.empty())
                issue("sweep_rf.M", "RF sweep needs non-empty M and L lists");
            for (int M : c.M_list)
            {
                if (M < 2)
                {
                    issue("sweep_rf.M", fmt::format("array needs at least 2 elements, got M = {}", M));
                    continue;
                }
                for (int L : c.L_list)
                    check_point(c, M, L, fmt::format("sweep point M = {}, L = {}", M, L), issues);
            }
        }
        return issues;
    }

    std::vector<double> pair_and_error(const std::vector<double> &est, const std::vector<double> &truth)
    {
        if (est.size() != truth.size())
            throw DimensionError(fmt::format("pairing needs equal lengths, got {} estimates and {} truths", est.size(), truth.size()));
        if (truth.size() > 4)
            throw DomainError("exact pairing supports at most 4 sources");
        std::vector<std::size_t> perm(truth.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::vector<double> best;
        double best_cost = std::numeric_limits<double>::infinity();
        do
        {
            double cost = 0.0;
            for (std::size_t i = 0; i < truth.size(); ++i)
            {
                const double e = est[perm[i]] - truth[i];
                cost += e * e;
            }
            if (cost < best_cost)
            {
                best_cost = cost;
                best.clear();
                for (std::size_t i = 0; i < truth.size(); ++i)
                    best.push_back(std::abs(est[perm[i]] - truth[i]));
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }

    std::uint64_t trial_seed(std::uint64_t master, int point_index, int trial_index)
    {
        return derive_seed(master, {static_cast<std::uint64_t>(point_index), static_cast<std::uint64_t>(trial_index)});
    }

    // ------------------------------------------------------------------ runner

    struct TrialRunner::Impl
    {
        ExperimentConfig config;
        int M, L, K;
        ArrayGeometry geometry;
        SpectrumGrid grid;
        std::optional<Combiner> had;
        std::unique_ptr<ReconstructionPlan> plan;
        std::unique_ptr<EntrywiseSolver> entrywise;
        std::unique_ptr<ToeplitzSolver> toeplitz;
        std::vector<int> slot_snapshots;
        ScanSettings scan;
        int scan_snapshots = 0;
        int scan_budget = 0;

        Impl(const ExperimentConfig &c, int M_, int L_)
            : config(c), M(M_), L(L_), K(num_sources(c)), geometry(M_, c.spacing), grid(-90.0, 90.0, c.grid_step_deg, c.refine)
        {
        }

        TrialOutcome finish(const std::vector<double> &estimates, bool failed) const
        {
            TrialOutcome out;
            out.estimates_deg = estimates;
            out.errors_deg = pair_and_error(estimates, config.angles_deg);
            out.failed = failed;
            return out;
        }

        CovarianceMatrix reconstruct(const SignalBlock &block, const NoiseSpec &noise, std::uint64_t seed) const
        {
            Rng rng(derive_seed(seed, {stream_training}));
            if (config.scm.route == ReconRoute::beamspace)
            {
                Rng brng(derive_seed(seed, {stream_beamspace}));
                const SnapshotMatrix x = antenna_snapshots(block, noise, brng);
                return beamspace_reconstruct(plan->combiners(), block_hybrid_scm(plan->combiners(), x));
            }
            std::vector<CovarianceMatrix> hybrid;
            hybrid.reserve(static_cast<std::size_t>(plan->num_slots()));
            const SourceScenario base(config.angles_deg, config.powers, 1);
            for (int t = 0; t < plan->num_slots(); ++t)
            {
                const int n = slot_snapshots[static_cast<std::size_t>(t)];
                SignalBlock slot;
                if (config.scm.training == Training::coherent)
                    slot = SignalBlock{block.steering, block.waveforms.leftCols(n)};
                else
                    slot = draw_signal_block(geometry, SourceScenario(config.angles_deg, config.powers, n), rng);
                hybrid.push_back(sample_scm(observe(plan->combiners()[static_cast<std::size_t>(t)], slot, noise, rng)));
            }
            return config.scm.route == ReconRoute::toeplitz ? toeplitz->solve(hybrid) : entrywise->solve(hybrid);
        }
    };

    TrialRunner::TrialRunner(const ExperimentConfig &config, int M, int L) : impl_(std::make_unique<Impl>(config, M, L))
    {
        Impl &im = *impl_;
        if (uses(config, Method::had_music))
            im.had = build_combiner(config.architecture, M, L);
        if (uses(config, Method::scm_music))
        {
            im.plan = std::make_unique<ReconstructionPlan>(make_plan(config, M, L));
            im.slot_snapshots = slot_snapshot_counts(config, im.plan->num_slots());
            if (config.scm.route == ReconRoute::entrywise)
                im.entrywise = std::make_unique<EntrywiseSolver>(*im.plan);
            else if (config.scm.route == ReconRoute::toeplitz)
                im.toeplitz = std::make_unique<ToeplitzSolver>(*im.plan);
        }
        if (uses(config, Method::scan))
        {
            im.scan = config.scan;
            im.scan.coarse.num_selected = im.K;
            im.scan_budget = two_stage_slot_budget(im.geometry, L, im.scan.coarse, im.scan.fine);
            im.scan_snapshots = config.snapshots / im.scan_budget;
            if (im.scan_snapshots < 1)
                throw ConfigError(fmt::format("scan needs {} slots but only {} snapshots are available", im.scan_budget, config.snapshots));
        }
    }

    TrialRunner::~TrialRunner() = default;

    const ReconstructionPlan *TrialRunner::plan() const { return impl_->plan.get(); }

    std::vector<TrialOutcome> TrialRunner::run(double snr_db, std::uint64_t seed) const
    {
        const Impl &im = *impl_;
        const ExperimentConfig &c = im.config;
        const NoiseSpec noise = NoiseSpec::from_snr_db(snr_db);
        const SourceScenario scenario(c.angles_deg, c.powers, c.snapshots);

        Rng signal_rng(derive_seed(seed, {stream_signal}));
        const SignalBlock block = draw_signal_block(im.geometry, scenario, signal_rng);
        std::optional<SnapshotMatrix> x;
        auto antenna = [&]() -> const SnapshotMatrix &
        {
            if (!x)
            {
                Rng rng(derive_seed(seed, {stream_antenna_noise}));
                x = antenna_snapshots(block, noise, rng);
            }
            return *x;
        };

        std::vector<TrialOutcome> out;
        for (Method m : c.methods)
        {
            switch (m)
            {
            case Method::fd_music:
            {
                const DoaEstimate e = estimate_doa_music(sample_scm(antenna()), im.geometry, im.K, im.grid, nullptr, true);
                out.push_back(im.finish(e.angles_deg, e.fallback));
                break;
            }
            case Method::had_music:
            {
                const CovarianceMatrix ry = sample_scm(apply_combiner(*im.had, antenna()));
                const int k_eff = std::min(im.K, im.L - 1);
                const RVector p = music_spectrum(ry, im.geometry, k_eff, im.grid, &*im.had);
                PeakOptions opt;
                opt.allow_fallback = true;
                const Peaks peaks = find_peaks(p, im.grid, im.K, opt);
                out.push_back(im.finish(peaks.angles_deg, peaks.fallback || k_eff < im.K));
                break;
            }
            case Method::scm_music:
            {
                CovarianceMatrix r = im.reconstruct(block, noise, seed);
                if (c.scm.psd_projection)
                    r = psd_project(r);
                const DoaEstimate e = estimate_doa_music(r, im.geometry, im.K, im.grid, nullptr, true);
                out.push_back(im.finish(e.angles_deg, e.fallback));
                break;
            }
            case Method::scan:
            {
                SimulatedSource src(im.geometry, SourceScenario(c.angles_deg, c.powers, im.scan_snapshots), noise,
                                    derive_seed(seed, {stream_scan}), im.scan_budget);
                const TwoStageResult r = two_stage_estimate(im.geometry, im.L, src, im.scan.coarse, im.scan.fine);
                out.push_back(im.finish(r.estimate.angles_deg, false));
                break;
            }
            case Method::pilot:
            {
                const PilotSchedule schedule = PilotSchedule::random(c.pilot.slots, derive_seed(seed, {stream_pilot_schedule}));
                const VirtualObservation obs = collect_virtual_observation(im.geometry, scenario, noise, schedule, im.L, c.pilot.frames,
                                                                           derive_seed(seed, {stream_pilot_frames}));
                const DoaEstimate e = virtual_music(obs, im.geometry, im.K, im.grid, true);
                out.push_back(im.finish(e.angles_deg, e.fallback));
                break;
            }
            }
        }
        return out;
    }

    std::vector<TrialRunner::Spectrum> TrialRunner::spectra(double snr_db, std::uint64_t seed) const
    {
        const Impl &im = *impl_;
        const ExperimentConfig &c = im.config;
        const NoiseSpec noise = NoiseSpec::from_snr_db(snr_db);
        const SourceScenario scenario(c.angles_deg, c.powers, c.snapshots);
        Rng signal_rng(derive_seed(seed, {stream_signal}));
        const SignalBlock block = draw_signal_block(im.geometry, scenario, signal_rng);
        Rng noise_rng(derive_seed(seed, {stream_antenna_noise}));
        const SnapshotMatrix x = antenna_snapshots(block, noise, noise_rng);

        std::vector<Spectrum> out;
        for (Method m : c.methods)
        {
            Spectrum s{m, im.grid, {}, {}};
            switch (m)
            {
            case Method::fd_music:
                s.values = music_spectrum(sample_scm(x), im.geometry, im.K, im.grid);
                break;
            case Method::had_music:
                s.values = music_spectrum(sample_scm(apply_combiner(*im.had, x)), im.geometry, std::min(im.K, im.L - 1), im.grid, &*im.had);
                break;
            case Method::scm_music:
            {
                CovarianceMatrix r = im.reconstruct(block, noise, seed);
                if (c.scm.psd_projection)
                    r = psd_project(r);
                s.values = music_spectrum(r, im.geometry, im.K, im.grid);
                break;
            }
            case Method::scan:
            {
                SimulatedSource src(im.geometry, SourceScenario(c.angles_deg, c.powers, im.scan_snapshots), noise,
                                    derive_seed(seed, {stream_scan}), im.scan_budget);
                s.trace = two_stage_estimate(im.geometry, im.L, src, im.scan.coarse, im.scan.fine).trace;
                break;
            }
            case Method::pilot:
            {
                const PilotSchedule schedule = PilotSchedule::random(c.pilot.slots, derive_seed(seed, {stream_pilot_schedule}));
                const VirtualObservation obs = whiten(collect_virtual_observation(im.geometry, scenario, noise, schedule, im.L,
                                                                                  c.pilot.frames, derive_seed(seed, {stream_pilot_frames})));
                const CovarianceMatrix r = sample_scm(SnapshotMatrix{obs.frames, Domain::rf_chain});
                s.values = music_spectrum(r.data(), im.K, obs.stacked * *steering_table(im.geometry, im.grid));
                break;
            }
            }
            out.push_back(std::move(s));
        }
        return out;
    }

    std::vector<TrialOutcome> run_trial(const ExperimentConfig &config, int snr_index, int trial_index)
    {
        if (snr_index < 0 || snr_index >= static_cast<int>(config.snr_db_list.size()))
            throw DomainError(fmt::format("SNR index {} out of range", snr_index));
        const TrialRunner runner(config, config.M, config.L);
        return runner.run(config.snr_db_list[static_cast<std::size_t>(snr_index)],
                          trial_seed(config.master_seed, snr_index, trial_index));
    }

    // ------------------------------------------------------------------ sweeps

    namespace
    {
        // Runs trials 0..n-1 on up to `jobs` threads; results land at their trial index.
        std::vector<std::vector<TrialOutcome>> run_trials(const TrialRunner &runner, double snr_db, std::uint64_t master,
                                                          int point_index, int trials, int jobs)
        {
            std::vector<std::vector<TrialOutcome>> results(static_cast<std::size_t>(trials));
            std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));
            std::atomic<int> next{0};
            auto work = [&]()
            {
                for (int t = next++; t < trials; t = next++)
                {
                    try
                    {
                        results[static_cast<std::size_t>(t)] = runner.run(snr_db, trial_seed(master, point_index, t));
                    }
                    catch (...)
                    {
                        errors[static_cast<std::size_t>(t)] = std::current_exception();
                    }
                }
            };
            int workers = jobs > 0 ? jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
            workers = std::min(workers, trials);
            if (workers <= 1)
                work();
            else
            {
                std::vector<std::thread> pool;
                for (int i = 0; i < workers; ++i)
                    pool.emplace_back(work);
                for (auto &th : pool)
                    th.join();
            }
            for (const auto &e : errors)
                if (e)
                    std::rethrow_exception(e);
            return results;
        }

        void throw_if_invalid(const ExperimentConfig &config, bool rf)
        {
            const auto issues = validate_experiment(config, rf);
            if (!issues.empty())
                throw ConfigError(fmt::format("{}: {}", issues.front().key, issues.front().message));
        }
    }

    double rmse(const std::vector<TrialOutcome> &outcomes)
    {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto &o : outcomes)
            for (double e : o.errors_deg)
            {
                sum += e * e;
                ++count;
            }
        return count ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
    }

    std::vector<RmseCurve> sweep_snr(const ExperimentConfig &config, const SweepOptions &options)
    {
        throw_if_invalid(config, false);
        const auto t0 = std::chrono::steady_clock::now();
        const TrialRunner runner(config, config.M, config.L);
        std::vector<RmseCurve> curves(config.methods.size());
        for (std::size_t m = 0; m < config.methods.size(); ++m)
        {
            curves[m].x_label = "snr_db";
            curves[m].method = method_name(config.methods[m]);
            curves[m].trials = config.trials;
        }
        for (std::size_t i = 0; i < config.snr_db_list.size(); ++i)
        {
            const auto results = run_trials(runner, config.snr_db_list[i], config.master_seed, static_cast<int>(i), config.trials, options.jobs);
            for (std::size_t m = 0; m < config.methods.size(); ++m)
            {
                std::vector<TrialOutcome> per_method;
                int failures = 0;
                for (const auto &r : results)
                {
                    per_method.push_back(r[m]);
                    failures += r[m].failed ? 1 : 0;
                }
                curves[m].x.push_back(config.snr_db_list[i]);
                curves[m].rmse_deg.push_back(rmse(per_method));
                curves[m].failures.push_back(failures);
            }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (auto &c : curves)
            c.runtime_seconds = secs;
        return curves;
    }

    std::vector<RmseCurve> sweep_array_rf(const ExperimentConfig &config, const SweepOptions &options)
    {
        throw_if_invalid(config, true);
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<RmseCurve> curves;
        int point = 0;
        for (int M : config.M_list)
        {
            const std::size_t first = curves.size();
            for (Method m : config.methods)
            {
                RmseCurve c;
                c.x_label = "L";
                c.method = fmt::format("{}/M{}", method_name(m), M);
                c.trials = config.trials;
                curves.push_back(std::move(c));
            }
            for (int L : config.L_list)
            {
                const TrialRunner runner(config, M, L);
                const auto results = run_trials(runner, config.rf_snr_db, config.master_seed, point++, config.trials, options.jobs);
                for (std::size_t m = 0; m < config.methods.size(); ++m)
                {
                    std::vector<TrialOutcome> per_method;
                    int failures = 0;
                    for (const auto &r : results)
                    {
                        per_method.push_back(r[m]);
                        failures += r[m].failed ? 1 : 0;
                    }
                    RmseCurve &c = curves[first + m];
                    c.x.push_back(L);
                    c.rmse_deg.push_back(rmse(per_method));
                    c.failures.push_back(failures);
                }
            }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (auto &c : curves)
            c.runtime_seconds = secs;
        return curves;
    }

    void write_rmse_csv(std::ostream &os, const std::vector<RmseCurve> &curves)
    {
        os << "x,method,rmse_deg,failures,trials\n";
        if (curves.empty())
            return;
        const std::size_t points = curves.front().x.size();
        for (std::size_t i = 0; i < points; ++i)
            for (const auto &c : curves)
                os << fmt::format("{},{},{:.17g},{},{}\n", c.x[i], c.method, c.rmse_deg[i], c.failures[i], c.trials);
    }

    double worst_failure_rate(const std::vector<RmseCurve> &curves)
    {
        double worst = 0.0;
        for (const auto &c : curves)
            for (int f : c.failures)
                worst = std::max(worst, static_cast<double>(f) / std::max(c.trials, 1));
        return worst;
    }
}

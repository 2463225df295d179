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


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include "hadoa/config.hpp"
#include "hadoa/harness.hpp"
#include "hadoa/hermitian_eig.hpp"
#include "hadoa/pilot.hpp"
#include "hadoa/scan.hpp"
#include "hadoa/scm_recon.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <unistd.h>

using namespace hadoa;
namespace fs = std::filesystem;

namespace
{
    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

    struct Verdict
    {
        bool pass;
        std::string detail;
    };

    double rel(const CMatrix &a, const CMatrix &b) { return (a - b).norm() / b.norm(); }

    CMatrix random_cov(int M, Rng &rng)
    {
        CMatrix a(M, M);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                a(i, j) = rng.complex_normal(1.0);
        return a * a.adjoint() / M + 0.1 * CMatrix::Identity(M, M);
    }

    double median(std::vector<double> v)
    {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }

    std::string join(const std::vector<double> &v, const char *fmtspec = "{:.4g}")
    {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? " " : "") + fmt::format(fmt::runtime(fmtspec), v[i]);
        return s;
    }

    const RmseCurve &curve(const std::vector<RmseCurve> &cs, const std::string &method)
    {
        for (const auto &c : cs)
            if (c.method == method)
                return c;
        throw std::runtime_error("missing curve " + method);
    }

    // Non-increasing with at most one upward step, and that step at most 10% relative.
    bool monotone_with_slack(const std::vector<double> &r)
    {
        int inversions = 0;
        for (std::size_t i = 1; i < r.size(); ++i)
            if (r[i] > r[i - 1])
            {
                ++inversions;
                if (r[i] > 1.1 * r[i - 1])
                    return false;
            }
        return inversions <= 1;
    }

    // ----------------------------------------------------------------------------------------

    Verdict ac1_exact_reconstruction()
    {
        const auto t0 = Clock::now();
        Rng rng(2024);
        double worst = 0.0;
        int solved = 0, blind = 0;
        std::vector<std::string> bad;
        for (int M : {4, 8, 16})
            for (int L : {2, 4})
            {
                const std::vector<std::pair<std::string, CombinerSpec>> archs{
                    {"fc", FullyConnected{}},
                    {"pc", PartiallyConnected{M / L}},
                    {"se", SwitchBased{1, false}},
                    {"hds", DynamicSubarray{2, 0.5, 0}},
                    {"hds", DynamicSubarray{M, 0.5, 0}},
                };
                for (const auto &[tag, spec] : archs)
                {
                    ReconstructionPlan plan = tag == "fc"   ? dft_pair_plan(M, L, 0, 1)
                                              : tag == "se" ? selection_pair_plan(M, L, 0, 1)
                                                            : random_plan(spec, M, L, 0, 1, derive_seed(7, {static_cast<std::uint64_t>(M), static_cast<std::uint64_t>(L)}));
                    CMatrix b(M, plan.num_slots() * L);
                    for (int t = 0; t < plan.num_slots(); ++t)
                        b.middleCols(t * L, L) = plan.combiners()[static_cast<std::size_t>(t)].matrix();
                    auto record = [&](const std::string &route, double e)
                    {
                        worst = std::max(worst, e);
                        ++solved;
                        if (!(e <= 1e-8))
                            bad.push_back(fmt::format("{}/{} M={} L={}: {:.2e}", tag, route, M, L, e));
                    };

                    const CMatrix r = random_cov(M, rng);
                    if (identifiability_report(plan).feasible)
                        record("entrywise", rel(entrywise_reconstruct(plan, project_covariance(plan, r)).data(), r));
                    else
                        ++blind;
                    if (identifiability_report(plan, ReconMode::toeplitz).feasible)
                    {
                        const CMatrix rt =
                            true_covariance(ArrayGeometry(M), SourceScenario({-30.0, 12.0}, {1.0, 2.0}, 1), NoiseSpec(0.2)).data();
                        record("toeplitz", rel(toeplitz_reconstruct(plan, project_covariance(plan, rt)).data(), rt));
                    }
                    else
                        bad.push_back(fmt::format("{}/toeplitz M={} L={}: plan not full rank", tag, M, L));
                    const CovarianceMatrix block(b.adjoint() * r * b, CovRole::hybrid);
                    record("beamspace", rel(beamspace_reconstruct(plan.combiners(), block).data(), r));
                }
            }
        const double secs = seconds_since(t0);
        const bool pass = bad.empty() && secs < 10.0;
        std::string detail = fmt::format("{} reconstructions, max rel err {:.2e} (tol 1e-8), {:.2f} s (limit 10 s); "
                                         "entrywise has no full-rank plan in {} PC/HDS cases with one chain per group",
                                         solved, worst, secs, blind);
        if (!bad.empty())
            detail += "; failing: " + bad.front();
        return {pass, detail};
    }

    Verdict ac2_music_correctness()
    {
        Rng rng(77);
        const SpectrumGrid grid;
        double worst = 0.0;
        int cases = 0;
        for (int M : {4, 8, 12, 16})
            for (int K : {1, 2})
                for (int t = 0; t < 25; ++t)
                {
                    std::vector<double> th;
                    while (static_cast<int>(th.size()) < K)
                    {
                        const double a = -80.0 + 0.1 * std::floor(1600.0 * rng.uniform());
                        if (std::all_of(th.begin(), th.end(), [&](double o) { return std::abs(o - a) >= 10.0; }))
                            th.push_back(a);
                    }
                    std::sort(th.begin(), th.end());
                    const std::vector<double> p(th.size(), 1.0);
                    const CovarianceMatrix r = true_covariance(ArrayGeometry(M), SourceScenario(th, p, 1), NoiseSpec(0.1));
                    const DoaEstimate e = estimate_doa_music(r, ArrayGeometry(M), K, grid);
                    for (int k = 0; k < K; ++k)
                        worst = std::max(worst, std::abs(e.angles_deg[static_cast<std::size_t>(k)] - th[static_cast<std::size_t>(k)]));
                    ++cases;
                }

        double worst_resid = 0.0;
        for (int t = 0; t < 100; ++t)
        {
            const int n = 2 + static_cast<int>(rng.uniform() * 31);
            CMatrix a(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    a(i, j) = rng.complex_normal(1.0);
            const CMatrix r = (0.5 * (a + a.adjoint())).eval();
            const EigenDecomposition e = hermitian_eig(r);
            const CMatrix resid = r * e.vectors - e.vectors * e.values.cast<cplx>().asDiagonal();
            worst_resid = std::max(worst_resid, resid.norm() / r.norm());
        }
        const bool pass = worst <= 0.01 && worst_resid <= 1e-8;
        return {pass, fmt::format("{} on-grid cases (M<=16, K<=2), max error {:.2e} deg (tol 0.01); "
                                  "eig residual max {:.2e} ||R||_F over 100 matrices (tol 1e-8)",
                                  cases, worst, worst_resid)};
    }

    Verdict ac3_fig2_shape(const std::string &source_dir)
    {
        const auto t0 = Clock::now();
        const ExperimentConfig c = load_config(source_dir + "/configs/fig2.cfg").config;
        const auto curves = sweep_snr(c);
        const auto &fd = curve(curves, "fd-music").rmse_deg;
        const auto &scm = curve(curves, "scm-music").rmse_deg;
        const auto &had = curve(curves, "had-music").rmse_deg;
        bool a = true, b = true;
        for (std::size_t i = 0; i < c.snr_db_list.size(); ++i)
        {
            a = a && scm[i] <= 2.0 * fd[i];
            if (c.snr_db_list[i] <= -5.0)
                b = b && had[i] >= 3.0 * scm[i];
        }
        const bool mono = monotone_with_slack(fd) && monotone_with_slack(scm) && monotone_with_slack(had);
        const double secs = seconds_since(t0);
        return {a && b && mono && secs <= 600.0,
                fmt::format("(a) scm<=2fd {} (b) had>=3scm at <=-5 dB {} (c) monotone {}; fd [{}] scm [{}] had [{}]; "
                            "M={} L={} {} trials, {:.0f} s",
                            a ? "ok" : "NO", b ? "ok" : "NO", mono ? "ok" : "NO", join(fd), join(scm), join(had), c.M, c.L,
                            c.trials, secs)};
    }

    Verdict ac4_fig3_shape(const std::string &source_dir)
    {
        const auto t0 = Clock::now();
        const ExperimentConfig c = load_config(source_dir + "/configs/fig3.cfg").config;
        const auto curves = sweep_array_rf(c);
        bool a = true, b = true, cc = true;
        std::string spreads;
        for (int M : c.M_list)
        {
            const auto &scm = curve(curves, fmt::format("scm-music/M{}", M)).rmse_deg;
            const auto &had = curve(curves, fmt::format("had-music/M{}", M)).rmse_deg;
            const auto [lo, hi] = std::minmax_element(scm.begin(), scm.end());
            const double spread = (*hi - *lo) / *lo;
            spreads += fmt::format(" M{}={:.1f}%", M, 100.0 * spread);
            a = a && spread <= 0.25;
            const auto l2 = std::find(c.L_list.begin(), c.L_list.end(), 2) - c.L_list.begin();
            const auto l8 = std::find(c.L_list.begin(), c.L_list.end(), 8) - c.L_list.begin();
            b = b && had[static_cast<std::size_t>(l2)] > had[static_cast<std::size_t>(l8)];
        }
        const auto &s16 = curve(curves, "scm-music/M16").rmse_deg;
        const auto &s32 = curve(curves, "scm-music/M32").rmse_deg;
        for (std::size_t i = 0; i < s16.size(); ++i)
            cc = cc && s32[i] < s16[i];
        const double secs = seconds_since(t0);
        return {a && b && cc && secs <= 600.0,
                fmt::format("(a) scm spread{} (b) had L=2 > L=8 {} (c) scm M32 < M16 {}; scm M16 [{}] M32 [{}]; {} trials, {:.0f} s",
                            spreads, b ? "ok" : "NO", cc ? "ok" : "NO", join(s16), join(s32), c.trials, secs)};
    }

    Verdict ac5_scan()
    {
        const ArrayGeometry g(64);
        const int L = 4;
        CoarseConfig coarse;
        FineConfig fine;
        const int budget = two_stage_slot_budget(g, L, coarse, fine);
        const int per_slot = std::max(1, 1000 / budget);
        Rng rng(5150);
        int correct = 0;
        std::map<double, double> worst_err;
        for (double snr : {20.0, 30.0})
            for (int t = 0; t < 100; ++t)
            {
                const int sector = static_cast<int>(rng.uniform() * coarse.num_sectors);
                const double width = 2.0 / coarse.num_sectors;
                const double u = -1.0 + width * (sector + 0.25 + 0.5 * rng.uniform());
                const double truth = rad2deg(std::asin(u));
                SimulatedSource src(g, SourceScenario::equal_power({truth}, per_slot), NoiseSpec::from_snr_db(snr),
                                    derive_seed(99, {static_cast<std::uint64_t>(snr), static_cast<std::uint64_t>(t)}), budget);
                const TwoStageResult r = two_stage_estimate(g, L, src, coarse, fine);
                if (snr == 20.0)
                    correct += r.coarse.selected_sectors.front() == sector;
                worst_err[snr] = std::max(worst_err[snr], std::abs(r.estimate.angles_deg[0] - truth));
            }
        const bool pass = correct >= 99 && worst_err[20.0] <= fine.step_deg && worst_err[30.0] <= fine.step_deg;
        return {pass, fmt::format("coarse correct sector {}/100 at 20 dB; max two-stage error {:.3f} deg at 20 dB, {:.3f} at 30 dB "
                                  "(fine step {} deg); M=64 L={} budget {} slots x {} snapshots",
                                  correct, worst_err[20.0], worst_err[30.0], fine.step_deg, L, budget, per_slot)};
    }

    Verdict ac6_pilot()
    {
        const ArrayGeometry g(64);
        const SourceScenario sc = SourceScenario::equal_power({10.0, 60.0}, 1);
        std::vector<double> med;
        for (int kp : {2, 4, 8})
        {
            std::vector<double> rmse;
            for (std::uint64_t t = 0; t < 100; ++t)
            {
                const auto obs = collect_virtual_observation(g, sc, NoiseSpec::from_snr_db(0.0),
                                                             PilotSchedule::random(kp, derive_seed(31, {t})), 4, 100, derive_seed(32, {t}));
                const DoaEstimate e = virtual_music(obs, g, 2, SpectrumGrid(), true);
                const auto err = pair_and_error(e.angles_deg, {10.0, 60.0});
                rmse.push_back(std::sqrt(0.5 * (err[0] * err[0] + err[1] * err[1])));
            }
            med.push_back(median(rmse));
        }
        const bool mono = med[1] <= med[0] && med[2] <= med[1];

        const ArrayGeometry g8(8);
        const std::vector<Combiner> halves{dft_combiner(8, {0, 1, 2, 3}), dft_combiner(8, {4, 5, 6, 7})};
        double worst = 0.0;
        for (std::uint64_t t = 0; t < 20; ++t)
        {
            Rng prng(t);
            const std::vector<cplx> pilots{std::polar(1.0, 2.0 * pi * prng.uniform()), std::polar(1.0, 2.0 * pi * prng.uniform())};
            const auto obs = collect_virtual_observation(g8, SourceScenario::equal_power({-12.0, 31.0}, 1), NoiseSpec::from_snr_db(10.0),
                                                         pilots, halves, 2000, derive_seed(33, {t}));
            const DoaEstimate v = virtual_music(obs, g8, 2, SpectrumGrid());
            // G is invertible, so G^-1 z is a full-digital snapshot set of the same realization.
            const SnapshotMatrix x{obs.stacked.fullPivLu().solve(obs.frames), Domain::antenna};
            const DoaEstimate fd = estimate_doa_music(sample_scm(x), g8, 2, SpectrumGrid());
            for (int k = 0; k < 2; ++k)
                worst = std::max(worst, std::abs(v.angles_deg[static_cast<std::size_t>(k)] - fd.angles_deg[static_cast<std::size_t>(k)]));
        }
        return {mono && worst <= 0.05,
                fmt::format("median RMSE over K_p = 2, 4, 8: {} deg (non-increasing {}); unitary G vs FD-MUSIC on the same realization, max gap {:.2e} deg over 20 draws (tol 0.05, M=8)",
                            join(med), mono ? "ok" : "NO", worst)};
    }

    std::string read_file(const fs::path &p)
    {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    Verdict ac7_determinism(const std::string &cli, const std::string &source_dir)
    {
        const fs::path root = fs::temp_directory_path() / fmt::format("hadoa_acceptance_{}", static_cast<long long>(::getpid()));
        fs::remove_all(root);
        struct Run
        {
            std::string name;
            std::string args;
        };
        const std::vector<Run> commands{
            {"sweep-snr", fmt::format("sweep-snr {}/configs/fig2.cfg --trials 4 --seed 7", source_dir)},
            {"sweep-rf", fmt::format("sweep-rf {}/configs/fig3.cfg --trials 3", source_dir)},
            {"scan-pilot", fmt::format("sweep-snr {}/configs/scan_pilot.cfg --trials 3", source_dir)},
            {"spectrum", fmt::format("spectrum {}/configs/scan_pilot.cfg --snr 10", source_dir)},
        };
        int files = 0;
        std::vector<std::string> bad;
        for (const auto &cmd : commands)
        {
            std::vector<fs::path> dirs;
            for (int jobs : {1, 3, 1})
            {
                const fs::path out = root / fmt::format("{}_{}_{}", cmd.name, jobs, dirs.size());
                fs::create_directories(out);
                const std::string line = fmt::format("\"{}\" {} --jobs {} --out \"{}\" > /dev/null 2>&1", cli, cmd.args, jobs, out.string());
                if (std::system(line.c_str()) != 0)
                    bad.push_back(cmd.name + ": command failed");
                dirs.push_back(out);
            }
            for (const auto &entry : fs::directory_iterator(dirs[0]))
            {
                if (entry.path().extension() != ".csv")
                    continue;
                ++files;
                const std::string ref = read_file(entry.path());
                for (std::size_t d = 1; d < dirs.size(); ++d)
                    if (read_file(dirs[d] / entry.path().filename()) != ref)
                        bad.push_back(fmt::format("{}: {} differs", cmd.name, entry.path().filename().string()));
            }
        }
        fs::remove_all(root);
        const bool pass = bad.empty() && files >= 4;
        std::string detail = fmt::format("{} commands x 3 runs (--jobs 1, 3, 1), {} CSV files compared byte for byte", commands.size(), files);
        if (!bad.empty())
            detail += "; " + bad.front();
        return {pass, detail};
    }
}

int main()
{
    const std::string source_dir = HADOA_SOURCE_DIR;
    const std::string cli = HADOA_CLI_PATH;
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"AC1 exact reconstruction", ac1_exact_reconstruction},
        {"AC2 MUSIC correctness", ac2_music_correctness},
        {"AC3 RMSE vs SNR shape", [&] { return ac3_fig2_shape(source_dir); }},
        {"AC4 RMSE vs RF chains shape", [&] { return ac4_fig3_shape(source_dir); }},
        {"AC5 scan pipeline", ac5_scan},
        {"AC6 pilot pipeline", ac6_pilot},
        {"AC7 CLI determinism", [&] { return ac7_determinism(cli, source_dir); }},
    };
    int failed = 0;
    for (const auto &[name, check] : criteria)
    {
        Verdict v;
        try
        {
            v = check();
        }
        catch (const std::exception &e)
        {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        fmt::print("{} {}: {}\n", v.pass ? "PASS" : "FAIL", name, v.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}

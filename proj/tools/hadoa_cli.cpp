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

// Command-line front end: validate configs, run sweeps, dump spectra, demo.

#include "hadoa/config.hpp"
#include "hadoa/harness.hpp"
#include "hadoa/music.hpp"
#include "hadoa/scan.hpp"
#include "hadoa/svg_plot.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;

namespace
{
    enum Exit
    {
        exit_ok = 0,
        exit_runtime = 1,
        exit_config = 2,
        exit_failure_ceiling = 3,
        exit_io = 4
    };

    struct IoError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct CommonOptions
    {
        std::string config_path;
        std::string out_dir = ".";
        std::optional<std::uint64_t> seed;
        std::optional<int> trials;
        int jobs = 0;
        bool emit_svg = false;
    };

    // Loads, applies overrides and validates. Prints diagnostics and returns nullopt on failure.
    std::optional<hadoa::LoadedConfig> load_checked(const CommonOptions &o, bool rf_sweep)
    {
        hadoa::LoadedConfig loaded;
        try
        {
            loaded = hadoa::load_config(o.config_path);
        }
        catch (const hadoa::ConfigFileError &e)
        {
            std::cerr << fmt::format("{}:{}: {}\n", o.config_path, e.line, e.what());
            return std::nullopt;
        }
        if (o.seed)
            loaded.config.master_seed = *o.seed;
        if (o.trials)
            loaded.config.trials = *o.trials;
        if (rf_sweep)
            loaded.has_rf_sweep = true;
        const auto diags = hadoa::diagnose(loaded);
        for (const auto &d : diags)
            std::cerr << fmt::format("{}:{}: {}: {}\n", o.config_path, d.line, d.key, d.message);
        if (!diags.empty())
            return std::nullopt;
        return loaded;
    }

    void require_out_dir(const std::string &dir)
    {
        std::error_code ec;
        if (!fs::is_directory(dir, ec))
            throw IoError(fmt::format("output directory '{}' does not exist", dir));
    }

    void write_text(const fs::path &path, const std::string &text)
    {
        std::ofstream os(path, std::ios::binary);
        if (!os)
            throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
        os << text;
        if (!os)
            throw IoError(fmt::format("write to '{}' failed", path.string()));
    }

    std::string manifest(const std::string &command, const CommonOptions &o, const hadoa::ExperimentConfig &config,
                         const std::vector<std::string> &outputs, double wall_seconds)
    {
        std::string s;
        s += "# hadoa run manifest\n";
        s += fmt::format("# tool = hadoa {}\n", HADOA_VERSION);
        s += fmt::format("# command = {}\n", command);
        s += fmt::format("# config_path = {}\n", fs::absolute(o.config_path).string());
        for (const auto &f : outputs)
            s += fmt::format("# output = {}\n", f);
        s += fmt::format("# seed = {}\n", config.master_seed);
        s += fmt::format("# trials = {}\n", config.trials);
        s += fmt::format("# jobs = {}\n", o.jobs);
        s += fmt::format("# wall_time_s = {:.3f}\n", wall_seconds);
        s += fmt::format("# reproduce: hadoa {} <this file> --out <dir>\n", command);
        s += "\n";
        s += hadoa::to_config_text(config);
        return s;
    }

    std::string stem_of(const std::string &path) { return fs::path(path).stem().string(); }

    int run_sweep(const CommonOptions &o, bool rf)
    {
        const auto loaded = load_checked(o, rf);
        if (!loaded)
            return exit_config;
        require_out_dir(o.out_dir);
        const hadoa::ExperimentConfig &config = loaded->config;

        const auto t0 = std::chrono::steady_clock::now();
        hadoa::SweepOptions opts;
        opts.jobs = o.jobs;
        const auto curves = rf ? hadoa::sweep_array_rf(config, opts) : hadoa::sweep_snr(config, opts);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const std::string stem = stem_of(o.config_path);
        std::ostringstream csv;
        hadoa::write_rmse_csv(csv, curves);
        std::vector<std::string> outputs{stem + ".csv"};
        write_text(fs::path(o.out_dir) / (stem + ".csv"), csv.str());
        if (o.emit_svg)
        {
            hadoa::PlotOptions p;
            p.title = rf ? fmt::format("RMSE vs RF chains, SNR {} dB", config.rf_snr_db) : fmt::format("RMSE vs SNR, M = {}, L = {}", config.M, config.L);
            p.x_label = rf ? "RF chains L" : "SNR (dB)";
            write_text(fs::path(o.out_dir) / (stem + ".svg"), hadoa::render_svg(curves, p));
            outputs.push_back(stem + ".svg");
        }
        write_text(fs::path(o.out_dir) / (stem + ".manifest"), manifest(rf ? "sweep-rf" : "sweep-snr", o, config, outputs, secs));
        std::cout << csv.str();

        const double worst = hadoa::worst_failure_rate(curves);
        if (worst > config.failure_ceiling)
        {
            std::cerr << fmt::format("estimator failure rate {:.3f} exceeds the configured ceiling {:.3f}\n", worst, config.failure_ceiling);
            return exit_failure_ceiling;
        }
        return exit_ok;
    }

    int run_spectrum(const CommonOptions &o, std::optional<double> snr, int trial)
    {
        const auto loaded = load_checked(o, false);
        if (!loaded)
            return exit_config;
        require_out_dir(o.out_dir);
        const hadoa::ExperimentConfig &config = loaded->config;
        const double snr_db = snr ? *snr : config.snr_db_list.front();

        const auto t0 = std::chrono::steady_clock::now();
        const hadoa::TrialRunner runner(config, config.M, config.L);
        const auto spectra = runner.spectra(snr_db, hadoa::trial_seed(config.master_seed, 0, trial));
        const std::string stem = stem_of(o.config_path);
        std::vector<std::string> outputs;
        for (const auto &s : spectra)
        {
            std::ostringstream os;
            std::string name;
            if (s.method == hadoa::Method::scan)
            {
                name = fmt::format("{}_scan_trace.csv", stem);
                os << "slot,beam_center_deg,power\n";
                for (const auto &r : s.trace)
                    os << fmt::format("{},{:.17g},{:.17g}\n", r.slot, r.beam_center_deg, r.power);
            }
            else
            {
                name = fmt::format("{}_spectrum_{}.csv", stem, hadoa::method_name(s.method));
                os << "angle_deg,value\n";
                for (int i = 0; i < s.grid.size(); ++i)
                    os << fmt::format("{:.17g},{:.17g}\n", s.grid.points()[static_cast<std::size_t>(i)], s.values(i));
            }
            write_text(fs::path(o.out_dir) / name, os.str());
            outputs.push_back(name);
            std::cout << "wrote " << (fs::path(o.out_dir) / name).string() << "\n";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        hadoa::ExperimentConfig echo = config;
        echo.snr_db_list = {snr_db};
        std::string m = manifest("spectrum", o, echo, outputs, secs);
        m.insert(m.find("\n\n"), fmt::format("\n# trial = {}", trial));
        write_text(fs::path(o.out_dir) / (stem + "_spectrum.manifest"), m);
        return exit_ok;
    }

    int run_validate(const CommonOptions &o)
    {
        hadoa::LoadedConfig loaded;
        try
        {
            loaded = hadoa::load_config(o.config_path);
        }
        catch (const hadoa::ConfigFileError &e)
        {
            std::cerr << fmt::format("{}:{}: {}\n", o.config_path, e.line, e.what());
            return exit_config;
        }
        const auto diags = hadoa::diagnose(loaded);
        for (const auto &d : diags)
            std::cerr << fmt::format("{}:{}: {}: {}\n", o.config_path, d.line, d.key, d.message);
        if (!diags.empty())
            return exit_config;

        const auto &c = loaded.config;
        std::cout << fmt::format("{}: valid (M = {}, L = {}, {} method(s), {} trial(s))\n", o.config_path, c.M, c.L, c.methods.size(), c.trials);
        if (std::find(c.methods.begin(), c.methods.end(), hadoa::Method::scm_music) != c.methods.end() &&
            c.scm.route != hadoa::ReconRoute::beamspace)
        {
            const hadoa::TrialRunner runner(c, c.M, c.L);
            if (runner.plan() == nullptr)
                return exit_ok;
            const auto rep = hadoa::identifiability_report(*runner.plan(), c.scm.route == hadoa::ReconRoute::toeplitz
                                                                                 ? hadoa::ReconMode::toeplitz
                                                                                 : hadoa::ReconMode::entrywise);
            std::cout << fmt::format("  reconstruction plan: {} slots, rank {} of {}, condition {:.3g}\n", runner.plan()->num_slots(),
                                     rep.numerical_rank, rep.unknowns, rep.condition_estimate);
        }
        return exit_ok;
    }

    int run_demo(int jobs)
    {
        hadoa::ExperimentConfig c;
        c.methods = {hadoa::Method::fd_music, hadoa::Method::scm_music, hadoa::Method::had_music};
        c.M = 16;
        c.L = 4;
        c.snr_db_list = {-10.0, -5.0, 0.0, 10.0};
        c.trials = 40;
        hadoa::SweepOptions opts;
        opts.jobs = jobs;
        const auto t0 = std::chrono::steady_clock::now();
        const auto curves = hadoa::sweep_snr(c, opts);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        std::cout << fmt::format("M = {}, L = {}, sources at 10 and 60 deg, N = {}, {} trials per point\n\n", c.M, c.L, c.snapshots, c.trials);
        std::cout << fmt::format("{:<12}", "method");
        for (double s : c.snr_db_list)
            std::cout << fmt::format("{:>12}", fmt::format("{} dB", s));
        std::cout << "\n";
        for (const auto &curve : curves)
        {
            std::cout << fmt::format("{:<12}", curve.method);
            for (double r : curve.rmse_deg)
                std::cout << fmt::format("{:>12.4f}", r);
            std::cout << "\n";
        }
        std::cout << fmt::format("\nRMSE in degrees; {:.1f} s\n", secs);
        return exit_ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"hadoa: DOA estimation benchmarks for hybrid analog-digital arrays"};
    app.set_version_flag("--version", std::string("hadoa ") + HADOA_VERSION);
    app.require_subcommand(1);

    CommonOptions common;
    std::optional<double> snr;
    int trial = 0;

    auto add_common = [&](CLI::App *sub, bool outputs)
    {
        sub->add_option("config", common.config_path, "experiment config file")->required();
        if (!outputs)
            return;
        sub->add_option("--out", common.out_dir, "existing output directory")->capture_default_str();
        sub->add_option("--seed", common.seed, "master seed (overrides the config)");
        sub->add_option("--trials", common.trials, "Monte Carlo trials (overrides the config)")->check(CLI::PositiveNumber);
        sub->add_option("--jobs", common.jobs, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
        sub->add_flag("--emit-svg", common.emit_svg, "also write an SVG chart");
    };

    auto *validate = app.add_subcommand("validate", "check a config, including plan identifiability");
    add_common(validate, false);
    auto *sweep_snr = app.add_subcommand("sweep-snr", "RMSE versus SNR");
    add_common(sweep_snr, true);
    auto *sweep_rf = app.add_subcommand("sweep-rf", "RMSE versus RF chain count for several array sizes");
    add_common(sweep_rf, true);
    auto *spectrum = app.add_subcommand("spectrum", "dump one trial's spectra (angle_deg,value) and scan trace");
    add_common(spectrum, true);
    spectrum->add_option("--snr", snr, "SNR in dB (default: first configured value)");
    spectrum->add_option("--trial", trial, "trial index")->check(CLI::NonNegativeNumber);
    auto *demo = app.add_subcommand("demo", "short M = 16 comparison of FD-, SCM- and HAD-MUSIC");
    demo->add_option("--jobs", common.jobs, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_config;
    }

    try
    {
        if (*validate)
            return run_validate(common);
        if (*sweep_snr)
            return run_sweep(common, false);
        if (*sweep_rf)
            return run_sweep(common, true);
        if (*spectrum)
            return run_spectrum(common, snr, trial);
        if (*demo)
            return run_demo(common.jobs);
    }
    catch (const IoError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    }
    catch (const hadoa::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_ok;
}

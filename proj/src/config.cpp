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

#include "hadoa/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace hadoa
{
    namespace
    {
        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        std::vector<std::string> split_list(const std::string &v)
        {
            std::vector<std::string> out;
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                item = trim(item);
                if (!item.empty())
                    out.push_back(item);
            }
            return out;
        }

        double to_double(const std::string &v, int line, const std::string &key)
        {
            errno = 0;
            char *end = nullptr;
            const double d = std::strtod(v.c_str(), &end);
            if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(d))
                throw ConfigFileError(fmt::format("{} expects a number, got '{}'", key, v), line);
            return d;
        }

        long long to_integer(const std::string &v, int line, const std::string &key)
        {
            errno = 0;
            char *end = nullptr;
            const long long i = std::strtoll(v.c_str(), &end, 10);
            if (v.empty() || *end != '\0' || errno == ERANGE)
                throw ConfigFileError(fmt::format("{} expects an integer, got '{}'", key, v), line);
            return i;
        }

        int to_int(const std::string &v, int line, const std::string &key)
        {
            const long long i = to_integer(v, line, key);
            if (i < -1000000000LL || i > 1000000000LL)
                throw ConfigFileError(fmt::format("{} is out of range: {}", key, v), line);
            return static_cast<int>(i);
        }

        bool to_bool(const std::string &v, int line, const std::string &key)
        {
            if (v == "true" || v == "yes" || v == "on" || v == "1")
                return true;
            if (v == "false" || v == "no" || v == "off" || v == "0")
                return false;
            throw ConfigFileError(fmt::format("{} expects true or false, got '{}'", key, v), line);
        }

        template <class E>
        E to_enum(const std::string &v, int line, const std::string &key, const std::vector<std::pair<std::string, E>> &names)
        {
            for (const auto &[n, e] : names)
                if (n == v)
                    return e;
            std::string allowed;
            for (const auto &[n, e] : names)
                allowed += (allowed.empty() ? "" : ", ") + n;
            throw ConfigFileError(fmt::format("{} must be one of {}; got '{}'", key, allowed, v), line);
        }

        const std::vector<std::pair<std::string, PlanKind>> plan_names{
            {"dft-pairs", PlanKind::dft_pairs}, {"random", PlanKind::random}, {"selection", PlanKind::selection}};
        const std::vector<std::pair<std::string, ReconRoute>> route_names{
            {"entrywise", ReconRoute::entrywise}, {"toeplitz", ReconRoute::toeplitz}, {"beamspace", ReconRoute::beamspace}};
        const std::vector<std::pair<std::string, Training>> training_names{
            {"coherent", Training::coherent}, {"independent", Training::independent}};
        const std::vector<std::pair<std::string, Allocation>> allocation_names{
            {"full", Allocation::full}, {"split", Allocation::split}};

        template <class E>
        std::string enum_name(E e, const std::vector<std::pair<std::string, E>> &names)
        {
            for (const auto &[n, v] : names)
                if (v == e)
                    return n;
            return "?";
        }

        std::string join_doubles(const std::vector<double> &v)
        {
            std::string s;
            for (double d : v)
                s += (s.empty() ? "" : ", ") + fmt::format("{}", d);
            return s;
        }

        std::string join_ints(const std::vector<int> &v)
        {
            std::string s;
            for (int d : v)
                s += (s.empty() ? "" : ", ") + std::to_string(d);
            return s;
        }
    }

    LoadedConfig parse_config(const std::string &text)
    {
        LoadedConfig out;
        ExperimentConfig &c = out.config;

        using Setter = std::function<void(const std::string &, int, const std::string &)>;
        const std::map<std::string, Setter> setters{
            {"experiment.methods",
             [&](const std::string &v, int line, const std::string &key)
             {
                 c.methods.clear();
                 for (const auto &m : split_list(v))
                 {
                     try
                     {
                         c.methods.push_back(method_from_name(m));
                     }
                     catch (const ConfigError &e)
                     {
                         throw ConfigFileError(fmt::format("{}: {}", key, e.what()), line);
                     }
                 }
             }},
            {"experiment.snapshots", [&](const std::string &v, int line, const std::string &key) { c.snapshots = to_int(v, line, key); }},
            {"experiment.trials", [&](const std::string &v, int line, const std::string &key) { c.trials = to_int(v, line, key); }},
            {"experiment.seed",
             [&](const std::string &v, int line, const std::string &key)
             {
                 errno = 0;
                 char *end = nullptr;
                 const unsigned long long s = std::strtoull(v.c_str(), &end, 10);
                 if (v.empty() || v[0] == '-' || *end != '\0' || errno == ERANGE)
                     throw ConfigFileError(fmt::format("{} expects an unsigned 64-bit integer, got '{}'", key, v), line);
                 c.master_seed = s;
             }},
            {"experiment.snr_db",
             [&](const std::string &v, int line, const std::string &key)
             {
                 c.snr_db_list.clear();
                 for (const auto &s : split_list(v))
                     c.snr_db_list.push_back(to_double(s, line, key));
             }},
            {"experiment.failure_ceiling", [&](const std::string &v, int line, const std::string &key) { c.failure_ceiling = to_double(v, line, key); }},
            {"array.M", [&](const std::string &v, int line, const std::string &key) { c.M = to_int(v, line, key); }},
            {"array.L", [&](const std::string &v, int line, const std::string &key) { c.L = to_int(v, line, key); }},
            {"array.spacing", [&](const std::string &v, int line, const std::string &key) { c.spacing = to_double(v, line, key); }},
            {"sources.angles",
             [&](const std::string &v, int line, const std::string &key)
             {
                 c.angles_deg.clear();
                 for (const auto &s : split_list(v))
                     c.angles_deg.push_back(to_double(s, line, key));
             }},
            {"sources.powers",
             [&](const std::string &v, int line, const std::string &key)
             {
                 c.powers.clear();
                 for (const auto &s : split_list(v))
                     c.powers.push_back(to_double(s, line, key));
             }},
            {"music.grid_step", [&](const std::string &v, int line, const std::string &key) { c.grid_step_deg = to_double(v, line, key); }},
            {"music.refine", [&](const std::string &v, int line, const std::string &key) { c.refine = to_bool(v, line, key); }},
            {"had.architecture",
             [&](const std::string &v, int line, const std::string &key)
             {
                 try
                 {
                     c.architecture = spec_from_string(v);
                 }
                 catch (const ConfigError &e)
                 {
                     throw ConfigFileError(fmt::format("{}: {}", key, e.what()), line);
                 }
             }},
            {"scm.plan", [&](const std::string &v, int line, const std::string &key) { c.scm.plan = to_enum(v, line, key, plan_names); }},
            {"scm.architecture",
             [&](const std::string &v, int line, const std::string &key)
             {
                 try
                 {
                     c.scm.architecture = spec_from_string(v);
                 }
                 catch (const ConfigError &e)
                 {
                     throw ConfigFileError(fmt::format("{}: {}", key, e.what()), line);
                 }
             }},
            {"scm.slots", [&](const std::string &v, int line, const std::string &key) { c.scm.slots = to_int(v, line, key); }},
            {"scm.route", [&](const std::string &v, int line, const std::string &key) { c.scm.route = to_enum(v, line, key, route_names); }},
            {"scm.training", [&](const std::string &v, int line, const std::string &key) { c.scm.training = to_enum(v, line, key, training_names); }},
            {"scm.allocation", [&](const std::string &v, int line, const std::string &key) { c.scm.allocation = to_enum(v, line, key, allocation_names); }},
            {"scm.psd_projection", [&](const std::string &v, int line, const std::string &key) { c.scm.psd_projection = to_bool(v, line, key); }},
            {"scan.sectors", [&](const std::string &v, int line, const std::string &key) { c.scan.coarse.num_sectors = to_int(v, line, key); }},
            {"scan.fine_step", [&](const std::string &v, int line, const std::string &key) { c.scan.fine.step_deg = to_double(v, line, key); }},
            {"scan.overlap", [&](const std::string &v, int line, const std::string &key) { c.scan.fine.overlap = to_double(v, line, key); }},
            {"scan.slots_per_combiner",
             [&](const std::string &v, int line, const std::string &key)
             { c.scan.coarse.slots_per_combiner = c.scan.fine.slots_per_combiner = to_int(v, line, key); }},
            {"pilot.slots", [&](const std::string &v, int line, const std::string &key) { c.pilot.slots = to_int(v, line, key); }},
            {"pilot.frames", [&](const std::string &v, int line, const std::string &key) { c.pilot.frames = to_int(v, line, key); }},
            {"sweep_rf.M",
             [&](const std::string &v, int line, const std::string &key)
             {
                 c.M_list.clear();
                 for (const auto &s : split_list(v))
                     c.M_list.push_back(to_int(s, line, key));
             }},
            {"sweep_rf.L",
             [&](const std::string &v, int line, const std::string &key)
             {
                 c.L_list.clear();
                 for (const auto &s : split_list(v))
                     c.L_list.push_back(to_int(s, line, key));
             }},
            {"sweep_rf.snr_db", [&](const std::string &v, int line, const std::string &key) { c.rf_snr_db = to_double(v, line, key); }},
        };
        std::set<std::string> sections;
        for (const auto &[k, s] : setters)
            sections.insert(k.substr(0, k.find('.')));

        std::istringstream is(text);
        std::string raw, section;
        int line = 0;
        while (std::getline(is, raw))
        {
            ++line;
            std::string s = raw;
            const auto comment = s.find_first_of("#;");
            if (comment != std::string::npos)
                s = s.substr(0, comment);
            s = trim(s);
            if (s.empty())
                continue;
            if (s.front() == '[')
            {
                if (s.back() != ']')
                    throw ConfigFileError("section header must end with ']'", line);
                section = trim(s.substr(1, s.size() - 2));
                if (!sections.count(section))
                    throw ConfigFileError(fmt::format("unknown section [{}]", section), line);
                if (out.section_lines.count(section))
                    throw ConfigFileError(fmt::format("section [{}] appears twice", section), line);
                out.section_lines[section] = line;
                if (section == "sweep_rf")
                    out.has_rf_sweep = true;
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigFileError(fmt::format("expected 'key = value', got '{}'", s), line);
            if (section.empty())
                throw ConfigFileError("key outside of any section", line);
            const std::string key = section + "." + trim(s.substr(0, eq));
            const std::string value = trim(s.substr(eq + 1));
            const auto it = setters.find(key);
            if (it == setters.end())
                throw ConfigFileError(fmt::format("unknown key '{}'", key), line);
            if (out.key_lines.count(key))
                throw ConfigFileError(fmt::format("key '{}' set twice (first on line {})", key, out.key_lines[key]), line);
            out.key_lines[key] = line;
            it->second(value, line, key);
        }
        return out;
    }

    LoadedConfig load_config(const std::string &path)
    {
        std::ifstream is(path);
        if (!is)
            throw ConfigFileError(fmt::format("cannot read config file '{}'", path), 0);
        std::stringstream ss;
        ss << is.rdbuf();
        return parse_config(ss.str());
    }

    std::vector<ConfigDiagnostic> diagnose(const LoadedConfig &loaded)
    {
        std::vector<ConfigDiagnostic> out;
        for (const auto &issue : validate_experiment(loaded.config, loaded.has_rf_sweep))
        {
            int line = 0;
            if (auto it = loaded.key_lines.find(issue.key); it != loaded.key_lines.end())
                line = it->second;
            else
            {
                // Fall back to a related key in the same section, then the section header.
                const std::string section = issue.key.substr(0, issue.key.find('.'));
                for (const auto &[k, l] : loaded.key_lines)
                    if (k.rfind(section + ".", 0) == 0 && (line == 0 || l < line))
                        line = l;
                if (line == 0)
                    if (auto s = loaded.section_lines.find(section); s != loaded.section_lines.end())
                        line = s->second;
            }
            out.push_back({line, issue.key, issue.message});
        }
        return out;
    }

    std::string to_config_text(const ExperimentConfig &c)
    {
        std::string methods;
        for (Method m : c.methods)
            methods += (methods.empty() ? "" : ", ") + std::string(method_name(m));
        std::string s;
        s += "[experiment]\n";
        s += fmt::format("methods = {}\n", methods);
        s += fmt::format("snapshots = {}\n", c.snapshots);
        s += fmt::format("trials = {}\n", c.trials);
        s += fmt::format("seed = {}\n", c.master_seed);
        s += fmt::format("snr_db = {}\n", join_doubles(c.snr_db_list));
        s += fmt::format("failure_ceiling = {}\n", c.failure_ceiling);
        s += "\n[array]\n";
        s += fmt::format("M = {}\nL = {}\nspacing = {}\n", c.M, c.L, c.spacing);
        s += "\n[sources]\n";
        s += fmt::format("angles = {}\npowers = {}\n", join_doubles(c.angles_deg), join_doubles(c.powers));
        s += "\n[music]\n";
        s += fmt::format("grid_step = {}\nrefine = {}\n", c.grid_step_deg, c.refine ? "true" : "false");
        s += "\n[had]\n";
        s += fmt::format("architecture = {}\n", spec_to_string(c.architecture));
        s += "\n[scm]\n";
        s += fmt::format("plan = {}\narchitecture = {}\nslots = {}\nroute = {}\ntraining = {}\nallocation = {}\npsd_projection = {}\n",
                         enum_name(c.scm.plan, plan_names), spec_to_string(c.scm.architecture), c.scm.slots,
                         enum_name(c.scm.route, route_names), enum_name(c.scm.training, training_names),
                         enum_name(c.scm.allocation, allocation_names), c.scm.psd_projection ? "true" : "false");
        s += "\n[scan]\n";
        s += fmt::format("sectors = {}\nfine_step = {}\noverlap = {}\nslots_per_combiner = {}\n", c.scan.coarse.num_sectors,
                         c.scan.fine.step_deg, c.scan.fine.overlap, c.scan.coarse.slots_per_combiner);
        s += "\n[pilot]\n";
        s += fmt::format("slots = {}\nframes = {}\n", c.pilot.slots, c.pilot.frames);
        s += "\n[sweep_rf]\n";
        s += fmt::format("M = {}\nL = {}\nsnr_db = {}\n", join_ints(c.M_list), join_ints(c.L_list), c.rf_snr_db);
        return s;
    }
}

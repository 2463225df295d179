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

#ifndef HADOA_CONFIG_HPP
#define HADOA_CONFIG_HPP

#include "hadoa/harness.hpp"
#include "hadoa/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace hadoa
{
    // Syntax or value error at a given line of a config file (1-based; 0 = whole file).
    class ConfigFileError : public ConfigError
    {
    public:
        ConfigFileError(const std::string &what, int line) : ConfigError(what), line(line) {}
        int line;
    };

    struct LoadedConfig
    {
        ExperimentConfig config;
        std::map<std::string, int> key_lines; // "section.key" -> line
        std::map<std::string, int> section_lines;
        bool has_rf_sweep = false;
    };

    // Sectioned key = value text; '#' and ';' start comments. See docs/config.md.
    LoadedConfig parse_config(const std::string &text);
    LoadedConfig load_config(const std::string &path);

    struct ConfigDiagnostic
    {
        int line;
        std::string key;
        std::string message;
    };

    // validate_experiment with issues mapped back to config lines.
    std::vector<ConfigDiagnostic> diagnose(const LoadedConfig &loaded);

    // Fully resolved config in the same file format; loading it reproduces the config.
    std::string to_config_text(const ExperimentConfig &config);
}

#endif

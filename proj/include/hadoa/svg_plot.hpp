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

#ifndef HADOA_SVG_PLOT_HPP
#define HADOA_SVG_PLOT_HPP

#include "hadoa/harness.hpp"

#include <string>
#include <vector>

namespace hadoa
{
    struct PlotOptions
    {
        std::string title;
        std::string x_label;
        std::string y_label = "RMSE (deg)";
        bool log_y = true;
        int width = 720;
        int height = 480;
    };

    // Standalone SVG line chart of RMSE curves: axes, ticks, legend, optional log y axis.
    std::string render_svg(const std::vector<RmseCurve> &curves, const PlotOptions &options);
    void write_svg(const std::string &path, const std::vector<RmseCurve> &curves, const PlotOptions &options);
}

#endif

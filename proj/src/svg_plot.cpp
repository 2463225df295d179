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

#include "hadoa/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <limits>

namespace hadoa
{
    namespace
    {
        const char *palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

        std::string escape(const std::string &s)
        {
            std::string out;
            for (char c : s)
            {
                switch (c)
                {
                case '&':
                    out += "&amp;";
                    break;
                case '<':
                    out += "&lt;";
                    break;
                case '>':
                    out += "&gt;";
                    break;
                case '"':
                    out += "&quot;";
                    break;
                default:
                    out += c;
                }
            }
            return out;
        }
    }

    std::string render_svg(const std::vector<RmseCurve> &curves, const PlotOptions &opt)
    {
        const double left = 70, right = 170, top = 40, bottom = 55;
        const double pw = opt.width - left - right, ph = opt.height - top - bottom;

        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
        double ymin = xmin, ymax = -xmin;
        for (const auto &c : curves)
            for (std::size_t i = 0; i < c.x.size(); ++i)
            {
                xmin = std::min(xmin, c.x[i]);
                xmax = std::max(xmax, c.x[i]);
                const double y = c.rmse_deg[i];
                if (opt.log_y && !(y > 0.0))
                    continue;
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        if (!std::isfinite(xmin))
        {
            xmin = 0.0;
            xmax = 1.0;
        }
        if (xmax == xmin)
            xmax = xmin + 1.0;
        if (!std::isfinite(ymin))
        {
            ymin = opt.log_y ? 1e-3 : 0.0;
            ymax = 1.0;
        }

        double ylo, yhi;
        if (opt.log_y)
        {
            ylo = std::floor(std::log10(ymin));
            yhi = std::ceil(std::log10(ymax));
            if (yhi == ylo)
                yhi = ylo + 1.0;
        }
        else
        {
            ylo = std::min(0.0, ymin);
            yhi = ymax > ylo ? ymax * 1.05 : ylo + 1.0;
        }

        auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
        auto py = [&](double y)
        {
            const double v = opt.log_y ? std::log10(std::max(y, std::pow(10.0, ylo))) : y;
            return top + ph - (v - ylo) / (yhi - ylo) * ph;
        };

        std::string s;
        s += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
                         "font-family=\"sans-serif\" font-size=\"12\">\n",
                         opt.width, opt.height, opt.width, opt.height);
        s += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", opt.width, opt.height);
        s += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", left + pw / 2, escape(opt.title));

        // Grid and ticks.
        if (opt.log_y)
        {
            for (int e = static_cast<int>(ylo); e <= static_cast<int>(yhi); ++e)
            {
                const double y = py(std::pow(10.0, e));
                s += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n", left, y, left + pw, y);
                s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">1e{}</text>\n", left - 6, y + 4, e);
            }
        }
        else
        {
            for (int i = 0; i <= 5; ++i)
            {
                const double v = ylo + (yhi - ylo) * i / 5.0;
                const double y = py(v);
                s += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n", left, y, left + pw, y);
                s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n", left - 6, y + 4, v);
            }
        }
        std::vector<double> xs;
        for (const auto &c : curves)
            xs.insert(xs.end(), c.x.begin(), c.x.end());
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        for (double x : xs)
        {
            const double X = px(x);
            s += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#eee\"/>\n", X, top, X, top + ph);
            s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", X, top + ph + 18, x);
        }
        s += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"black\"/>\n", left, top, pw, ph);
        s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2, opt.height - 14.0, escape(opt.x_label));
        s += fmt::format("<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1f})\">{}</text>\n",
                         top + ph / 2, top + ph / 2, escape(opt.y_label));

        for (std::size_t k = 0; k < curves.size(); ++k)
        {
            const auto &c = curves[k];
            const char *color = palette[k % (sizeof(palette) / sizeof(palette[0]))];
            std::string pts;
            for (std::size_t i = 0; i < c.x.size(); ++i)
                pts += fmt::format("{}{:.1f},{:.1f}", pts.empty() ? "" : " ", px(c.x[i]), py(c.rmse_deg[i]));
            s += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", pts, color);
            for (std::size_t i = 0; i < c.x.size(); ++i)
                s += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"{}\"/>\n", px(c.x[i]), py(c.rmse_deg[i]), color);
            const double ly = top + 10 + 18.0 * static_cast<double>(k);
            s += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                             left + pw + 12, ly, left + pw + 36, ly, color);
            s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", left + pw + 42, ly + 4, escape(c.method));
        }
        s += "</svg>\n";
        return s;
    }

    void write_svg(const std::string &path, const std::vector<RmseCurve> &curves, const PlotOptions &options)
    {
        std::ofstream os(path);
        if (!os)
            throw Error(fmt::format("cannot open '{}' for writing", path));
        os << render_svg(curves, options);
        if (!os)
            throw Error(fmt::format("write to '{}' failed", path));
    }
}

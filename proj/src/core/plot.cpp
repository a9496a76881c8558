/* Copyright 2026 The dldkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "dldkit/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace dldkit::plot {

namespace {
constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}
}  // namespace

std::string TrainLogSvg(const trainer::TrainLog& log) {
  const int last_epoch = log.rows.empty() ? 1 : std::max(2, log.rows.back().epoch);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double epoch) {
    return kLeft + (epoch - 1.0) / (last_epoch - 1.0) * plot_w;
  };
  auto py = [&](double value) { return kTop + (1.0 - value) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" "
      << "font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 10; i += 2) {
    const double v = i / 10.0;
    svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << Num(py(v)) << "\" x2=\""
        << kLeft << "\" y2=\"" << Num(py(v)) << "\" stroke=\"black\"/>"
        << "<text x=\"" << kLeft - 8 << "\" y=\"" << Num(py(v) + 4)
        << "\" text-anchor=\"end\">" << Num(v) << "</text>\n";
  }
  const int step = std::max(1, last_epoch / 9);
  for (int e = 1; e <= last_epoch; e += step) {
    svg << "<line x1=\"" << Num(px(e)) << "\" y1=\"" << kTop + plot_h
        << "\" x2=\"" << Num(px(e)) << "\" y2=\"" << kTop + plot_h + 4
        << "\" stroke=\"black\"/>"
        << "<text x=\"" << Num(px(e)) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << e << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">epoch</text>\n";

  auto polyline = [&](auto value_of, const char* color, const char* name,
                      int legend_row) {
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : log.rows) {
      svg << Num(px(r.epoch)) << ',' << Num(py(value_of(r))) << ' ';
    }
    svg << "\"/>\n";
    const double ly = kTop + 12 + 14 * legend_row;
    svg << "<line x1=\"" << kLeft + plot_w - 120 << "\" y1=\"" << ly
        << "\" x2=\"" << kLeft + plot_w - 100 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>"
        << "<text x=\"" << kLeft + plot_w - 95 << "\" y=\"" << ly + 4 << "\">"
        << name << "</text>\n";
  };
  polyline([](const trainer::TrainRow& r) { return r.acc; }, "#1f77b4",
           "ACC (noisy)", 0);
  polyline([](const trainer::TrainRow& r) { return r.clean_acc; }, "#d62728",
           "clean acc", 1);
  polyline([](const trainer::TrainRow& r) { return r.corrupted_fit; },
           "#7f7f7f", "corrupted fit", 2);

  if (log.el) {
    const double x = px(*log.el);
    svg << "<line x1=\"" << Num(x) << "\" y1=\"" << kTop << "\" x2=\"" << Num(x)
        << "\" y2=\"" << kTop + plot_h
        << "\" stroke=\"black\" stroke-dasharray=\"4,3\"/>"
        << "<text x=\"" << Num(x + 4) << "\" y=\"" << kTop + 10 << "\">EL="
        << *log.el << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace dldkit::plot

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

#include "sepcd/experiment.hpp"

namespace sepcd {
namespace {

struct Metric {
  const char* label;
  std::optional<Quartiles> ExperimentGroup::*field;
};

Metric headline(Suite suite) {
  switch (suite) {
    case Suite::RealWorld: return {"mod_fraction", &ExperimentGroup::mod_fraction};
    case Suite::EstimatorR2: return {"r_squared", &ExperimentGroup::r_squared};
    default: return {"nmi", &ExperimentGroup::nmi};
  }
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void write_summary_svg(std::ostream& out, const ExperimentReport& report) {
  const Metric metric = headline(report.options.suite);
  constexpr double kWidthPerGroup = 110.0, kHeight = 320.0, kLeft = 60.0, kTop = 40.0;
  constexpr double kPlot = 220.0;
  const double width = kLeft + 20.0 + kWidthPerGroup * static_cast<double>(std::max<std::size_t>(1, report.groups.size()));

  double lo = 0.0, hi = 1.0;
  for (const auto& g : report.groups) {
    if (const auto& q = g.*metric.field) {
      lo = std::min(lo, q->min);
      hi = std::max(hi, q->max);
    }
  }
  auto y = [&](double v) { return kTop + kPlot * (hi - v) / (hi - lo); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kLeft) << "\" y=\"20\">" << to_string(report.options.suite) << ": "
      << metric.label << "</text>\n";
  for (double tick : {lo, (lo + hi) / 2.0, hi}) {
    out << "<line x1=\"" << num(kLeft - 5) << "\" x2=\"" << num(width - 20) << "\" y1=\""
        << num(y(tick)) << "\" y2=\"" << num(y(tick)) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y(tick) + 4)
        << "\" text-anchor=\"end\">" << num(tick) << "</text>\n";
  }
  for (std::size_t i = 0; i < report.groups.size(); ++i) {
    const auto& g = report.groups[i];
    const double cx = kLeft + kWidthPerGroup * (static_cast<double>(i) + 0.5);
    out << "<text x=\"" << num(cx) << "\" y=\"" << num(kTop + kPlot + 20)
        << "\" text-anchor=\"middle\">" << g.name << "</text>\n";
    const auto& q = g.*metric.field;
    if (!q) continue;
    const double half = 25.0;
    out << "<line x1=\"" << num(cx) << "\" x2=\"" << num(cx) << "\" y1=\"" << num(y(q->max))
        << "\" y2=\"" << num(y(q->min)) << "\" stroke=\"black\"/>\n";
    out << "<rect x=\"" << num(cx - half) << "\" y=\"" << num(y(q->q3)) << "\" width=\""
        << num(2 * half) << "\" height=\"" << num(std::max(1.0, y(q->q1) - y(q->q3)))
        << "\" fill=\"#9cc3e6\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << num(cx - half) << "\" x2=\"" << num(cx + half) << "\" y1=\""
        << num(y(q->median)) << "\" y2=\"" << num(y(q->median))
        << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(cx) << "\" y=\"" << num(kTop + kPlot + 36)
        << "\" text-anchor=\"middle\" fill=\"#555\">n=" << q->count << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace sepcd

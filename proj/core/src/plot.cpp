#include "shearlab/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace shearlab {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMargin = 60.0;

struct Axis {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool log = true;

  [[nodiscard]] bool accepts(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  [[nodiscard]] double map(double v) const { return log ? std::log10(v) : v; }
  void include(double v) {
    if (!accepts(v)) return;
    lo = std::min(lo, map(v));
    hi = std::max(hi, map(v));
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  [[nodiscard]] double frac(double v) const { return (map(v) - lo) / (hi - lo); }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

void frame(std::ostringstream& svg, const Axis& ax, const Axis& ay, const PlotOptions& o) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin / 2 << "\" width=\"" << kWidth - 1.5 * kMargin
      << "\" height=\"" << kHeight - 1.5 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\">" << escape(o.title) << "</text>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 8 << "\" text-anchor=\"middle\">"
      << escape(o.x_label) << (ax.log ? " (log10)" : "") << "</text>\n";
  svg << "<text x=\"14\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 14 " << kHeight / 2
      << ")\" text-anchor=\"middle\">" << escape(o.y_label) << (ay.log ? " (log10)" : "") << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = i / 4.0;
    const double vx = ax.lo + fx * (ax.hi - ax.lo);
    const double vy = ay.lo + fx * (ay.hi - ay.lo);
    const double px = kMargin + fx * (kWidth - 1.5 * kMargin);
    const double py = kHeight - kMargin - fx * (kHeight - 1.5 * kMargin);
    svg << "<text x=\"" << px << "\" y=\"" << kHeight - kMargin + 14 << "\" text-anchor=\"middle\">"
        << format_double(std::round(vx * 100) / 100) << "</text>\n";
    svg << "<text x=\"" << kMargin - 4 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">"
        << format_double(std::round(vy * 100) / 100) << "</text>\n";
  }
}

double px_of(const Axis& a, double v) { return kMargin + a.frac(v) * (kWidth - 1.5 * kMargin); }
double py_of(const Axis& a, double v) { return kHeight - kMargin - a.frac(v) * (kHeight - 1.5 * kMargin); }

const std::array<const char*, 6> kColours{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string line_plot_svg(const std::vector<PlotSeries>& series, const PlotOptions& options) {
  Axis ax{.log = options.log_x};
  Axis ay{.log = options.log_y};
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (ax.accepts(s.x[i]) && ay.accepts(s.y[i])) {
        ax.include(s.x[i]);
        ay.include(s.y[i]);
      }
    }
  }
  ax.finish();
  ay.finish();
  std::ostringstream svg;
  frame(svg, ax, ay, options);
  for (std::size_t n = 0; n < series.size(); ++n) {
    const auto& s = series[n];
    const char* colour = kColours[n % kColours.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (ax.accepts(s.x[i]) && ay.accepts(s.y[i])) {
        svg << px_of(ax, s.x[i]) << "," << py_of(ay, s.y[i]) << " ";
      }
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kMargin / 2 + 14 * (n + 1)
        << "\" text-anchor=\"end\" fill=\"" << colour << "\">" << escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string threshold_map_svg(const Table& cells) {
  const auto eps = cells.column("eps");
  const auto mu = cells.column("mu");
  const auto label = cells.column("label");
  Axis ax;
  Axis ay;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    ax.include(mu[i]);
    ay.include(eps[i]);
  }
  ax.finish();
  ay.finish();
  std::ostringstream svg;
  frame(svg, ax, ay, {"echo threshold map (filled: suppressed)", "mu", "eps"});
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!ax.accepts(mu[i]) || !ay.accepts(eps[i])) continue;
    svg << "<circle cx=\"" << px_of(ax, mu[i]) << "\" cy=\"" << py_of(ay, eps[i]) << "\" r=\"5\" stroke=\"black\" fill=\""
        << (label[i] > 0.5 ? "#1f77b4" : "white") << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const std::string& svg, const std::filesystem::path& path) { write_file_atomic(path, svg); }

}  // namespace shearlab

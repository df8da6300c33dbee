#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>

#include "tomolift/bench.hpp"

namespace tomolift {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 150.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 60.0;

const char* colour(Method m) {
  switch (m) {
    case Method::Fixed:
      return "#1f77b4";
    case Method::TwoStep:
      return "#d62728";
    case Method::ThreeStep:
      return "#2ca02c";
  }
  return "#000000";
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Maps data values to pixels on one axis, optionally in log10.
struct Axis {
  bool log = false;
  double lo = 0.0;
  double hi = 1.0;
  double pix_lo = 0.0;
  double pix_hi = 1.0;

  double t(double v) const { return log ? std::log10(v) : v; }
  double operator()(double v) const { return pix_lo + (t(v) - lo) / (hi - lo) * (pix_hi - pix_lo); }
};

Axis make_axis(double vmin, double vmax, bool log, double pix_lo, double pix_hi) {
  Axis a;
  a.log = log;
  a.pix_lo = pix_lo;
  a.pix_hi = pix_hi;
  if (log) {
    a.lo = std::floor(std::log10(vmin));
    a.hi = std::ceil(std::log10(vmax));
  } else {
    const double pad = vmax > vmin ? 0.05 * (vmax - vmin) : 0.5;
    a.lo = vmin - pad;
    a.hi = vmax + pad;
  }
  if (a.hi <= a.lo) a.hi = a.lo + 1.0;
  return a;
}

}  // namespace

void write_sweep_svg(std::ostream& os, const std::vector<AggregateRow>& rows) {
  const bool log_x = !rows.empty() && rows.front().variable == SweepVariable::N;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  std::map<Method, std::vector<std::pair<double, double>>> series;
  for (const auto& r : rows) {
    if (!(r.trials > 0) || !(r.mean_mse > 0.0)) continue;
    if (log_x && !(r.value > 0.0)) continue;
    series[r.method].emplace_back(r.value, r.mean_mse);
    xmin = std::min(xmin, r.value);
    xmax = std::max(xmax, r.value);
    ymin = std::min(ymin, r.mean_mse);
    ymax = std::max(ymax, r.mean_mse);
  }
  if (series.empty()) {
    xmin = log_x ? 1.0 : 0.0;
    xmax = log_x ? 10.0 : 1.0;
    ymin = 1e-12;
    ymax = 1.0;
  }
  const Axis x = make_axis(xmin, xmax, log_x, kLeft, kWidth - kRight);
  const Axis y = make_axis(ymin, ymax, true, kHeight - kBottom, kTop);
  const std::string xname = rows.empty() ? "none" : sweep_variable_name(rows.front().variable);

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" data-x-scale=\"" << (log_x ? "log" : "linear")
     << "\" data-y-scale=\"log\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g stroke=\"black\" fill=\"none\">\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
     << kHeight - kBottom << "\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
     << "\"/>\n";
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";

  for (double e = y.lo; e <= y.hi + 1e-9; e += 1.0) {
    const double py = y(std::pow(10.0, e));
    os << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << num(py) << "\" x2=\"" << kLeft << "\" y2=\"" << num(py)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  }
  if (log_x) {
    for (double e = x.lo; e <= x.hi + 1e-9; e += 1.0) {
      const double px = x(std::pow(10.0, e));
      os << "<text x=\"" << num(px) << "\" y=\"" << kHeight - kBottom + 18 << "\" text-anchor=\"middle\">1e" << e
         << "</text>\n";
    }
  } else {
    for (int i = 0; i <= 4; ++i) {
      const double v = x.lo + (x.hi - x.lo) * i / 4.0;
      os << "<text x=\"" << num(x(v)) << "\" y=\"" << kHeight - kBottom + 18 << "\" text-anchor=\"middle\">"
         << num(v) << "</text>\n";
    }
  }
  os << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << kHeight - 15
     << "\" text-anchor=\"middle\">" << xname << "</text>\n";
  os << "<text x=\"20\" y=\"" << num((kTop + kHeight - kBottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << num((kTop + kHeight - kBottom) / 2) << ")\">mean MSE</text>\n";

  double legend_y = kTop + 10;
  for (const auto& [method, pts] : series) {
    os << "<polyline fill=\"none\" stroke=\"" << colour(method) << "\" stroke-width=\"1.5\" data-method=\""
       << method_name(method) << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) os << (i ? " " : "") << num(x(pts[i].first)) << ',' << num(y(pts[i].second));
    os << "\"/>\n";
    for (const auto& [vx, vy] : pts) {
      os << "<circle cx=\"" << num(x(vx)) << "\" cy=\"" << num(y(vy)) << "\" r=\"3\" fill=\"" << colour(method)
         << "\"/>\n";
    }
    os << "<text x=\"" << kWidth - kRight + 10 << "\" y=\"" << num(legend_y) << "\" fill=\"" << colour(method)
       << "\">" << method_name(method) << "</text>\n";
    legend_y += 16;
  }
  os << "</g>\n</svg>\n";
}

}  // namespace tomolift

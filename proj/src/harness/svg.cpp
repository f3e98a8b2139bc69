#include "nag/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nag/harness/csv.hpp"

namespace nag::harness {
namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct Axis {
  bool log = true;
  double lo = 0, hi = 1;

  double map(double v) const { return log ? std::log10(v) : v; }
  double frac(double v) const { return hi > lo ? (map(v) - lo) / (hi - lo) : 0.5; }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

}  // namespace

std::vector<std::size_t> log_spaced_indices(std::size_t n, std::size_t count, bool keep_zero) {
  std::vector<std::size_t> out;
  if (n == 0) return out;
  if (keep_zero) out.push_back(0);
  if (n == 1) return out;
  const double top = std::log(static_cast<double>(n - 1));
  for (std::size_t i = 0; i < count; ++i) {
    const double frac = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    const auto idx = static_cast<std::size_t>(std::llround(std::exp(frac * top)));
    const std::size_t clamped = std::clamp<std::size_t>(idx, 1, n - 1);
    if (out.empty() || out.back() < clamped) out.push_back(clamped);
  }
  return out;
}

std::string render_svg(const PlotSpec& spec) {
  Axis ax{spec.log_x}, ay{spec.log_y};
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], ax.log) || !usable(s.y[i], ay.log)) continue;
      xmin = std::min(xmin, ax.map(s.x[i]));
      xmax = std::max(xmax, ax.map(s.x[i]));
      ymin = std::min(ymin, ay.map(s.y[i]));
      ymax = std::max(ymax, ay.map(s.y[i]));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (ax.log) xmin = std::floor(xmin), xmax = std::max(std::ceil(xmax), xmin + 1);
  if (ay.log) ymin = std::floor(ymin), ymax = std::max(std::ceil(ymax), ymin + 1);
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  ax.lo = xmin, ax.hi = xmax, ay.lo = ymin, ay.hi = ymax;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + ax.frac(v) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - ay.frac(v)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
     << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks at decades on log axes, five intervals otherwise.
  auto ticks = [](const Axis& a) {
    std::vector<double> t;
    if (a.log) {
      const double step = std::max(1.0, std::ceil((a.hi - a.lo) / 8.0));
      for (double e = a.lo; e <= a.hi + 1e-9; e += step) t.push_back(std::pow(10.0, e));
    } else {
      for (int i = 0; i <= 5; ++i) t.push_back(a.lo + (a.hi - a.lo) * i / 5.0);
    }
    return t;
  };
  for (double t : ticks(ax)) {
    const double x = px(t);
    os << "<line x1=\"" << x << "\" y1=\"" << kTop + ph << "\" x2=\"" << x << "\" y2=\"" << kTop + ph + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
  }
  for (double t : ticks(ay)) {
    const double y = py(t);
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
     << escape(spec.x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << kTop + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(spec.y_label) << "</text>\n";

  double legend_y = kTop + 10;
  for (const auto& s : spec.series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (s.dashed) os << " stroke-dasharray=\"6,4\"";
    os << " points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], ax.log) || !usable(s.y[i], ay.log)) continue;
      os << (first ? "" : " ") << num(px(s.x[i])) << ',' << num(py(s.y[i]));
      first = false;
    }
    os << "\"/>\n";
    const double lx = kLeft + pw + 12;
    os << "<line x1=\"" << lx << "\" y1=\"" << legend_y << "\" x2=\"" << lx + 24 << "\" y2=\"" << legend_y
       << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
       << "/>\n";
    os << "<text x=\"" << lx + 30 << "\" y=\"" << legend_y + 4 << "\">" << escape(s.label) << "</text>\n";
    legend_y += 18;
  }
  os << "</svg>\n";
  return os.str();
}

void write_svg(const std::filesystem::path& path, const PlotSpec& spec) { write_text_atomic(path, render_svg(spec)); }

}  // namespace nag::harness

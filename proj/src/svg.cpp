#include "gacl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gacl::svg {

namespace {

constexpr double kWidth = 960.0, kHeight = 600.0;
constexpr double kLeft = 72.0, kRight = 24.0, kTop = 40.0, kBottom = 56.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
                          "#bcbd22", "#e377c2"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fnum(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct AxisScale {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double map(double v, double px_lo, double px_hi) const {
    double t = log ? (std::log10(v) - std::log10(lo)) /
                         (std::log10(hi) - std::log10(lo))
                   : (v - lo) / (hi - lo);
    return px_lo + t * (px_hi - px_lo);
  }
  bool usable(double v) const {
    return std::isfinite(v) && (!log || v > 0.0);
  }
};

// Ticks at multiples of a 1/2/5 * 10^k step (linear) or at decades (log).
std::vector<double> ticks_for(const AxisScale& s) {
  std::vector<double> t;
  if (s.log) {
    const int k0 = static_cast<int>(std::ceil(std::log10(s.lo) - 1e-9));
    const int k1 = static_cast<int>(std::floor(std::log10(s.hi) + 1e-9));
    for (int k = k0; k <= k1; ++k) t.push_back(std::pow(10.0, k));
    if (t.size() < 2) {
      t = {s.lo, s.hi};
    }
    return t;
  }
  const double span = s.hi - s.lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const double first = std::ceil(s.lo / step) * step;
  for (double v = first; v <= s.hi + step * 1e-9; v += step)
    t.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  return t;
}

void widen_if_degenerate(AxisScale& s) {
  if (s.log) {
    if (!(s.lo > 0.0)) throw std::invalid_argument("log axis needs positive data");
    if (s.lo == s.hi) {
      s.lo /= 2.0;
      s.hi *= 2.0;
    }
    return;
  }
  if (s.lo == s.hi) {
    const double pad = s.lo == 0.0 ? 1.0 : std::abs(s.lo) * 0.5;
    s.lo -= pad;
    s.hi += pad;
  } else {
    const double pad = (s.hi - s.lo) * 0.05;
    s.lo -= pad;
    s.hi += pad;
  }
}

}  // namespace

void emit_svg(const io::Table& table, const std::string& x_col,
              const std::vector<std::string>& y_cols,
              const std::string& out_path, const PlotSpec& spec) {
  if (y_cols.empty()) throw std::invalid_argument("emit_svg: no y columns");
  const auto xc = table.col(x_col);
  std::vector<std::size_t> yc, sec;
  for (const auto& name : y_cols) {
    yc.push_back(table.col(name));
    sec.push_back(spec.se_bands ? table.col(name + "_se")
                                : std::numeric_limits<std::size_t>::max());
  }

  const std::size_t n = table.rows.size();
  if (n == 0) throw std::invalid_argument("emit_svg: empty table");
  std::vector<double> xs(n);
  for (std::size_t r = 0; r < n; ++r) xs[r] = table.num(r, xc);

  AxisScale ax{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(), spec.log_x};
  AxisScale ay{std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(), spec.log_y};
  auto grow = [](AxisScale& s, double v) {
    if (!s.usable(v)) return;
    s.lo = std::min(s.lo, v);
    s.hi = std::max(s.hi, v);
  };
  for (std::size_t r = 0; r < n; ++r) {
    grow(ax, xs[r]);
    for (std::size_t k = 0; k < yc.size(); ++k) {
      const double y = table.num(r, yc[k]);
      grow(ay, y);
      if (sec[k] != std::numeric_limits<std::size_t>::max()) {
        const double se = table.num(r, sec[k]);
        if (std::isfinite(se)) {
          grow(ay, y - se);
          grow(ay, y + se);
        }
      }
    }
  }
  if (!std::isfinite(ax.lo) || !std::isfinite(ay.lo))
    throw std::invalid_argument("emit_svg: no plottable data");
  widen_if_degenerate(ax);
  widen_if_degenerate(ay);

  const double px0 = kLeft, px1 = kWidth - kRight;
  const double py0 = kHeight - kBottom, py1 = kTop;  // y grows upward

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n"
      << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";

  if (!spec.title.empty())
    out << "<text x=\"" << kWidth / 2
        << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
           " font-size=\"16\">"
        << xml_escape(spec.title) << "</text>\n";

  // Axes, ticks, grid.
  out << "<line x1=\"" << px0 << "\" y1=\"" << py0 << "\" x2=\"" << px1
      << "\" y2=\"" << py0 << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << px0 << "\" y1=\"" << py0 << "\" x2=\"" << px0
      << "\" y2=\"" << py1 << "\" stroke=\"black\"/>\n";
  for (double v : ticks_for(ax)) {
    const double x = ax.map(v, px0, px1);
    out << "<line x1=\"" << fnum(x) << "\" y1=\"" << py0 << "\" x2=\""
        << fnum(x) << "\" y2=\"" << py0 + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fnum(x) << "\" y=\"" << py0 + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
           " font-size=\"12\">"
        << fnum(v) << "</text>\n";
  }
  for (double v : ticks_for(ay)) {
    const double y = ay.map(v, py0, py1);
    out << "<line x1=\"" << px0 - 5 << "\" y1=\"" << fnum(y) << "\" x2=\""
        << px0 << "\" y2=\"" << fnum(y) << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << px0 << "\" y1=\"" << fnum(y) << "\" x2=\"" << px1
        << "\" y2=\"" << fnum(y)
        << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n"
        << "<text x=\"" << px0 - 9 << "\" y=\"" << fnum(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\""
           " font-size=\"12\">"
        << fnum(v) << "</text>\n";
  }
  if (!spec.x_label.empty())
    out << "<text x=\"" << (px0 + px1) / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
           " font-size=\"13\">"
        << xml_escape(spec.x_label) << "</text>\n";
  if (!spec.y_label.empty())
    out << "<text x=\"18\" y=\"" << (py0 + py1) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
           " font-size=\"13\" transform=\"rotate(-90 18 "
        << (py0 + py1) / 2 << ")\">" << xml_escape(spec.y_label)
        << "</text>\n";

  // SE bands first so the lines draw on top.
  for (std::size_t k = 0; k < yc.size(); ++k) {
    if (sec[k] == std::numeric_limits<std::size_t>::max()) continue;
    std::ostringstream upper, lower;
    std::size_t pts = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const double y = table.num(r, yc[k]);
      const double se = table.num(r, sec[k]);
      if (!ax.usable(xs[r]) || !std::isfinite(y) || !std::isfinite(se))
        continue;
      const double hi = y + se, lo = y - se;
      if (!ay.usable(hi) || !ay.usable(lo)) continue;
      upper << fnum(ax.map(xs[r], px0, px1)) << "," << fnum(ay.map(hi, py0, py1))
            << " ";
      lower << fnum(ax.map(xs[r], px0, px1)) << ","
            << fnum(ay.map(lo, py0, py1)) << " ";
      ++pts;
    }
    if (pts < 2) continue;
    // reverse the lower edge to close the loop
    std::istringstream lo_in(lower.str());
    std::vector<std::string> lo_pts;
    for (std::string p; lo_in >> p;) lo_pts.push_back(p);
    out << "<polygon fill=\"" << kPalette[k % kPaletteSize]
        << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"" << upper.str();
    for (auto it = lo_pts.rbegin(); it != lo_pts.rend(); ++it)
      out << *it << " ";
    out << "\"/>\n";
  }

  for (std::size_t k = 0; k < yc.size(); ++k) {
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[k % kPaletteSize]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t r = 0; r < n; ++r) {
      const double y = table.num(r, yc[k]);
      if (!ax.usable(xs[r]) || !ay.usable(y)) continue;
      out << fnum(ax.map(xs[r], px0, px1)) << ","
          << fnum(ay.map(y, py0, py1)) << " ";
    }
    out << "\"/>\n";
  }

  // Legend: swatch line + label per series, top-right inside the plot.
  const double lx = px1 - 170.0;
  double ly = py1 + 10.0;
  out << "<rect x=\"" << lx - 8 << "\" y=\"" << ly - 12 << "\" width=\"178\""
      << " height=\"" << 18.0 * static_cast<double>(y_cols.size()) + 8
      << "\" fill=\"white\" fill-opacity=\"0.8\" stroke=\"#cccccc\"/>\n";
  for (std::size_t k = 0; k < y_cols.size(); ++k) {
    out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24
        << "\" y2=\"" << ly << "\" stroke=\"" << kPalette[k % kPaletteSize]
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << xml_escape(y_cols[k]) << "</text>\n";
    ly += 18.0;
  }

  out << "</svg>\n";
  const std::string body = out.str();
  if (body.size() > 2u * 1024u * 1024u)
    throw std::runtime_error("emit_svg: output exceeds 2 MiB");
  io::write_file_atomic(out_path, body);
}

void emit_svg_from_csv(const std::string& csv_path, const std::string& x_col,
                       const std::vector<std::string>& y_cols,
                       const std::string& out_path, const PlotSpec& spec) {
  emit_svg(io::read_csv(csv_path), x_col, y_cols, out_path, spec);
}

}  // namespace gacl::svg

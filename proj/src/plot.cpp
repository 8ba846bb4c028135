#include "scalelaw/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "scalelaw/error.hpp"

namespace scalelaw {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

// Log10 range padded by 5% on each side; single values get half a decade.
std::pair<double, double> padded_log_range(const Range& r) {
  double a = std::log10(r.lo);
  double b = std::log10(r.hi);
  if (b - a < 1e-12) {
    a -= 0.25;
    b += 0.25;
  }
  const double pad = 0.05 * (b - a);
  return {a - pad, b + pad};
}

std::vector<double> log_ticks(double log_lo, double log_hi) {
  static const std::vector<std::vector<int>> mantissas = {{1}, {1, 2, 5}, {1, 2, 3, 4, 5, 6, 7, 8, 9}};
  std::vector<double> ticks;
  for (const auto& ms : mantissas) {
    ticks.clear();
    for (int e = static_cast<int>(std::floor(log_lo)); e <= static_cast<int>(std::ceil(log_hi)); ++e) {
      for (int m : ms) {
        const double v = m * std::pow(10.0, e);
        const double lv = std::log10(v);
        if (lv >= log_lo && lv <= log_hi) ticks.push_back(v);
      }
    }
    if (ticks.size() >= 3) return ticks;
  }
  if (ticks.size() < 2) {
    ticks = {std::pow(10.0, log_lo), std::pow(10.0, log_hi)};
  }
  return ticks;
}

struct Frame {
  double left = 80, right = 20, top = 40, bottom = 60;
  double width, height;
  double x0, x1, y0, y1;  // log10 bounds

  double px(double x) const { return left + (std::log10(x) - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const {
    return height - bottom - (std::log10(y) - y0) / (y1 - y0) * (height - top - bottom);
  }
};

}  // namespace

std::string render_plot(const PlotSpec& spec) {
  Range xr;
  Range yr;
  bool any = false;
  for (const auto& s : spec.series) {
    for (const auto& p : s.points) {
      xr.add(p.x);
      yr.add(p.y);
      any = true;
    }
    for (const auto& p : s.held_out) {
      xr.add(p.x);
      yr.add(p.y);
      any = true;
    }
    for (const auto& b : s.band) {
      xr.add(b.x);
      yr.add(b.y_lo);
      yr.add(b.y_hi);
    }
  }
  if (!any) throw DataError("plot needs at least one series with points");
  if (!(xr.lo > 0.0) || !(yr.lo > 0.0)) throw DataError("log-log plot needs positive coordinates");

  Frame f;
  f.width = spec.width;
  f.height = spec.height;
  std::tie(f.x0, f.x1) = padded_log_range(xr);
  std::tie(f.y0, f.y1) = padded_log_range(yr);

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    svg << "<text x=\"" << num(f.width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << xml_escape(spec.title) << "</text>\n";
  }

  const double plot_l = f.left;
  const double plot_r = f.width - f.right;
  const double plot_t = f.top;
  const double plot_b = f.height - f.bottom;

  svg << "<g class=\"axes\" stroke=\"#333\" stroke-width=\"1\">\n"
      << "<line x1=\"" << num(plot_l) << "\" y1=\"" << num(plot_b) << "\" x2=\"" << num(plot_r) << "\" y2=\""
      << num(plot_b) << "\"/>\n"
      << "<line x1=\"" << num(plot_l) << "\" y1=\"" << num(plot_t) << "\" x2=\"" << num(plot_l) << "\" y2=\""
      << num(plot_b) << "\"/>\n</g>\n";

  svg << "<g class=\"ticks\" font-size=\"11\" fill=\"#333\">\n";
  for (double t : log_ticks(f.x0, f.x1)) {
    const double x = f.px(t);
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(plot_b) << "\" x2=\"" << num(x) << "\" y2=\""
        << num(plot_b + 5) << "\" stroke=\"#333\"/>"
        << "<text x=\"" << num(x) << "\" y=\"" << num(plot_b + 18) << "\" text-anchor=\"middle\">"
        << tick_label(t) << "</text>\n";
  }
  for (double t : log_ticks(f.y0, f.y1)) {
    const double y = f.py(t);
    svg << "<line x1=\"" << num(plot_l - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(plot_l) << "\" y2=\""
        << num(y) << "\" stroke=\"#333\"/>"
        << "<text x=\"" << num(plot_l - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
        << tick_label(t) << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << num((plot_l + plot_r) / 2) << "\" y=\"" << num(f.height - 15)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(spec.x_label) << " (log scale)</text>\n"
      << "<text x=\"18\" y=\"" << num((plot_t + plot_b) / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << num((plot_t + plot_b) / 2) << ")\">" << xml_escape(spec.y_label)
      << " (log scale)</text>\n";

  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    const char* color = kPalette[si % kPaletteSize];
    svg << "<g class=\"series\" id=\"series-" << si << "\">\n";

    if (!s.band.empty()) {
      svg << "<polygon class=\"sleeve\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.band.size(); ++i) {
        svg << (i ? " " : "") << num(f.px(s.band[i].x)) << ',' << num(f.py(s.band[i].y_hi));
      }
      for (std::size_t i = s.band.size(); i-- > 0;) {
        svg << ' ' << num(f.px(s.band[i].x)) << ',' << num(f.py(s.band[i].y_lo));
      }
      svg << "\"/>\n";
    }

    if (s.fit) {
      Range lr;
      for (const auto& p : s.points) lr.add(p.x);
      for (const auto& p : s.held_out) lr.add(p.x);
      for (const auto& b : s.band) lr.add(b.x);
      svg << "<line class=\"fit\" x1=\"" << num(f.px(lr.lo)) << "\" y1=\"" << num(f.py(predict_at(*s.fit, lr.lo)))
          << "\" x2=\"" << num(f.px(lr.hi)) << "\" y2=\"" << num(f.py(predict_at(*s.fit, lr.hi)))
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    }

    // Seed groups in ascending seed order get successive shades.
    std::map<std::int64_t, std::size_t> seed_index;
    for (auto seed : s.pretrain_seeds) seed_index.emplace(seed, 0);
    std::size_t k = 0;
    for (auto& [seed, idx] : seed_index) idx = k++;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const std::size_t group = s.pretrain_seeds.empty() ? 0 : seed_index[s.pretrain_seeds.at(i)];
      const double opacity = 0.85 - 0.5 * static_cast<double>(group % 4) / 4.0;
      svg << "<circle class=\"marker\" data-group=\"" << group << "\" cx=\"" << num(f.px(s.points[i].x))
          << "\" cy=\"" << num(f.py(s.points[i].y)) << "\" r=\"3.5\" fill=\"" << color << "\" fill-opacity=\""
          << num(opacity) << "\"/>\n";
    }
    for (const auto& p : s.held_out) {
      svg << "<rect class=\"held-out\" x=\"" << num(f.px(p.x) - 4) << "\" y=\"" << num(f.py(p.y) - 4)
          << "\" width=\"8\" height=\"8\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    }
    if (!s.label.empty()) {
      const double ly = plot_t + 14 + 16 * static_cast<double>(si);
      svg << "<text class=\"legend\" x=\"" << num(plot_l + 12) << "\" y=\"" << num(ly) << "\" font-size=\"12\" fill=\""
          << color << "\">" << xml_escape(s.label) << "</text>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace scalelaw

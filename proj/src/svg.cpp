#include "burstmap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace burstmap {
namespace {

constexpr double kLeft = 64.0, kRight = 16.0, kTop = 28.0, kBottom = 40.0;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string escape(const std::string& s) {
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

std::pair<double, double> extent(const Panel& p, bool xs) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : p.series) {
    for (double v : xs ? s.x : s.y) {
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!(lo <= hi)) return {0.0, 1.0};
  if (hi - lo < 1e-12) {
    const double pad = std::max(std::fabs(lo) * 0.05, 0.5);
    return {lo - pad, hi + pad};
  }
  return {lo, hi};
}

bool straddles(const std::vector<double>& breaks, double a, double b) {
  const double lo = std::min(a, b), hi = std::max(a, b);
  return std::any_of(breaks.begin(), breaks.end(),
                     [&](double x) { return x > lo && x <= hi; });
}

}  // namespace

std::string emit_svg(const std::vector<Panel>& panels, const PlotSpec& spec) {
  std::size_t points = 0;
  for (const auto& p : panels)
    for (const auto& s : p.series) {
      if (s.x.size() != s.y.size()) {
        throw std::invalid_argument("series '" + s.label + "' has mismatched x/y sizes");
      }
      points += s.x.size();
    }
  if (points == 0) throw std::invalid_argument("emit_svg: dataset is empty");

  const double W = spec.width, H = spec.panel_height;
  const double title_h = spec.title.empty() ? 0.0 : 24.0;
  const double total_h = title_h + H * static_cast<double>(panels.size());
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" +
         num(total_h) + "\" viewBox=\"0 0 " + num(W) + " " + num(total_h) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    out += "<text x=\"" + num(W / 2) + "\" y=\"17\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(spec.title) + "</text>\n";
  }

  for (std::size_t k = 0; k < panels.size(); ++k) {
    const Panel& p = panels[k];
    const double y0 = title_h + H * static_cast<double>(k);
    const double px0 = kLeft, px1 = W - kRight, py0 = y0 + kTop, py1 = y0 + H - kBottom;
    const auto [xl, xh] = p.x_range ? *p.x_range : extent(p, true);
    const auto [yl, yh] = p.y_range ? *p.y_range : extent(p, false);
    const auto sx = [&](double x) { return px0 + (x - xl) / (xh - xl) * (px1 - px0); };
    const auto sy = [&](double y) { return py1 - (y - yl) / (yh - yl) * (py1 - py0); };
    const auto inside = [&](double x, double y) {
      return std::isfinite(x) && std::isfinite(y) && x >= xl && x <= xh && y >= yl && y <= yh;
    };

    out += "<g>\n";
    out += "<rect x=\"" + num(px0) + "\" y=\"" + num(py0) + "\" width=\"" + num(px1 - px0) +
           "\" height=\"" + num(py1 - py0) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double xv = xl + (xh - xl) * t / 4.0, yv = yl + (yh - yl) * t / 4.0;
      out += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(py1 + 14) +
             "\" text-anchor=\"middle\" font-size=\"10\">" + tick(xv) + "</text>\n";
      out += "<text x=\"" + num(px0 - 4) + "\" y=\"" + num(sy(yv) + 3) +
             "\" text-anchor=\"end\" font-size=\"10\">" + tick(yv) + "</text>\n";
    }
    if (!p.title.empty()) {
      out += "<text x=\"" + num(px0) + "\" y=\"" + num(py0 - 8) + "\" font-size=\"12\">" +
             escape(p.title) + "</text>\n";
    }
    out += "<text x=\"" + num((px0 + px1) / 2) + "\" y=\"" + num(py1 + 30) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + escape(p.x_label) + "</text>\n";
    out += "<text x=\"14\" y=\"" + num((py0 + py1) / 2) +
           "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 14 " +
           num((py0 + py1) / 2) + ")\">" + escape(p.y_label) + "</text>\n";

    double legend_y = py0 + 12;
    for (const auto& s : p.series) {
      if (s.style == SeriesStyle::Points) {
        out += "<g fill=\"" + s.color + "\">\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if (!inside(s.x[i], s.y[i])) continue;
          out += "<circle cx=\"" + num(sx(s.x[i])) + "\" cy=\"" + num(sy(s.y[i])) +
                 "\" r=\"1.5\"/>\n";
        }
        out += "</g>\n";
      } else {
        std::string pts;
        std::size_t n_pts = 0;
        const auto flush = [&] {
          if (n_pts == 1) {
            out += "<circle cx=\"" + pts.substr(0, pts.find(',')) + "\" cy=\"" +
                   pts.substr(pts.find(',') + 1) + "\" r=\"1.5\" fill=\"" + s.color + "\"/>\n";
          } else if (n_pts > 1) {
            out += "<polyline fill=\"none\" stroke=\"" + s.color +
                   "\" stroke-width=\"1.2\" points=\"" + pts + "\"/>\n";
          }
          pts.clear();
          n_pts = 0;
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if (!inside(s.x[i], s.y[i])) {
            flush();
            continue;
          }
          if (n_pts > 0 && straddles(s.breaks, s.x[i - 1], s.x[i])) flush();
          if (n_pts) pts += ' ';
          pts += num(sx(s.x[i])) + "," + num(sy(s.y[i]));
          ++n_pts;
        }
        flush();
      }
      if (!s.label.empty()) {
        out += "<text x=\"" + num(px1 - 6) + "\" y=\"" + num(legend_y) +
               "\" text-anchor=\"end\" font-size=\"10\" fill=\"" + s.color + "\">" +
               escape(s.label) + "</text>\n";
        legend_y += 12;
      }
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace burstmap

#include "spatialcv/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "spatialcv/error.hpp"

namespace spcv {
namespace {

// Fixed-precision formatting keeps the documents compact and stable.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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

std::string header(double w, double h) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         num(w) + "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n" +
         "<rect x=\"0\" y=\"0\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" fill=\"white\"/>\n";
}

std::string tick_label(double v) {
  char buf[32];
  if (v != 0.0 && (std::abs(v) >= 1e5 || std::abs(v) < 1e-3)) std::snprintf(buf, sizeof buf, "%.2e", v);
  else std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

using Rgb = std::array<double, 3>;

Rgb ramp(Palette p, double t) {
  static const std::array<Rgb, 5> viridis{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  static const std::array<Rgb, 5> magma{{{0, 0, 4}, {81, 18, 124}, {183, 55, 121}, {252, 137, 97}, {252, 253, 191}}};
  static const std::array<Rgb, 5> greys{{{255, 255, 255}, {191, 191, 191}, {128, 128, 128}, {64, 64, 64}, {0, 0, 0}}};
  const auto& stops = p == Palette::viridis ? viridis : p == Palette::magma ? magma : greys;
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), 3);
  const double f = t - static_cast<double>(i);
  Rgb out;
  for (int c = 0; c < 3; ++c) out[c] = stops[i][c] + f * (stops[i + 1][c] - stops[i][c]);
  return out;
}

std::string hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c[0])),
                static_cast<int>(std::lround(c[1])), static_cast<int>(std::lround(c[2])));
  return buf;
}

}  // namespace

std::string render_line_plot(const LinePlot& plot) {
  const double W = 640, H = 420, left = 70, right = 160, top = 40, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmin -= 0.5, xmax += 0.5;
  if (ymax == ymin) ymin -= 0.5, ymax += 0.5;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string out = header(W, H);
  out += "<text x=\"" + num(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
         escape(plot.title) + "</text>\n";
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 4.0, fy = ymin + (ymax - ymin) * t / 4.0;
    out += "<text x=\"" + num(sx(fx)) + "\" y=\"" + num(top + ph + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + tick_label(fx) + "</text>\n";
    out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(sy(fy) + 3) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + tick_label(fy) + "</text>\n";
  }
  out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(H - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + escape(plot.x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + num(top + ph / 2) + "\" transform=\"rotate(-90 16 " + num(top + ph / 2) +
         ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + escape(plot.y_label) + "</text>\n";

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const auto& series = plot.series[s];
    const char* color = kSeriesPalette[s % std::size(kSeriesPalette)];
    if (series.markers) {
      for (std::size_t i = 0; i < series.x.size(); ++i)
        out += "<circle cx=\"" + num(sx(series.x[i])) + "\" cy=\"" + num(sy(series.y[i])) + "\" r=\"2\" fill=\"" +
               color + "\" fill-opacity=\"0.6\"/>\n";
    } else {
      out += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" + std::string(color) + "\" points=\"";
      for (std::size_t i = 0; i < series.x.size(); ++i) {
        if (i) out += ' ';
        out += num(sx(series.x[i])) + "," + num(sy(series.y[i]));
      }
      out += "\"/>\n";
    }
    const double ly = top + 14 + 18 * static_cast<double>(s);
    out += "<rect x=\"" + num(left + pw + 12) + "\" y=\"" + num(ly - 8) + "\" width=\"14\" height=\"4\" fill=\"" +
           color + "\"/>\n";
    out += "<text x=\"" + num(left + pw + 32) + "\" y=\"" + num(ly) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(series.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

Palette parse_palette(const std::string& name) {
  if (name == "viridis") return Palette::viridis;
  if (name == "magma") return Palette::magma;
  if (name == "greys") return Palette::greys;
  throw PreconditionError("unknown palette '" + name + "' (expected viridis|magma|greys)");
}

std::string render_grid(const Grid& grid, Palette palette, const Grid* mask, const std::string& title) {
  const GridGeometry& g = grid.geometry;
  if (mask) require(mask->geometry.same_shape(g), "render: mask grid is not aligned with the value grid");
  auto visible = [&](std::size_t c) {
    if (is_nodata(grid.values[c])) return false;
    if (mask && (is_nodata(mask->values[c]) || mask->values[c] == 0.0)) return false;
    return true;
  };
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t c = 0; c < g.cells(); ++c)
    if (visible(c)) {
      lo = std::min(lo, grid.values[c]);
      hi = std::max(hi, grid.values[c]);
    }
  const double cell = std::max(1.0, std::floor(480.0 / static_cast<double>(std::max(g.ncols, g.nrows))));
  const double mw = cell * static_cast<double>(g.ncols), mh = cell * static_cast<double>(g.nrows);
  const double top = 36, left = 10, legend_w = 90;
  std::string out = header(left + mw + legend_w, top + mh + 20);
  out += "<text x=\"" + num(left) + "\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">" + escape(title) +
         "</text>\n";
  out += "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t r = 0; r < g.nrows; ++r)
    for (std::size_t c = 0; c < g.ncols; ++c) {
      const std::size_t idx = g.index(r, c);
      if (!visible(idx)) continue;
      const double t = hi > lo ? (grid.values[idx] - lo) / (hi - lo) : 0.5;
      out += "<rect x=\"" + num(left + cell * static_cast<double>(c)) + "\" y=\"" +
             num(top + cell * static_cast<double>(r)) + "\" width=\"" + num(cell) + "\" height=\"" + num(cell) +
             "\" fill=\"" + hex(ramp(palette, t)) + "\"/>\n";
    }
  out += "</g>\n";
  // Legend: vertical ramp with min/max labels.
  const double lx = left + mw + 14, lh = std::min(200.0, mh);
  for (int s = 0; s < 20; ++s) {
    const double t = 1.0 - s / 19.0;
    out += "<rect x=\"" + num(lx) + "\" y=\"" + num(top + lh * s / 20.0) + "\" width=\"16\" height=\"" +
           num(lh / 20.0 + 0.5) + "\" fill=\"" + hex(ramp(palette, t)) + "\"/>\n";
  }
  if (std::isfinite(lo)) {
    out += "<text x=\"" + num(lx + 20) + "\" y=\"" + num(top + 8) +
           "\" font-family=\"sans-serif\" font-size=\"10\">" + tick_label(hi) + "</text>\n";
    out += "<text x=\"" + num(lx + 20) + "\" y=\"" + num(top + lh) +
           "\" font-family=\"sans-serif\" font-size=\"10\">" + tick_label(lo) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace spcv

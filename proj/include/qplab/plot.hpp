#pragma once

// Minimal static line/scatter plots written as PNG through libpng.

#include <qplab/core.hpp>
#include <qplab/glyphs.hpp>

#include <png.h>

#include <array>
#include <cstdio>
#include <string>
#include <vector>

namespace qplab {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr std::array<Rgb, 6> kPalette{{{31, 119, 180}, {214, 39, 40}, {44, 160, 44},
                                               {255, 127, 14}, {148, 103, 189}, {90, 90, 90}}};

struct PlotSeries {
  std::vector<double> x, y;
  std::string label;
  bool line = true;
  bool markers = false;
  int colour = -1;  // palette index, -1 picks by position
};

struct PlotSpec {
  PlotSpec() = default;
  PlotSpec(std::string t, std::string x, std::string y, bool lx = false, bool ly = false)
      : title(std::move(t)), xlabel(std::move(x)), ylabel(std::move(y)), logx(lx), logy(ly) {}

  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  int width = 800, height = 520;
  std::vector<PlotSeries> series;
};

namespace detail {

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h * 3, 255) {}

  int width() const { return w_; }
  int height() const { return h_; }
  const std::vector<std::uint8_t>& pixels() const { return px_; }

  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    auto* p = &px_[(static_cast<std::size_t>(y) * w_ + x) * 3];
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  void line(int x0, int y0, int x1, int y1, Rgb c, int thick = 1) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
      for (int a = 0; a < thick; ++a)
        for (int b = 0; b < thick; ++b) set(x0 + a - thick / 2, y0 + b - thick / 2, c);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  void rect(int x0, int y0, int x1, int y1, Rgb c, bool fill) {
    if (fill) {
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) set(x, y, c);
      return;
    }
    line(x0, y0, x1, y0, c);
    line(x1, y0, x1, y1, c);
    line(x1, y1, x0, y1, c);
    line(x0, y1, x0, y0, c);
  }

  // Horizontal text with its top-left corner at (x, y); vertical text reads bottom to top.
  void text(int x, int y, const std::string& s, Rgb c, bool vertical = false) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const int ch = static_cast<unsigned char>(s[i]);
      if (ch < 32 || ch > 126) continue;
      const auto& g = kGlyphs[ch - 32];
      for (int r = 0; r < kGlyphH; ++r)
        for (int col = 0; col < kGlyphW; ++col) {
          if (!(g[r] & (1 << (kGlyphW - 1 - col)))) continue;
          const int off = static_cast<int>(i) * kGlyphW;
          if (vertical)
            set(x + r, y - off - col, c);
          else
            set(x + off + col, y + r, c);
        }
    }
  }

  static int text_width(const std::string& s) { return static_cast<int>(s.size()) * kGlyphW; }

 private:
  int w_, h_;
  std::vector<std::uint8_t> px_;
};

inline std::string tick_label(double v) {
  char buf[32];
  if (v != 0.0 && (std::abs(v) >= 1e6 || std::abs(v) < 1e-3))
    std::snprintf(buf, sizeof buf, "%.0e", v);
  else
    std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Ticks in axis coordinates (log10 values on a log axis) with their labels.
inline std::vector<std::pair<double, std::string>> axis_ticks(double lo, double hi, bool log) {
  std::vector<std::pair<double, std::string>> out;
  if (log && hi - lo >= 1.0) {
    const int stride = std::max(1, static_cast<int>(std::ceil((hi - lo) / 8.0)));
    const bool minor = hi - lo < 3.0;
    for (int e = static_cast<int>(std::floor(lo)); e <= hi; e += stride)
      for (double m : {1.0, 2.0, 5.0}) {
        if (m > 1.0 && !minor) continue;
        const double v = std::log10(m) + e;
        if (v >= lo && v <= hi) out.emplace_back(v, tick_label(m * std::pow(10.0, e)));
      }
    return out;
  }
  const double a = log ? std::pow(10.0, lo) : lo, b = log ? std::pow(10.0, hi) : hi;
  const double raw = (b - a) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  for (double v = std::ceil(a / step) * step; v <= b + 1e-9 * step; v += step) {
    const double vv = std::abs(v) < 1e-12 * step ? 0.0 : v;
    if (log && vv <= 0) continue;
    out.emplace_back(log ? std::log10(vv) : vv, tick_label(vv));
  }
  return out;
}

}  // namespace detail

/// Renders the plot and writes it to `path`; throws NumericalGuard when libpng fails.
inline void write_plot(const std::string& path, const PlotSpec& spec) {
  detail::Canvas cv(spec.width, spec.height);
  const int left = 78, right = 20, top = 34, bottom = 52;
  const int pw = spec.width - left - right, ph = spec.height - top - bottom;

  auto tx = [&](double v) { return spec.logx ? (v > 0 ? std::log10(v) : NAN) : v; };
  auto ty = [&](double v) { return spec.logy ? (v > 0 ? std::log10(v) : NAN) : v; };

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : spec.series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      x0 = std::min(x0, a);
      x1 = std::max(x1, a);
      y0 = std::min(y0, b);
      y1 = std::max(y1, b);
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12 * std::max(1.0, std::abs(x0))) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y0))) y0 -= 0.5, y1 += 0.5;
  const double padx = 0.04 * (x1 - x0), pady = 0.06 * (y1 - y0);
  x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;

  auto px = [&](double a) { return left + static_cast<int>(std::lround((a - x0) / (x1 - x0) * pw)); };
  auto py = [&](double b) { return top + ph - static_cast<int>(std::lround((b - y0) / (y1 - y0) * ph)); };

  const Rgb black{0, 0, 0}, grid{225, 225, 225};
  for (const auto& [v, label] : detail::axis_ticks(x0, x1, spec.logx)) {
    const int X = px(v);
    cv.line(X, top, X, top + ph, grid);
    cv.line(X, top + ph, X, top + ph + 5, black);
    cv.text(X - detail::Canvas::text_width(label) / 2, top + ph + 8, label, black);
  }
  for (const auto& [v, label] : detail::axis_ticks(y0, y1, spec.logy)) {
    const int Y = py(v);
    cv.line(left, Y, left + pw, Y, grid);
    cv.line(left - 5, Y, left, Y, black);
    cv.text(left - 8 - detail::Canvas::text_width(label), Y - detail::kGlyphH / 2, label, black);
  }
  cv.rect(left, top, left + pw, top + ph, black, false);

  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    const Rgb c = kPalette[(s.colour >= 0 ? s.colour : static_cast<int>(si)) % kPalette.size()];
    bool have = false;
    int lx = 0, ly = 0;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) {
        have = false;
        continue;
      }
      const int X = px(a), Y = py(b);
      if (s.line && have) cv.line(lx, ly, X, Y, c, 2);
      if (s.markers) cv.rect(X - 2, Y - 2, X + 2, Y + 2, c, true);
      lx = X, ly = Y, have = true;
    }
  }

  // Legend, top right.
  int ly = top + 8;
  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    if (s.label.empty()) continue;
    const Rgb c = kPalette[(s.colour >= 0 ? s.colour : static_cast<int>(si)) % kPalette.size()];
    const int lx = left + pw - 16 - detail::Canvas::text_width(s.label) - 22;
    cv.rect(lx, ly + 4, lx + 14, ly + 8, c, true);
    cv.text(lx + 20, ly, s.label, black);
    ly += detail::kGlyphH + 4;
  }

  cv.text(left + (pw - detail::Canvas::text_width(spec.title)) / 2, 10, spec.title, black);
  cv.text(left + (pw - detail::Canvas::text_width(spec.xlabel)) / 2, top + ph + 28, spec.xlabel, black);
  cv.text(8, top + (ph + detail::Canvas::text_width(spec.ylabel)) / 2, spec.ylabel, black, true);

  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(spec.width);
  img.height = static_cast<png_uint_32>(spec.height);
  img.format = PNG_FORMAT_RGB;
  const bool ok = png_image_write_to_file(&img, path.c_str(), 0, cv.pixels().data(), 0, nullptr);
  png_image_free(&img);
  guard(ok, "write_plot: libpng failed to write " + path);
}

}  // namespace qplab

#pragma once

// Synthetic "hand-drawn" canvases: a few thick polyline strokes on a dark
// canvas of random size, the way a touch-screen capture looks.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "snn/preprocess.hpp"

namespace snn::testing {

inline void stamp_disc(GrayImage& img, double cy, double cx, double radius) {
  const int r0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
  const int r1 = std::min(img.height - 1, static_cast<int>(std::ceil(cy + radius)));
  const int c0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
  const int c1 = std::min(img.width - 1, static_cast<int>(std::ceil(cx + radius)));
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const double d = std::hypot(r - cy, c - cx);
      if (d <= radius) img.at(r, c) = 255;
      else if (d <= radius + 1) img.at(r, c) = std::max<std::uint8_t>(img.at(r, c), static_cast<std::uint8_t>(255 * (radius + 1 - d)));
    }
  }
}

inline void draw_line(GrayImage& img, double y0, double x0, double y1, double x1, double radius) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::hypot(y1 - y0, x1 - x0) * 2)));
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    stamp_disc(img, y0 + (y1 - y0) * t, x0 + (x1 - x0) * t, radius);
  }
}

inline GrayImage random_stroke_canvas(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> side(60, 400);
  GrayImage img(side(rng), side(rng));
  const int small = std::min(img.width, img.height);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // The digit occupies a sub-box somewhere on the canvas, often off-centre.
  const double bh = small * (0.3 + 0.6 * u(rng));
  const double bw = bh * (0.4 + 0.6 * u(rng));
  const double top = u(rng) * (img.height - bh);
  const double left = u(rng) * (img.width - bw);
  const double radius = std::max(1.0, small * (0.01 + 0.03 * u(rng)));

  std::uniform_int_distribution<int> strokes(1, 3), points(2, 6);
  const int ns = strokes(rng);
  for (int s = 0; s < ns; ++s) {
    double y = top + u(rng) * bh, x = left + u(rng) * bw;
    const int np = points(rng);
    for (int p = 1; p < np; ++p) {
      const double ny = top + u(rng) * bh, nx = left + u(rng) * bw;
      draw_line(img, y, x, ny, nx, radius);
      y = ny;
      x = nx;
    }
  }
  return img;
}

}  // namespace snn::testing

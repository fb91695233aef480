#include "snn/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "snn/errors.hpp"

namespace snn {

GrayImage::GrayImage(int w, int h, std::uint8_t fill) : width(w), height(h) {
  if (w < 1 || h < 1) throw InvalidInput("image dimensions must be >= 1");
  pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

GrayImage::GrayImage(int w, int h, std::vector<std::uint8_t> px)
    : width(w), height(h), pixels(std::move(px)) {
  if (w < 1 || h < 1) throw InvalidInput("image dimensions must be >= 1");
  if (pixels.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
    throw DimensionError("image buffer holds " + std::to_string(pixels.size()) + " bytes for " +
                         std::to_string(w) + "x" + std::to_string(h));
  }
}

GrayImage binarize(const GrayImage& canvas, int threshold) {
  if (threshold < 0 || threshold > 255) throw InvalidInput("threshold must be in 0-255");
  GrayImage out = canvas;
  for (auto& p : out.pixels) p = p >= threshold ? 255 : 0;
  return out;
}

InkBox crop_to_ink(const GrayImage& mask) {
  int top = mask.height, bottom = -1, left = mask.width, right = -1;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (mask.at(r, c) == 0) continue;
      top = std::min(top, r);
      bottom = std::max(bottom, r);
      left = std::min(left, c);
      right = std::max(right, c);
    }
  }
  if (bottom < 0) throw BlankDrawing();
  return InkBox{top, left, bottom - top + 1, right - left + 1};
}

GrayImage crop(const GrayImage& image, const InkBox& box) {
  if (box.row < 0 || box.col < 0 || box.height < 1 || box.width < 1 ||
      box.row + box.height > image.height || box.col + box.width > image.width) {
    throw InvalidInput("crop box outside image");
  }
  GrayImage out(box.width, box.height);
  for (int r = 0; r < box.height; ++r) {
    for (int c = 0; c < box.width; ++c) out.at(r, c) = image.at(box.row + r, box.col + c);
  }
  return out;
}

GrayImage resize_preserving_aspect(const GrayImage& image, int longest_side) {
  if (longest_side < 1) throw InvalidInput("target side must be >= 1");
  int out_w = longest_side, out_h = longest_side;
  if (image.width > image.height) {
    out_h = std::max(1, static_cast<int>(std::lround(static_cast<double>(image.height) * longest_side / image.width)));
  } else if (image.height > image.width) {
    out_w = std::max(1, static_cast<int>(std::lround(static_cast<double>(image.width) * longest_side / image.height)));
  }
  const double sx = static_cast<double>(image.width) / out_w;
  const double sy = static_cast<double>(image.height) / out_h;

  GrayImage out(out_w, out_h);
  for (int r = 0; r < out_h; ++r) {
    const double y = std::clamp((r + 0.5) * sy - 0.5, 0.0, static_cast<double>(image.height - 1));
    const int y0 = static_cast<int>(y);
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double fy = y - y0;
    for (int c = 0; c < out_w; ++c) {
      const double x = std::clamp((c + 0.5) * sx - 0.5, 0.0, static_cast<double>(image.width - 1));
      const int x0 = static_cast<int>(x);
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double fx = x - x0;
      const double top = image.at(y0, x0) * (1 - fx) + image.at(y0, x1) * fx;
      const double bot = image.at(y1, x0) * (1 - fx) + image.at(y1, x1) * fx;
      out.at(r, c) = static_cast<std::uint8_t>(std::clamp(std::lround(top * (1 - fy) + bot * fy), 0L, 255L));
    }
  }
  return out;
}

std::pair<double, double> centroid(const GrayImage& image) {
  double mass = 0, sr = 0, sc = 0;
  for (int r = 0; r < image.height; ++r) {
    for (int c = 0; c < image.width; ++c) {
      const double v = image.at(r, c);
      mass += v;
      sr += v * r;
      sc += v * c;
    }
  }
  if (mass == 0) return {-1.0, -1.0};
  return {sr / mass, sc / mass};
}

GrayImage center_by_mass(const GrayImage& image, int out_size) {
  if (image.width > out_size || image.height > out_size) {
    throw InvalidInput("image does not fit in the " + std::to_string(out_size) + " px canvas");
  }
  const double center = (out_size - 1) / 2.0;
  auto [cr, cc] = centroid(image);
  if (cr < 0) {
    cr = (image.height - 1) / 2.0;
    cc = (image.width - 1) / 2.0;
  }
  const int off_r = std::clamp(static_cast<int>(std::floor(center - cr + 0.5)), 0, out_size - image.height);
  const int off_c = std::clamp(static_cast<int>(std::floor(center - cc + 0.5)), 0, out_size - image.width);
  GrayImage out(out_size, out_size);
  for (int r = 0; r < image.height; ++r) {
    for (int c = 0; c < image.width; ++c) out.at(r + off_r, c + off_c) = image.at(r, c);
  }
  return out;
}

const std::array<double, 9>& blur_kernel() {
  static const std::array<double, 9> k = [] {
    std::array<double, 9> w{};
    double sum = 0;
    for (int a = -1; a <= 1; ++a) {
      for (int b = -1; b <= 1; ++b) {
        const double v = std::exp(-(a * a + b * b) / (2 * kBlurSigma * kBlurSigma));
        w[static_cast<std::size_t>((a + 1) * 3 + (b + 1))] = v;
        sum += v;
      }
    }
    for (auto& v : w) v /= sum;
    return w;
  }();
  return k;
}

GrayImage blur(const GrayImage& image) {
  const auto& k = blur_kernel();
  GrayImage out(image.width, image.height);
  for (int r = 0; r < image.height; ++r) {
    for (int c = 0; c < image.width; ++c) {
      double acc = 0;
      for (int a = -1; a <= 1; ++a) {
        for (int b = -1; b <= 1; ++b) {
          const int rr = r + a, cc = c + b;
          if (rr < 0 || cc < 0 || rr >= image.height || cc >= image.width) continue;
          acc += k[static_cast<std::size_t>((a + 1) * 3 + (b + 1))] * image.at(rr, cc);
        }
      }
      out.at(r, c) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
    }
  }
  return out;
}

Image to_image(const GrayImage& g) {
  if (g.width != kImageSide || g.height != kImageSide) {
    throw DimensionError("expected a 28x28 image, got " + std::to_string(g.width) + "x" +
                         std::to_string(g.height));
  }
  Image out{};
  std::copy(g.pixels.begin(), g.pixels.end(), out.begin());
  return out;
}

GrayImage to_gray(const Image& image) {
  return GrayImage(kImageSide, kImageSide, std::vector<std::uint8_t>(image.begin(), image.end()));
}

Image preprocess_pipeline(const RawCanvas& canvas, int threshold) {
  const auto mask = binarize(canvas, threshold);
  const auto box = crop_to_ink(mask);
  const auto content = resize_preserving_aspect(crop(mask, box), kContentSide);
  return to_image(blur(center_by_mass(content, kImageSide)));
}

}  // namespace snn

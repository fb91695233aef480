#pragma once

#include <cstdint>
#include <vector>

#include "snn/network.hpp"

namespace snn {

// Row-major grayscale raster, ink = high.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0);
  GrayImage(int w, int h, std::vector<std::uint8_t> px);

  std::uint8_t& at(int row, int col) { return pixels[static_cast<std::size_t>(row * width + col)]; }
  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row * width + col)]; }
  bool operator==(const GrayImage&) const = default;
};

using RawCanvas = GrayImage;

struct InkBox {
  int row = 0;
  int col = 0;
  int height = 0;
  int width = 0;
  bool operator==(const InkBox&) const = default;
};

inline constexpr int kDefaultBinarizeThreshold = 128;
inline constexpr int kContentSide = 20;
inline constexpr double kBlurSigma = 0.8;

// 255 where pixel >= threshold, else 0.
GrayImage binarize(const GrayImage& canvas, int threshold = kDefaultBinarizeThreshold);

// Tight bounding box of nonzero pixels; BlankDrawing when there are none.
InkBox crop_to_ink(const GrayImage& mask);
GrayImage crop(const GrayImage& image, const InkBox& box);

// Bilinear resample (pixel-centre aligned) so the longer side is exactly
// `longest_side`; the shorter side is rounded and at least 1.
GrayImage resize_preserving_aspect(const GrayImage& image, int longest_side = kContentSide);

// Places `image` on a blank out_size x out_size canvas at the whole-pixel
// offset that brings its intensity centroid nearest the canvas centre,
// clamped so nothing falls off the edge.
GrayImage center_by_mass(const GrayImage& image, int out_size = kImageSide);

// Normalized 3x3 Gaussian (sigma 0.8) with zero padding, rounded to 0-255.
GrayImage blur(const GrayImage& image);
const std::array<double, 9>& blur_kernel();

// binarize -> crop -> resize -> center -> blur.
Image preprocess_pipeline(const RawCanvas& canvas, int threshold = kDefaultBinarizeThreshold);

Image to_image(const GrayImage& g28);
GrayImage to_gray(const Image& image);

// Intensity-weighted centroid (row, col); (-1, -1) for an all-zero image.
std::pair<double, double> centroid(const GrayImage& image);

}  // namespace snn

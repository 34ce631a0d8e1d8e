#pragma once

#include <vector>

#include "pseudorain/image.hpp"

namespace pseudorain {

struct LabPixel {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// Per-pixel CIELAB grid, row-major.
struct LabImage {
  int height = 0;
  int width = 0;
  std::vector<LabPixel> pixels;

  const LabPixel& at(int y, int x) const noexcept {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

/// Luma and offset chroma planes. U and V carry +0.5 so all three live in [0,1].
struct YuvImage {
  ImagePlane y;
  ImagePlane u;
  ImagePlane v;
};

// sRGB (gamma-encoded, [0,1]) to CIELAB with D65 reference white.
LabPixel srgb_to_lab(double r, double g, double b) noexcept;
LabImage rgb_to_lab(const ImagePlane& img);

// BT.601 full-range.
YuvImage rgb_to_yuv(const ImagePlane& img);
ImagePlane yuv_to_rgb(const YuvImage& yuv);

}  // namespace pseudorain

#include "pseudorain/color.hpp"

#include <algorithm>
#include <cmath>

namespace pseudorain {
namespace {

// IEC 61966-2-1 linear sRGB -> XYZ.
constexpr double kM[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};
// D65 white taken as the matrix row sums so that neutral inputs land on a = b = 0.
constexpr double kWhite[3] = {
    kM[0][0] + kM[0][1] + kM[0][2],
    kM[1][0] + kM[1][1] + kM[1][2],
    kM[2][0] + kM[2][1] + kM[2][2],
};
constexpr double kEps = 216.0 / 24389.0;
constexpr double kKappa = 24389.0 / 27.0;

double srgb_to_linear(double c) noexcept {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) noexcept { return t > kEps ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0; }

void require_rgb(const ImagePlane& img) {
  if (img.channels() != 3) throw Error(ErrorCode::ChannelMismatch, "expected a 3-channel image");
}

}  // namespace

LabPixel srgb_to_lab(double r, double g, double b) noexcept {
  const double lin[3] = {srgb_to_linear(r), srgb_to_linear(g), srgb_to_linear(b)};
  double f[3];
  for (int i = 0; i < 3; ++i) {
    const double xyz = kM[i][0] * lin[0] + kM[i][1] * lin[1] + kM[i][2] * lin[2];
    f[i] = lab_f(xyz / kWhite[i]);
  }
  return {std::clamp(116.0 * f[1] - 16.0, 0.0, 100.0), 500.0 * (f[0] - f[1]), 200.0 * (f[1] - f[2])};
}

LabImage rgb_to_lab(const ImagePlane& img) {
  require_rgb(img);
  LabImage out{img.height(), img.width(), {}};
  out.pixels.reserve(img.pixel_count());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.pixels.push_back(srgb_to_lab(img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2)));
    }
  }
  return out;
}

YuvImage rgb_to_yuv(const ImagePlane& img) {
  require_rgb(img);
  YuvImage out{ImagePlane(img.height(), img.width(), 1), ImagePlane(img.height(), img.width(), 1),
               ImagePlane(img.height(), img.width(), 1)};
  auto ys = out.y.samples();
  auto us = out.u.samples();
  auto vs = out.v.samples();
  const auto rgb = img.samples();
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double r = rgb[3 * i], g = rgb[3 * i + 1], b = rgb[3 * i + 2];
    ys[i] = std::clamp(0.299 * r + 0.587 * g + 0.114 * b, 0.0, 1.0);
    us[i] = std::clamp(-0.168736 * r - 0.331264 * g + 0.5 * b + 0.5, 0.0, 1.0);
    vs[i] = std::clamp(0.5 * r - 0.418688 * g - 0.081312 * b + 0.5, 0.0, 1.0);
  }
  return out;
}

ImagePlane yuv_to_rgb(const YuvImage& yuv) {
  const auto& y = yuv.y;
  if (y.channels() != 1 || yuv.u.channels() != 1 || yuv.v.channels() != 1) {
    throw Error(ErrorCode::ChannelMismatch, "YUV planes must be single-channel");
  }
  if (!y.same_shape(yuv.u) || !y.same_shape(yuv.v)) {
    throw Error(ErrorCode::DimensionMismatch, "YUV planes differ in size");
  }
  ImagePlane out(y.height(), y.width(), 3);
  auto rgb = out.samples();
  const auto ys = y.samples();
  const auto us = yuv.u.samples();
  const auto vs = yuv.v.samples();
  for (std::size_t i = 0; i < y.pixel_count(); ++i) {
    const double u = us[i] - 0.5, v = vs[i] - 0.5;
    rgb[3 * i] = std::clamp(ys[i] + 1.402 * v, 0.0, 1.0);
    rgb[3 * i + 1] = std::clamp(ys[i] - 0.344136 * u - 0.714136 * v, 0.0, 1.0);
    rgb[3 * i + 2] = std::clamp(ys[i] + 1.772 * u, 0.0, 1.0);
  }
  return out;
}

}  // namespace pseudorain

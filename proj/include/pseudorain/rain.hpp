#pragma once

#include <vector>

#include "pseudorain/color.hpp"
#include "pseudorain/image.hpp"
#include "pseudorain/random.hpp"

namespace pseudorain {

/// Closed interval a configurable knob is drawn from.
struct Range {
  double min = 0.0;
  double max = 0.0;

  bool valid() const noexcept { return min <= max; }
};

struct RainParams {
  Range p{0.01, 0.05};        // salt density
  int gauss_k = 3;            // odd Gaussian kernel size
  double sigma_g = 1.0;
  Range length{15, 45};       // streak length, pixels (integer draw)
  Range theta{70, 110};       // degrees from horizontal
  Range width{1, 3};          // streak width, pixels (integer draw)
  Range beta{0.85, 0.95};     // luminance fusion coefficient

  void validate() const;
};

enum class StreakStage { Salt, Gauss, Motion };

struct StreakMask {
  StreakStage stage = StreakStage::Salt;
  ImagePlane plane;  // single channel
};

/// Dense 2-D kernel with its origin at (rows/2, cols/2); rows and cols are odd.
struct Kernel2D {
  int rows = 1;
  int cols = 1;
  std::vector<double> weights;

  double at(int r, int c) const noexcept {
    return weights[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)];
  }
  double sum() const noexcept;
};

StreakMask salt_noise(int height, int width, double p, Seed seed);

/// Normalised k x k Gaussian (outer product of the normalised 1-D profile).
Kernel2D gaussian_kernel(int k, double sigma);

/// Gaussian blur with reflect-101 borders.
StreakMask gaussian_blur(const StreakMask& mask, int k, double sigma);

/// Rasterised streak of `length` pixels along its major axis through the
/// origin at `theta_deg` (counter-clockwise from the +x axis, image rows
/// pointing down), thickened to `width` pixels across the minor axis and
/// normalised to sum 1.
Kernel2D motion_kernel(int length, double theta_deg, int width);

/// True 2-D convolution with zero padding, clamped to [0,1].
StreakMask motion_blur(const StreakMask& mask, const Kernel2D& kernel);

/// (1 - beta) * streak + beta * luma.
constexpr double blend_luminance(double luma, double streak, double beta) noexcept {
  return (1.0 - beta) * streak + beta * luma;
}

/// Luminance fusion in YUV space; chroma planes pass through untouched.
YuvImage composite_rain_yuv(const ImagePlane& clean, const StreakMask& mask, double beta);

/// composite_rain_yuv converted back to clamped RGB.
ImagePlane composite_rain(const ImagePlane& clean, const StreakMask& mask, double beta);

/// Concrete values drawn for one image.
struct DrawnRain {
  double p = 0.0;
  int length = 0;
  double theta = 0.0;
  int width = 0;
  double beta = 0.0;
  Seed seed = 0;       // seed the draws came from
  Seed salt_seed = 0;  // seed handed to salt_noise

  friend bool operator==(const DrawnRain&, const DrawnRain&) = default;
};

struct RainResult {
  ImagePlane rainy;
  StreakMask mask;
  DrawnRain drawn;
};

DrawnRain draw_rain(const RainParams& params, Seed seed);

/// Runs salt -> Gaussian -> motion blur -> luminance compositing with
/// already-drawn parameters.
RainResult render_rain(const ImagePlane& clean, const RainParams& params, const DrawnRain& drawn);

RainResult synthesize_rain(const ImagePlane& clean, const RainParams& params, Seed seed);

}  // namespace pseudorain

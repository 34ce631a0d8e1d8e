#include "pseudorain/rain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

namespace pseudorain {

void RainParams::validate() const {
  if (!p.valid() || !(p.min > 0.0) || p.max > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "salt density range must lie in (0,1]");
  }
  if (gauss_k < 1 || gauss_k % 2 == 0) throw Error(ErrorCode::EvenKernel, "Gaussian kernel size must be odd");
  if (!(sigma_g > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma_g must be > 0");
  if (!length.valid() || length.min < 1.0 || std::ceil(length.min) > std::floor(length.max)) {
    throw Error(ErrorCode::InvalidArgument, "streak length range must hold an integer >= 1");
  }
  if (!width.valid() || width.min < 1.0 || std::ceil(width.min) > std::floor(width.max)) {
    throw Error(ErrorCode::InvalidArgument, "streak width range must hold an integer >= 1");
  }
  if (!theta.valid()) throw Error(ErrorCode::InvalidArgument, "streak angle range is empty");
  if (!beta.valid() || beta.min < 0.0 || beta.max > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "beta range must lie in [0,1]");
  }
}

double Kernel2D::sum() const noexcept {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

StreakMask salt_noise(int height, int width, double p, Seed seed) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "salt density must be in (0,1]");
  StreakMask out{StreakStage::Salt, ImagePlane(height, width, 1)};
  Rng rng(seed);
  for (double& s : out.plane.samples()) s = rng.bernoulli(p) ? 1.0 : 0.0;
  return out;
}

namespace {

std::vector<double> gaussian_profile(int k, double sigma) {
  std::vector<double> g(static_cast<std::size_t>(k));
  const int r = k / 2;
  double total = 0.0;
  for (int i = -r; i <= r; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
    g[static_cast<std::size_t>(i + r)] = v;
    total += v;
  }
  for (double& v : g) v /= total;
  return g;
}

int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

void check_gauss_args(int k, double sigma) {
  if (k < 1 || k % 2 == 0) throw Error(ErrorCode::EvenKernel, "Gaussian kernel size must be odd");
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be > 0");
}

}  // namespace

Kernel2D gaussian_kernel(int k, double sigma) {
  check_gauss_args(k, sigma);
  const auto g = gaussian_profile(k, sigma);
  Kernel2D kernel{k, k, std::vector<double>(static_cast<std::size_t>(k) * static_cast<std::size_t>(k))};
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      kernel.weights[static_cast<std::size_t>(r * k + c)] = g[static_cast<std::size_t>(r)] * g[static_cast<std::size_t>(c)];
    }
  }
  return kernel;
}

StreakMask gaussian_blur(const StreakMask& mask, int k, double sigma) {
  check_gauss_args(k, sigma);
  const ImagePlane& in = mask.plane;
  if (in.channels() != 1) throw Error(ErrorCode::ChannelMismatch, "streak masks are single-channel");
  const auto g = gaussian_profile(k, sigma);
  const int r = k / 2;
  const int h = in.height(), w = in.width();

  ImagePlane rows(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += g[static_cast<std::size_t>(i + r)] * in.at(y, reflect101(x + i, w));
      rows.at(y, x) = acc;
    }
  }
  StreakMask out{StreakStage::Gauss, ImagePlane(h, w, 1)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += g[static_cast<std::size_t>(i + r)] * rows.at(reflect101(y + i, h), x);
      out.plane.at(y, x) = std::clamp(acc, 0.0, 1.0);
    }
  }
  return out;
}

Kernel2D motion_kernel(int length, double theta_deg, int width) {
  if (length < 1 || width < 1) throw Error(ErrorCode::InvalidArgument, "streak length and width must be >= 1");
  const double theta = theta_deg * std::numbers::pi / 180.0;
  const double dx = std::cos(theta);
  const double dy = -std::sin(theta);  // rows grow downwards
  const bool x_major = std::abs(dx) >= std::abs(dy);
  const double slope = x_major ? dy / dx : dx / dy;
  const auto snap = [](double v) { return static_cast<int>(std::floor(v + 0.5)); };

  std::set<std::pair<int, int>> support;  // (row, col) offsets from the origin
  for (int j = 0; j < width; ++j) {
    const int shift = snap(j - (width - 1) / 2.0);
    for (int i = 0; i < length; ++i) {
      const double t = i - (length - 1) / 2.0;
      const int major = snap(t);
      const int minor = snap(t * slope) + shift;
      support.insert(x_major ? std::pair{minor, major} : std::pair{major, minor});
    }
  }

  int ry = 0, rx = 0;
  for (const auto& [r, c] : support) {
    ry = std::max(ry, std::abs(r));
    rx = std::max(rx, std::abs(c));
  }
  Kernel2D kernel{2 * ry + 1, 2 * rx + 1, {}};
  kernel.weights.assign(static_cast<std::size_t>(kernel.rows) * static_cast<std::size_t>(kernel.cols), 0.0);
  const double weight = 1.0 / static_cast<double>(support.size());
  for (const auto& [r, c] : support) {
    kernel.weights[static_cast<std::size_t>((r + ry) * kernel.cols + (c + rx))] = weight;
  }
  return kernel;
}

StreakMask motion_blur(const StreakMask& mask, const Kernel2D& kernel) {
  const ImagePlane& in = mask.plane;
  if (in.channels() != 1) throw Error(ErrorCode::ChannelMismatch, "streak masks are single-channel");
  if (kernel.rows % 2 == 0 || kernel.cols % 2 == 0 ||
      kernel.weights.size() != static_cast<std::size_t>(kernel.rows) * static_cast<std::size_t>(kernel.cols)) {
    throw Error(ErrorCode::InvalidArgument, "kernel must have odd dimensions");
  }
  const int h = in.height(), w = in.width();
  const int ry = kernel.rows / 2, rx = kernel.cols / 2;
  StreakMask out{StreakStage::Motion, ImagePlane(h, w, 1)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int r = 0; r < kernel.rows; ++r) {
        const int sy = y - (r - ry);
        if (sy < 0 || sy >= h) continue;
        for (int c = 0; c < kernel.cols; ++c) {
          const double k = kernel.at(r, c);
          if (k == 0.0) continue;
          const int sx = x - (c - rx);
          if (sx < 0 || sx >= w) continue;
          acc += k * in.at(sy, sx);
        }
      }
      out.plane.at(y, x) = std::clamp(acc, 0.0, 1.0);
    }
  }
  return out;
}

YuvImage composite_rain_yuv(const ImagePlane& clean, const StreakMask& mask, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "beta must be in [0,1]");
  if (mask.plane.channels() != 1) throw Error(ErrorCode::ChannelMismatch, "streak masks are single-channel");
  if (mask.plane.height() != clean.height() || mask.plane.width() != clean.width()) {
    throw Error(ErrorCode::DimensionMismatch, "streak mask does not match image");
  }
  YuvImage yuv = rgb_to_yuv(clean);
  auto ys = yuv.y.samples();
  const auto xs = mask.plane.samples();
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = std::clamp(blend_luminance(ys[i], xs[i], beta), 0.0, 1.0);
  return yuv;
}

ImagePlane composite_rain(const ImagePlane& clean, const StreakMask& mask, double beta) {
  return yuv_to_rgb(composite_rain_yuv(clean, mask, beta));
}

DrawnRain draw_rain(const RainParams& params, Seed seed) {
  params.validate();
  Rng rng(seed);
  DrawnRain d;
  d.seed = seed;
  d.p = rng.uniform(params.p.min, params.p.max);
  d.length = static_cast<int>(rng.uniform_int(static_cast<std::int64_t>(std::ceil(params.length.min)),
                                              static_cast<std::int64_t>(std::floor(params.length.max))));
  d.theta = rng.uniform(params.theta.min, params.theta.max);
  d.width = static_cast<int>(rng.uniform_int(static_cast<std::int64_t>(std::ceil(params.width.min)),
                                             static_cast<std::int64_t>(std::floor(params.width.max))));
  d.beta = rng.uniform(params.beta.min, params.beta.max);
  d.salt_seed = derive_seed(seed, 1);
  return d;
}

RainResult render_rain(const ImagePlane& clean, const RainParams& params, const DrawnRain& drawn) {
  if (clean.channels() != 3) throw Error(ErrorCode::ChannelMismatch, "rain compositing needs an RGB image");
  const StreakMask salt = salt_noise(clean.height(), clean.width(), drawn.p, drawn.salt_seed);
  const StreakMask blurred = gaussian_blur(salt, params.gauss_k, params.sigma_g);
  StreakMask streaks = motion_blur(blurred, motion_kernel(drawn.length, drawn.theta, drawn.width));
  ImagePlane rainy = composite_rain(clean, streaks, drawn.beta);
  return {std::move(rainy), std::move(streaks), drawn};
}

RainResult synthesize_rain(const ImagePlane& clean, const RainParams& params, Seed seed) {
  return render_rain(clean, params, draw_rain(params, seed));
}

}  // namespace pseudorain

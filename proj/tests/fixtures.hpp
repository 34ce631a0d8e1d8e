#pragma once

// Small on-disk image sets for pipeline and CLI tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "pseudorain/image.hpp"
#include "pseudorain/image_io.hpp"

namespace fixture {

/// Smooth colour ramps with a few flat discs and mild noise, so SLIC has
/// real structure to follow.
inline pseudorain::ImagePlane textured_image(std::uint64_t seed, int h, int w) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.02);
  const double base[3] = {u(rng), u(rng), u(rng)};
  const double gx[3] = {u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5};
  pseudorain::ImagePlane img(h, w, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = base[c] + gx[c] * (x - y * 0.5) / w;

  for (int d = 0; d < 4; ++d) {
    const double cy = u(rng) * h, cx = u(rng) * w, r = 3.0 + u(rng) * h / 4.0;
    const double col[3] = {u(rng), u(rng), u(rng)};
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (std::hypot(y - cy, x - cx) <= r)
          for (int c = 0; c < 3; ++c) img.at(y, x, c) = col[c];
  }
  for (double& s : img.samples()) s = std::clamp(s + noise(rng), 0.0, 1.0);
  return img;
}

/// Writes `count` PNGs named <prefix>_<i>.png into `dir` with sizes that
/// vary a little per image.
inline void write_set(const std::filesystem::path& dir, const std::string& prefix, int count, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    const int h = 40 + 4 * i, w = 48 + 2 * (i % 3);
    pseudorain::save_image(textured_image(seed * 100 + static_cast<std::uint64_t>(i), h, w),
                           dir / (prefix + "_" + std::to_string(i) + ".png"));
  }
}

}  // namespace fixture

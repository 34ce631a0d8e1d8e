#include "pseudorain/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fft.hpp"

namespace pseudorain {

void FusionParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be in [0,1]");
  if (!(mask_keep_frac > 0.0 && mask_keep_frac <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "mask_keep_frac must be in (0,1]");
  }
  if (!(min_patch_frac >= 0.0)) throw Error(ErrorCode::InvalidArgument, "min_patch_frac must be >= 0");
  if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
}

namespace {

// Above this many multiply-adds the exhaustive search hands over to the
// spectral screen.
constexpr double kExhaustiveBudget = 4.0e6;

void check_match_inputs(const ImagePlane& haystack, const ImagePlane& needle, int stride,
                        const BinaryMask* weights) {
  if (haystack.empty() || needle.empty()) throw Error(ErrorCode::InvalidImage, "empty image");
  if (haystack.channels() != needle.channels()) {
    throw Error(ErrorCode::ChannelMismatch, "needle and haystack channel counts differ");
  }
  if (needle.height() > haystack.height() || needle.width() > haystack.width()) {
    throw Error(ErrorCode::NeedleLargerThanHaystack, "needle does not fit inside haystack");
  }
  if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
  if (weights != nullptr) {
    if (weights->height != needle.height() || weights->width != needle.width()) {
      throw Error(ErrorCode::DimensionMismatch, "weight mask does not match needle");
    }
    if (weights->count() == 0) throw Error(ErrorCode::InvalidArgument, "weight mask is empty");
  }
}

bool better(double mse, const MatchResult& best) { return mse < best.mse; }

}  // namespace

double window_mse(const ImagePlane& haystack, const ImagePlane& needle, int y, int x,
                  const BinaryMask* weights) {
  const int channels = needle.channels();
  double sum = 0.0;
  std::size_t count = 0;
  for (int dy = 0; dy < needle.height(); ++dy) {
    for (int dx = 0; dx < needle.width(); ++dx) {
      if (weights != nullptr && weights->at(dy, dx) == 0) continue;
      ++count;
      for (int c = 0; c < channels; ++c) {
        const double d = haystack.at(y + dy, x + dx, c) - needle.at(dy, dx, c);
        sum += d * d;
      }
    }
  }
  return sum / (static_cast<double>(channels) * static_cast<double>(count));
}

namespace detail {

MatchResult match_region_exhaustive(const ImagePlane& haystack, const ImagePlane& needle,
                                    int stride, const BinaryMask* weights) {
  check_match_inputs(haystack, needle, stride, weights);
  MatchResult best{0, 0, std::numeric_limits<double>::infinity()};
  for (int y = 0; y + needle.height() <= haystack.height(); y += stride) {
    for (int x = 0; x + needle.width() <= haystack.width(); x += stride) {
      const double mse = window_mse(haystack, needle, y, x, weights);
      if (better(mse, best)) best = {y, x, mse};
    }
  }
  return best;
}

MatchResult match_region_spectral(const ImagePlane& haystack, const ImagePlane& needle,
                                  int stride, const BinaryMask* weights) {
  check_match_inputs(haystack, needle, stride, weights);
  const int h = haystack.height(), w = haystack.width();
  const int nh = needle.height(), nw = needle.width();
  const int channels = haystack.channels();
  const std::size_t n = haystack.pixel_count();

  // SSD(o) = sum m*H^2 - 2 sum m*N*H + sum m*N^2, each correlation term
  // evaluated as a circular correlation over the haystack grid. Valid offsets
  // never wrap, so no padding is needed.
  std::vector<double> energy(n, 0.0);
  double energy_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = 0.0;
    for (int c = 0; c < channels; ++c) {
      const double v = haystack.samples()[i * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)];
      e += v * v;
    }
    energy[i] = e;
    energy_total += e;
  }

  std::vector<double> kernel(n, 0.0);
  double needle_energy = 0.0;
  for (int y = 0; y < nh; ++y) {
    for (int x = 0; x < nw; ++x) {
      if (weights == nullptr || weights->at(y, x) != 0) {
        kernel[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)] = 1.0;
        for (int c = 0; c < channels; ++c) needle_energy += needle.at(y, x, c) * needle.at(y, x, c);
      }
    }
  }

  const auto energy_hat = fft::forward_real(energy, h, w);
  const auto kernel_hat = fft::forward_real(kernel, h, w);
  std::vector<fft::Complex> cost_hat(energy_hat.size());
  for (std::size_t i = 0; i < cost_hat.size(); ++i) cost_hat[i] = std::conj(kernel_hat[i]) * energy_hat[i];

  std::vector<double> plane(n);
  std::vector<double> masked(n);
  for (int c = 0; c < channels; ++c) {
    std::fill(masked.begin(), masked.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      plane[i] = haystack.samples()[i * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c)];
    }
    for (int y = 0; y < nh; ++y) {
      for (int x = 0; x < nw; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
        masked[i] = kernel[i] * needle.at(y, x, c);
      }
    }
    const auto plane_hat = fft::forward_real(plane, h, w);
    const auto masked_hat = fft::forward_real(masked, h, w);
    for (std::size_t i = 0; i < cost_hat.size(); ++i) {
      cost_hat[i] -= 2.0 * std::conj(masked_hat[i]) * plane_hat[i];
    }
  }
  const auto approx = fft::inverse_real(cost_hat, h, w);

  double screened_min = std::numeric_limits<double>::infinity();
  for (int y = 0; y + nh <= h; y += stride) {
    for (int x = 0; x + nw <= w; x += stride) {
      screened_min = std::min(screened_min,
                              approx[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                                     static_cast<std::size_t>(x)]);
    }
  }

  // Transform round-off is bounded far below this margin.
  const double margin = 1e-9 * (energy_total + needle_energy) + 1e-12;
  MatchResult best{0, 0, std::numeric_limits<double>::infinity()};
  for (int y = 0; y + nh <= h; y += stride) {
    for (int x = 0; x + nw <= w; x += stride) {
      const double a = approx[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
      if (a > screened_min + 2.0 * margin) continue;
      const double mse = window_mse(haystack, needle, y, x, weights);
      if (better(mse, best)) best = {y, x, mse};
    }
  }
  return best;
}

}  // namespace detail

MatchResult match_region(const ImagePlane& haystack, const ImagePlane& needle, int stride,
                         const BinaryMask* weights) {
  check_match_inputs(haystack, needle, stride, weights);
  const double offsets = std::ceil((haystack.height() - needle.height() + 1) / static_cast<double>(stride)) *
                         std::ceil((haystack.width() - needle.width() + 1) / static_cast<double>(stride));
  const double work = offsets * static_cast<double>(needle.size());
  if (work <= kExhaustiveBudget) return detail::match_region_exhaustive(haystack, needle, stride, weights);
  return detail::match_region_spectral(haystack, needle, stride, weights);
}

RandomMask make_random_mask(int height, int width, double keep_frac, Seed seed) {
  if (height < 1 || width < 1) throw Error(ErrorCode::InvalidArgument, "mask dimensions must be positive");
  if (!(keep_frac > 0.0 && keep_frac <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "keep_frac must be in (0,1]");
  }
  RandomMask out{BinaryMask(height, width), seed};
  Rng rng(seed);
  for (auto& bit : out.mask.bits) bit = rng.bernoulli(keep_frac) ? 1 : 0;
  return out;
}

namespace {

// Blends `pixels` into `out` at (top, left) wherever both masks are set.
void blend_window(ImagePlane& out, const ImagePlane& pixels, const BinaryMask& shape,
                  const BinaryMask& sample, int top, int left, double alpha) {
  for (int y = 0; y < pixels.height(); ++y) {
    for (int x = 0; x < pixels.width(); ++x) {
      if (shape.at(y, x) == 0 || sample.at(y, x) == 0) continue;
      for (int c = 0; c < out.channels(); ++c) {
        double& t = out.at(top + y, left + x, c);
        t = std::clamp(t * alpha + pixels.at(y, x, c) * (1.0 - alpha), 0.0, 1.0);
      }
    }
  }
}

void check_patch(const ImagePlane& target, const SuperpixelPatch& patch) {
  if (patch.pixels.channels() != target.channels()) {
    throw Error(ErrorCode::ChannelMismatch, "patch and target channel counts differ");
  }
  if (patch.mask.height != patch.pixels.height() || patch.mask.width != patch.pixels.width()) {
    throw Error(ErrorCode::DimensionMismatch, "patch mask does not match patch pixels");
  }
  if (patch.mask.count() == 0) throw Error(ErrorCode::InvalidArgument, "patch mask is empty");
}

}  // namespace

ImagePlane fuse_forward(const ImagePlane& target, const SuperpixelPatch& patch,
                        const FusionParams& params, Seed seed, FusionRecord* record) {
  params.validate();
  check_patch(target, patch);
  const double area = static_cast<double>(patch.area());
  if (area < params.min_patch_frac * static_cast<double>(target.pixel_count())) {
    throw Error(ErrorCode::FusionConditionFailed, "patch area below fusion threshold");
  }
  if (patch.pixels.height() > target.height() || patch.pixels.width() > target.width()) {
    throw Error(ErrorCode::FusionConditionFailed, "patch does not fit inside target");
  }

  const MatchResult match = match_region(target, patch.pixels, params.stride, &patch.mask);
  const RandomMask sample =
      make_random_mask(patch.pixels.height(), patch.pixels.width(), params.mask_keep_frac, seed);

  ImagePlane out = target;
  blend_window(out, patch.pixels, patch.mask, sample.mask, match.y, match.x, params.alpha);
  if (record != nullptr) {
    *record = {false, match, patch.pixels.height(), patch.pixels.width(), seed};
  }
  return out;
}

ImagePlane fuse_fallback(const ImagePlane& target, const SuperpixelPatch& patch,
                         const FusionParams& params, Seed seed, FusionRecord* record) {
  params.validate();
  check_patch(target, patch);

  const int wh = std::min(patch.pixels.height(), target.height());
  const int ww = std::min(patch.pixels.width(), target.width());
  ImagePlane pixels = patch.pixels;
  BinaryMask shape = patch.mask;
  if (wh != pixels.height() || ww != pixels.width()) {
    pixels = resize_nearest(patch.pixels, wh, ww);
    shape = resize_nearest(patch.mask, wh, ww);
  }
  const BinaryMask* weights = shape.count() > 0 ? &shape : nullptr;
  if (weights == nullptr) shape = BinaryMask(wh, ww, 1);

  const MatchResult match = match_region(target, pixels, params.stride, weights);
  const RandomMask sample = make_random_mask(wh, ww, params.mask_keep_frac, seed);

  // Matched window P*, blended window P_fuse = P* * alpha + patch * M * (1 - alpha),
  // and target - P* + P_fuse written back; outside the window this is the identity.
  ImagePlane out = target;
  blend_window(out, pixels, shape, sample.mask, match.y, match.x, params.alpha);
  if (record != nullptr) *record = {true, match, wh, ww, seed};
  return out;
}

ImagePlane fuse_patch(const ImagePlane& target, const SuperpixelPatch& patch,
                      const FusionParams& params, Seed seed, FusionRecord* record) {
  try {
    return fuse_forward(target, patch, params, seed, record);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::FusionConditionFailed) throw;
  }
  return fuse_fallback(target, patch, params, seed, record);
}

}  // namespace pseudorain

#pragma once

#include "pseudorain/image.hpp"
#include "pseudorain/random.hpp"
#include "pseudorain/superpixel.hpp"

namespace pseudorain {

struct FusionParams {
  double alpha = 0.2;            // weight kept by the target
  double mask_keep_frac = 0.5;   // sampling probability of the random mask
  double min_patch_frac = 0.01;  // patch area / target area below which fusion falls back
  int stride = 1;

  void validate() const;
};

struct MatchResult {
  int y = 0;
  int x = 0;
  double mse = 0.0;
};

struct RandomMask {
  BinaryMask mask;
  Seed seed = 0;
};

/// Sliding-window search for the stride-aligned offset of `haystack` whose
/// window best matches `needle` in mean squared error over all channels.
/// When `weights` is given, only its set pixels contribute and the mean is
/// taken over them. Ties go to the smallest (y, x).
MatchResult match_region(const ImagePlane& haystack, const ImagePlane& needle, int stride = 1,
                         const BinaryMask* weights = nullptr);

namespace detail {
// Both strategies return the same result; match_region picks by problem size.
MatchResult match_region_exhaustive(const ImagePlane& haystack, const ImagePlane& needle,
                                    int stride, const BinaryMask* weights);
// Spectral lower-cost screening followed by exact re-evaluation of every
// offset within rounding distance of the screened minimum.
MatchResult match_region_spectral(const ImagePlane& haystack, const ImagePlane& needle,
                                  int stride, const BinaryMask* weights);
}  // namespace detail

/// Exact masked MSE of `needle` against the window of `haystack` at (y, x).
double window_mse(const ImagePlane& haystack, const ImagePlane& needle, int y, int x,
                  const BinaryMask* weights = nullptr);

RandomMask make_random_mask(int height, int width, double keep_frac, Seed seed);

/// Where and how a patch was blended; enough to replay the step.
struct FusionRecord {
  bool fallback = false;
  MatchResult match;
  int window_height = 0;
  int window_width = 0;
  Seed mask_seed = 0;
};

/// Blends the patch into its best-matching window of `target`:
/// target * alpha + patch * (1 - alpha) where both the superpixel mask and the
/// random mask are set, target elsewhere. Throws FusionConditionFailed when
/// the patch is too small or does not fit, which routes the caller to
/// fuse_fallback().
ImagePlane fuse_forward(const ImagePlane& target, const SuperpixelPatch& patch,
                        const FusionParams& params, Seed seed, FusionRecord* record = nullptr);

/// Replacement transfer: blends inside the matched target window
/// (window * alpha + patch * mask * (1 - alpha)) and writes the window back.
/// A patch larger than the target is nearest-neighbour resized to fit.
ImagePlane fuse_fallback(const ImagePlane& target, const SuperpixelPatch& patch,
                         const FusionParams& params, Seed seed, FusionRecord* record = nullptr);

/// fuse_forward, falling back to fuse_fallback on FusionConditionFailed.
ImagePlane fuse_patch(const ImagePlane& target, const SuperpixelPatch& patch,
                      const FusionParams& params, Seed seed, FusionRecord* record = nullptr);

}  // namespace pseudorain

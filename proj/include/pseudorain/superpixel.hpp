#pragma once

#include <vector>

#include "pseudorain/color.hpp"
#include "pseudorain/image.hpp"
#include "pseudorain/random.hpp"

namespace pseudorain {

struct SlicParams {
  int k = 50;                      // target superpixel count
  double m = 10.0;                 // compactness
  int max_iters = 10;
  double min_region_frac = 0.25;   // fragments below this fraction of S^2 are merged

  void validate() const;
};

/// Point in the joint (CIELAB, image-plane) feature space.
struct FeatureVector5 {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// Normalised SLIC distance sqrt((d_c/m)^2 + (d_s/S)^2).
double slic_distance(const FeatureVector5& center, const FeatureVector5& pixel, double m,
                     double interval) noexcept;

/// Initial grid interval S = sqrt(N / k).
double grid_interval(std::size_t pixel_count, int k) noexcept;

/// True when pixel (x, y) lies in the 2S x 2S search window of `center`,
/// i.e. |x - cx| <= S and |y - cy| <= S.
bool window_covers(const FeatureVector5& center, int x, int y, double interval) noexcept;

struct SuperpixelLabeling {
  int height = 0;
  int width = 0;
  std::vector<int> labels;            // row-major, values in [0, centers.size())
  std::vector<FeatureVector5> centers;
  double residual = 0.0;              // total 5-D centre movement of the last update
  int iterations = 0;

  int at(int y, int x) const noexcept {
    return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

/// Step-wise SLIC driver. slic_segment() runs it to completion; tests drive
/// the individual assignment and update steps.
class SlicSegmenter {
 public:
  SlicSegmenter(const ImagePlane& img, SlicParams params);

  /// Labels every pixel with the nearest centre among those whose window
  /// covers it (lowest index on ties). Uncovered pixels fall back to the
  /// globally nearest centre.
  void assign();

  /// Moves each centre to the mean of its members and returns the summed
  /// Euclidean displacement. Centres without members stay put.
  double update();

  /// Merges undersized 4-connected fragments into their largest neighbour,
  /// renumbers regions in raster order and recomputes their centres.
  SuperpixelLabeling finish(double residual, int iterations) const;

  const std::vector<FeatureVector5>& centers() const noexcept { return centers_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  FeatureVector5 feature(int y, int x) const noexcept;
  double interval() const noexcept { return interval_; }
  const SlicParams& params() const noexcept { return params_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }

 private:
  void seed_centers();
  double gradient(int y, int x) const noexcept;

  SlicParams params_;
  int height_;
  int width_;
  double interval_;
  LabImage lab_;
  std::vector<FeatureVector5> centers_;
  std::vector<int> labels_;
  std::vector<double> distances_;
};

/// SLIC over `img` (3 channels). The seed is accepted for interface
/// uniformity with the other stochastic stages; seeding is a deterministic
/// grid, so it does not influence the result.
SuperpixelLabeling slic_segment(const ImagePlane& img, const SlicParams& params, Seed seed = 0);

struct BoundingBox {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct SuperpixelPatch {
  BoundingBox bbox;
  BinaryMask mask;      // bbox-sized membership
  ImagePlane pixels;    // bbox-sized crop of the source image
  int source_label = 0;

  std::size_t area() const noexcept { return mask.count(); }
};

/// One patch per non-empty label, ordered by label.
std::vector<SuperpixelPatch> extract_patches(const ImagePlane& img,
                                             const SuperpixelLabeling& labeling);

/// Colour-indexed rendering of a label map for debugging.
ImagePlane render_labels(const SuperpixelLabeling& labeling);

}  // namespace pseudorain

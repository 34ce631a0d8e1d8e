#include "pseudorain/superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pseudorain {

void SlicParams::validate() const {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "SLIC k must be >= 1");
  if (!(m > 0.0)) throw Error(ErrorCode::InvalidArgument, "SLIC compactness must be > 0");
  if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "SLIC max_iters must be >= 1");
  if (!(min_region_frac > 0.0 && min_region_frac < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "SLIC min_region_frac must be in (0,1)");
  }
}

double slic_distance(const FeatureVector5& center, const FeatureVector5& pixel, double m,
                     double interval) noexcept {
  const double dl = pixel.l - center.l;
  const double da = pixel.a - center.a;
  const double db = pixel.b - center.b;
  const double dx = pixel.x - center.x;
  const double dy = pixel.y - center.y;
  const double dc = std::sqrt(dl * dl + da * da + db * db);
  const double ds = std::sqrt(dx * dx + dy * dy);
  const double color = dc / m;
  const double space = ds / interval;
  return std::sqrt(color * color + space * space);
}

double grid_interval(std::size_t pixel_count, int k) noexcept {
  return std::sqrt(static_cast<double>(pixel_count) / static_cast<double>(k));
}

bool window_covers(const FeatureVector5& center, int x, int y, double interval) noexcept {
  return std::abs(static_cast<double>(x) - center.x) <= interval &&
         std::abs(static_cast<double>(y) - center.y) <= interval;
}

SlicSegmenter::SlicSegmenter(const ImagePlane& img, SlicParams params)
    : params_(params), height_(img.height()), width_(img.width()) {
  params_.validate();
  if (img.channels() != 3) throw Error(ErrorCode::ChannelMismatch, "SLIC needs an RGB image");
  if (img.pixel_count() < static_cast<std::size_t>(params_.k)) {
    throw Error(ErrorCode::ImageTooSmall, "image has fewer pixels than requested superpixels");
  }
  interval_ = grid_interval(img.pixel_count(), params_.k);
  lab_ = rgb_to_lab(img);
  labels_.assign(img.pixel_count(), -1);
  distances_.assign(img.pixel_count(), std::numeric_limits<double>::infinity());
  seed_centers();
}

FeatureVector5 SlicSegmenter::feature(int y, int x) const noexcept {
  const LabPixel& p = lab_.at(y, x);
  return {p.l, p.a, p.b, static_cast<double>(x), static_cast<double>(y)};
}

double SlicSegmenter::gradient(int y, int x) const noexcept {
  const auto sq = [](const LabPixel& p, const LabPixel& q) {
    return (p.l - q.l) * (p.l - q.l) + (p.a - q.a) * (p.a - q.a) + (p.b - q.b) * (p.b - q.b);
  };
  const int xm = std::max(x - 1, 0), xp = std::min(x + 1, width_ - 1);
  const int ym = std::max(y - 1, 0), yp = std::min(y + 1, height_ - 1);
  return sq(lab_.at(y, xp), lab_.at(y, xm)) + sq(lab_.at(yp, x), lab_.at(ym, x));
}

void SlicSegmenter::seed_centers() {
  // Grid of nx x ny cells shaped after the aspect ratio, ny * nx ~ k.
  const double k = params_.k;
  int ny = static_cast<int>(std::lround(std::sqrt(k * height_ / static_cast<double>(width_))));
  ny = std::clamp(ny, 1, height_);
  int nx = static_cast<int>(std::lround(k / ny));
  nx = std::clamp(nx, 1, width_);

  centers_.clear();
  centers_.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j) {
    const int gy = static_cast<int>(std::floor((j + 0.5) * height_ / ny));
    for (int i = 0; i < nx; ++i) {
      const int gx = static_cast<int>(std::floor((i + 0.5) * width_ / nx));
      // Move off edges: lowest gradient in the 3x3 neighbourhood, centre wins ties.
      int by = gy, bx = gx;
      double best = gradient(gy, gx);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int y = gy + dy, x = gx + dx;
          if (y < 0 || x < 0 || y >= height_ || x >= width_) continue;
          const double g = gradient(y, x);
          if (g < best) {
            best = g;
            by = y;
            bx = x;
          }
        }
      }
      centers_.push_back(feature(by, bx));
    }
  }
}

void SlicSegmenter::assign() {
  std::fill(labels_.begin(), labels_.end(), -1);
  std::fill(distances_.begin(), distances_.end(), std::numeric_limits<double>::infinity());
  const double s = interval_;
  const double m = params_.m;

  for (std::size_t c = 0; c < centers_.size(); ++c) {
    const FeatureVector5& center = centers_[c];
    // One pixel of slack on each side; window_covers decides membership exactly.
    const int y0 = std::max(0, static_cast<int>(std::floor(center.y - s)) - 1);
    const int y1 = std::min(height_ - 1, static_cast<int>(std::ceil(center.y + s)) + 1);
    const int x0 = std::max(0, static_cast<int>(std::floor(center.x - s)) - 1);
    const int x1 = std::min(width_ - 1, static_cast<int>(std::ceil(center.x + s)) + 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (!window_covers(center, x, y, s)) continue;
        const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                              static_cast<std::size_t>(x);
        const double d = slic_distance(center, feature(y, x), m, s);
        // Centres are visited in index order, so strict < keeps the lowest index on ties.
        if (d < distances_[i]) {
          distances_[i] = d;
          labels_[i] = static_cast<int>(c);
        }
      }
    }
  }

  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                            static_cast<std::size_t>(x);
      if (labels_[i] >= 0) continue;
      const FeatureVector5 f = feature(y, x);
      for (std::size_t c = 0; c < centers_.size(); ++c) {
        const double d = slic_distance(centers_[c], f, m, s);
        if (d < distances_[i]) {
          distances_[i] = d;
          labels_[i] = static_cast<int>(c);
        }
      }
    }
  }
}

double SlicSegmenter::update() {
  std::vector<FeatureVector5> sums(centers_.size());
  std::vector<std::size_t> counts(centers_.size(), 0);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const int label = labels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                                static_cast<std::size_t>(x)];
      if (label < 0) continue;
      const FeatureVector5 f = feature(y, x);
      auto& s = sums[static_cast<std::size_t>(label)];
      s.l += f.l;
      s.a += f.a;
      s.b += f.b;
      s.x += f.x;
      s.y += f.y;
      ++counts[static_cast<std::size_t>(label)];
    }
  }

  double movement = 0.0;
  for (std::size_t c = 0; c < centers_.size(); ++c) {
    if (counts[c] == 0) continue;
    const double n = static_cast<double>(counts[c]);
    const FeatureVector5 next{sums[c].l / n, sums[c].a / n, sums[c].b / n, sums[c].x / n,
                              sums[c].y / n};
    const FeatureVector5& prev = centers_[c];
    movement += std::sqrt((next.l - prev.l) * (next.l - prev.l) + (next.a - prev.a) * (next.a - prev.a) +
                          (next.b - prev.b) * (next.b - prev.b) + (next.x - prev.x) * (next.x - prev.x) +
                          (next.y - prev.y) * (next.y - prev.y));
    centers_[c] = next;
  }
  return movement;
}

namespace {

struct DisjointSets {
  std::vector<int> parent;
  std::vector<std::size_t> size;

  explicit DisjointSets(std::size_t n) : parent(n), size(n, 0) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      auto& p = parent[static_cast<std::size_t>(v)];
      p = parent[static_cast<std::size_t>(p)];
      v = p;
    }
    return v;
  }
};

}  // namespace

SuperpixelLabeling SlicSegmenter::finish(double residual, int iterations) const {
  const std::size_t n = labels_.size();
  const int w = width_, h = height_;

  // 4-connected components of the raw assignment, numbered in raster order.
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> members;
  std::vector<int> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    const int id = static_cast<int>(members.size());
    const int label = labels_[start];
    members.emplace_back();
    comp[start] = id;
    stack.assign(1, static_cast<int>(start));
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      members.back().push_back(p);
      const int py = p / w, px = p % w;
      const int nbrs[4][2] = {{py - 1, px}, {py + 1, px}, {py, px - 1}, {py, px + 1}};
      for (const auto& nb : nbrs) {
        if (nb[0] < 0 || nb[0] >= h || nb[1] < 0 || nb[1] >= w) continue;
        const int q = nb[0] * w + nb[1];
        if (comp[static_cast<std::size_t>(q)] < 0 && labels_[static_cast<std::size_t>(q)] == label) {
          comp[static_cast<std::size_t>(q)] = id;
          stack.push_back(q);
        }
      }
    }
  }

  DisjointSets sets(members.size());
  for (std::size_t c = 0; c < members.size(); ++c) sets.size[c] = members[c].size();

  const double threshold = params_.min_region_frac * interval_ * interval_;
  for (std::size_t c = 0; c < members.size(); ++c) {
    const int root = static_cast<int>(c);
    if (sets.find(root) != root) continue;
    if (static_cast<double>(sets.size[c]) >= threshold) continue;

    int target = -1;
    for (const int p : members[c]) {
      const int py = p / w, px = p % w;
      const int nbrs[4][2] = {{py - 1, px}, {py + 1, px}, {py, px - 1}, {py, px + 1}};
      for (const auto& nb : nbrs) {
        if (nb[0] < 0 || nb[0] >= h || nb[1] < 0 || nb[1] >= w) continue;
        const int r = sets.find(comp[static_cast<std::size_t>(nb[0] * w + nb[1])]);
        if (r == root) continue;
        const auto rs = sets.size[static_cast<std::size_t>(r)];
        if (target < 0 || rs > sets.size[static_cast<std::size_t>(target)] ||
            (rs == sets.size[static_cast<std::size_t>(target)] && r < target)) {
          target = r;
        }
      }
    }
    if (target < 0) continue;  // the fragment is the whole image

    auto& dst = members[static_cast<std::size_t>(target)];
    dst.insert(dst.end(), members[c].begin(), members[c].end());
    members[c].clear();
    sets.size[static_cast<std::size_t>(target)] += sets.size[c];
    sets.parent[c] = target;
  }

  SuperpixelLabeling out;
  out.height = h;
  out.width = w;
  out.labels.assign(n, -1);
  out.residual = residual;
  out.iterations = iterations;

  std::vector<int> renumber(members.size(), -1);
  std::vector<FeatureVector5> sums;
  std::vector<std::size_t> counts;
  for (std::size_t p = 0; p < n; ++p) {
    const auto root = static_cast<std::size_t>(sets.find(comp[p]));
    if (renumber[root] < 0) {
      renumber[root] = static_cast<int>(sums.size());
      sums.emplace_back();
      counts.push_back(0);
    }
    const int label = renumber[root];
    out.labels[p] = label;
    const FeatureVector5 f = feature(static_cast<int>(p) / w, static_cast<int>(p) % w);
    auto& s = sums[static_cast<std::size_t>(label)];
    s.l += f.l;
    s.a += f.a;
    s.b += f.b;
    s.x += f.x;
    s.y += f.y;
    ++counts[static_cast<std::size_t>(label)];
  }
  out.centers.reserve(sums.size());
  for (std::size_t c = 0; c < sums.size(); ++c) {
    const double k = static_cast<double>(counts[c]);
    out.centers.push_back({sums[c].l / k, sums[c].a / k, sums[c].b / k, sums[c].x / k, sums[c].y / k});
  }
  return out;
}

SuperpixelLabeling slic_segment(const ImagePlane& img, const SlicParams& params, Seed /*seed*/) {
  constexpr double kResidualThreshold = 1e-3;
  SlicSegmenter segmenter(img, params);
  double residual = 0.0;
  int iterations = 0;
  while (iterations < params.max_iters) {
    segmenter.assign();
    residual = segmenter.update();
    ++iterations;
    if (residual < kResidualThreshold) break;
  }
  return segmenter.finish(residual, iterations);
}

std::vector<SuperpixelPatch> extract_patches(const ImagePlane& img,
                                             const SuperpixelLabeling& labeling) {
  if (img.height() != labeling.height || img.width() != labeling.width ||
      labeling.labels.size() != img.pixel_count()) {
    throw Error(ErrorCode::DimensionMismatch, "labeling does not match image");
  }
  const std::size_t count = labeling.centers.size();
  struct Extent {
    int top = std::numeric_limits<int>::max(), left = std::numeric_limits<int>::max();
    int bottom = -1, right = -1;
  };
  std::vector<Extent> extents(count);
  for (int y = 0; y < labeling.height; ++y) {
    for (int x = 0; x < labeling.width; ++x) {
      const int label = labeling.at(y, x);
      if (label < 0 || static_cast<std::size_t>(label) >= count) {
        throw Error(ErrorCode::DimensionMismatch, "label out of range");
      }
      auto& e = extents[static_cast<std::size_t>(label)];
      e.top = std::min(e.top, y);
      e.left = std::min(e.left, x);
      e.bottom = std::max(e.bottom, y);
      e.right = std::max(e.right, x);
    }
  }

  std::vector<SuperpixelPatch> patches;
  for (std::size_t label = 0; label < count; ++label) {
    const Extent& e = extents[label];
    if (e.bottom < 0) continue;
    SuperpixelPatch patch;
    patch.bbox = {e.top, e.left, e.bottom - e.top + 1, e.right - e.left + 1};
    patch.source_label = static_cast<int>(label);
    patch.pixels = img.crop(e.top, e.left, patch.bbox.height, patch.bbox.width);
    patch.mask = BinaryMask(patch.bbox.height, patch.bbox.width);
    for (int y = 0; y < patch.bbox.height; ++y) {
      for (int x = 0; x < patch.bbox.width; ++x) {
        patch.mask.at(y, x) = labeling.at(e.top + y, e.left + x) == static_cast<int>(label) ? 1 : 0;
      }
    }
    patches.push_back(std::move(patch));
  }
  return patches;
}

ImagePlane render_labels(const SuperpixelLabeling& labeling) {
  ImagePlane out(labeling.height, labeling.width, 3);
  for (int y = 0; y < labeling.height; ++y) {
    for (int x = 0; x < labeling.width; ++x) {
      const auto h = splitmix64(static_cast<std::uint64_t>(labeling.at(y, x)));
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) = static_cast<double>((h >> (8 * c)) & 0xFF) / 255.0;
      }
    }
  }
  return out;
}

}  // namespace pseudorain

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <random>
#include <set>

#include "oracles.hpp"
#include "pseudorain/superpixel.hpp"

using namespace pseudorain;

namespace {

// True when every label's pixels form a single 4-connected region.
bool regions_connected(const SuperpixelLabeling& lab) {
  std::vector<char> seen(lab.labels.size(), 0);
  std::set<int> started;
  for (int y0 = 0; y0 < lab.height; ++y0) {
    for (int x0 = 0; x0 < lab.width; ++x0) {
      const auto i0 = static_cast<std::size_t>(y0 * lab.width + x0);
      if (seen[i0]) continue;
      const int label = lab.labels[i0];
      if (!started.insert(label).second) return false;  // second component of a label
      std::queue<std::pair<int, int>> q;
      q.push({y0, x0});
      seen[i0] = 1;
      while (!q.empty()) {
        const auto [y, x] = q.front();
        q.pop();
        const int d[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& o : d) {
          const int ny = y + o[0], nx = x + o[1];
          if (ny < 0 || nx < 0 || ny >= lab.height || nx >= lab.width) continue;
          const auto j = static_cast<std::size_t>(ny * lab.width + nx);
          if (!seen[j] && lab.labels[j] == label) {
            seen[j] = 1;
            q.push({ny, nx});
          }
        }
      }
    }
  }
  return true;
}

double median_seconds(const ImagePlane& img, const SlicParams& params, int runs) {
  std::vector<double> t;
  for (int r = 0; r < runs; ++r) {
    const auto start = std::chrono::steady_clock::now();
    const auto lab = slic_segment(img, params);
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    CHECK(!lab.labels.empty());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

}  // namespace

TEST_CASE("slic_distance worked values") {
  const FeatureVector5 origin{0, 0, 0, 0, 0};
  CHECK(slic_distance(origin, origin, 10.0, 5.0) == 0.0);
  CHECK(slic_distance(origin, {10, 0, 0, 5, 0}, 10.0, 5.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  // d_c = |(3,4,0)| = 5, d_s = |(3,4)| = 5.
  CHECK(slic_distance({50, 0, 0, 10, 10}, {53, 4, 0, 13, 14}, 10.0, 5.0) ==
        doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));
}

TEST_CASE("grid interval and window coverage") {
  CHECK(grid_interval(1024, 4) == 16.0);
  const FeatureVector5 c{0, 0, 0, 8.0, 8.0};
  CHECK(window_covers(c, 0, 0, 8.0));
  CHECK(window_covers(c, 16, 16, 8.0));
  CHECK_FALSE(window_covers(c, 17, 8, 8.0));
}

TEST_CASE("parameter validation and too-small images") {
  SlicParams p;
  p.k = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.min_region_frac = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  SlicParams big;
  big.k = 17;
  CHECK(oracle::code_of([&] { slic_segment(ImagePlane(4, 4, 3), big); }) == ErrorCode::ImageTooSmall);
  CHECK(oracle::code_of([&] { slic_segment(ImagePlane(4, 4, 1), SlicParams{}); }) == ErrorCode::ChannelMismatch);
}

TEST_CASE("solid image splits into spatial Voronoi cells") {
  SlicParams p;
  p.k = 4;
  const auto lab = slic_segment(ImagePlane(32, 32, 3, 0.4), p);
  REQUIRE(lab.centers.size() == 4);
  std::vector<int> area(4, 0);
  for (int l : lab.labels) ++area[static_cast<std::size_t>(l)];
  for (int a : area) {
    CHECK(a >= 205);
    CHECK(a <= 307);
  }
  // Centres at 8 and 24; pixels equidistant from both (column/row 16) go to
  // the lower index.
  CHECK(lab.at(0, 0) != lab.at(0, 31));
  CHECK(lab.at(0, 0) != lab.at(31, 0));
  CHECK(lab.at(0, 0) == lab.at(16, 16));
  CHECK(lab.at(31, 31) == lab.at(17, 17));
  CHECK(lab.at(31, 31) != lab.at(16, 16));
}

TEST_CASE("two-colour image splits exactly along the colour edge") {
  ImagePlane img(16, 16, 3);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      img.at(y, x, x < 8 ? 0 : 2) = 1.0;
    }
  }
  SlicParams p;
  p.k = 2;
  p.m = 10.0;
  const auto lab = slic_segment(img, p);
  REQUIRE(lab.centers.size() == 2);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) CHECK(lab.at(y, x) == (x < 8 ? 0 : 1));
  }
}

TEST_CASE("assignment step matches the exhaustive restricted-search oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 6; ++trial) {
    const ImagePlane img = oracle::random_image(rng, 16, 16);
    SlicParams p;
    p.k = 4;
    SlicSegmenter seg(img, p);
    for (int it = 0; it < 3; ++it) {
      seg.assign();
      CHECK(seg.labels() == oracle::slic_assignment(seg));
      seg.update();
    }
  }
}

TEST_CASE("labeling invariants on random images") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    const int h = 20 + trial * 3, w = 24 + trial;
    const ImagePlane img = oracle::random_image(rng, h, w);
    SlicParams p;
    p.k = 3 + trial;
    const auto lab = slic_segment(img, p);
    for (int l : lab.labels) {
      CHECK(l >= 0);
      CHECK(static_cast<std::size_t>(l) < lab.centers.size());
    }
    for (const auto& c : lab.centers) {
      CHECK(c.x >= 0.0);
      CHECK(c.x <= w - 1.0);
      CHECK(c.y >= 0.0);
      CHECK(c.y <= h - 1.0);
    }
    CHECK(regions_connected(lab));

    // Centroid fixed point: recomputing the means moves nothing.
    std::vector<FeatureVector5> sums(lab.centers.size());
    std::vector<double> n(lab.centers.size(), 0.0);
    const LabImage labimg = rgb_to_lab(img);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const auto l = static_cast<std::size_t>(lab.at(y, x));
        const LabPixel& px = labimg.at(y, x);
        sums[l].l += px.l;
        sums[l].a += px.a;
        sums[l].b += px.b;
        sums[l].x += x;
        sums[l].y += y;
        n[l] += 1.0;
      }
    }
    for (std::size_t c = 0; c < sums.size(); ++c) {
      const auto& ctr = lab.centers[c];
      const double move = std::hypot(sums[c].l / n[c] - ctr.l, sums[c].a / n[c] - ctr.a, sums[c].b / n[c] - ctr.b) +
                          std::hypot(sums[c].x / n[c] - ctr.x, sums[c].y / n[c] - ctr.y);
      CHECK(move < 1e-3);
    }
  }
}

TEST_CASE("segmentation is deterministic") {
  std::mt19937_64 rng(9);
  const ImagePlane img = oracle::random_image(rng, 40, 30);
  SlicParams p;
  p.k = 6;
  const auto a = slic_segment(img, p, 1);
  const auto b = slic_segment(img, p, 1);
  CHECK(a.labels == b.labels);
  CHECK(a.residual == b.residual);
}

TEST_CASE("extract_patches: whole-image label") {
  SuperpixelLabeling lab;
  lab.height = 3;
  lab.width = 5;
  lab.labels.assign(15, 0);
  lab.centers.resize(1);
  const auto patches = extract_patches(ImagePlane(3, 5, 3, 0.2), lab);
  REQUIRE(patches.size() == 1);
  CHECK(patches[0].bbox == BoundingBox{0, 0, 3, 5});
  CHECK(patches[0].mask.count() == 15);
}

TEST_CASE("extract_patches: half split") {
  SuperpixelLabeling lab;
  lab.height = 4;
  lab.width = 4;
  lab.centers.resize(2);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) lab.labels.push_back(x < 2 ? 0 : 1);
  ImagePlane img(4, 4, 3);
  img.at(2, 3, 1) = 0.75;
  const auto patches = extract_patches(img, lab);
  REQUIRE(patches.size() == 2);
  CHECK(patches[0].bbox == BoundingBox{0, 0, 4, 2});
  CHECK(patches[1].bbox == BoundingBox{0, 2, 4, 2});
  CHECK(patches[1].pixels.at(2, 1, 1) == 0.75);
  CHECK(patches[1].source_label == 1);
}

TEST_CASE("extract_patches partitions the pixel set") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int h = 5 + trial % 7, w = 4 + trial % 5;
    const int labels = 1 + trial % 6;
    SuperpixelLabeling lab;
    lab.height = h;
    lab.width = w;
    lab.centers.resize(static_cast<std::size_t>(labels));
    std::uniform_int_distribution<int> pick(0, labels - 1);
    for (int i = 0; i < h * w; ++i) lab.labels.push_back(pick(rng));
    const auto patches = extract_patches(oracle::random_image(rng, h, w), lab);

    std::vector<int> cover(static_cast<std::size_t>(h * w), 0);
    std::size_t total = 0;
    for (const auto& p : patches) {
      CHECK(p.mask.count() >= 1);
      CHECK(p.pixels.height() == p.bbox.height);
      CHECK(p.mask.width == p.bbox.width);
      for (int y = 0; y < p.bbox.height; ++y)
        for (int x = 0; x < p.bbox.width; ++x)
          if (p.mask.at(y, x)) ++cover[static_cast<std::size_t>((p.bbox.top + y) * w + p.bbox.left + x)];
      total += p.area();
    }
    CHECK(total == static_cast<std::size_t>(h * w));
    CHECK(std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("extract_patches rejects a labeling of another image") {
  SuperpixelLabeling lab;
  lab.height = 2;
  lab.width = 2;
  lab.labels.assign(4, 0);
  lab.centers.resize(1);
  CHECK(oracle::code_of([&] { extract_patches(ImagePlane(3, 2, 3), lab); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("doubling the pixel count at fixed k at most triples the run time") {
  std::mt19937_64 rng(2);
  const ImagePlane small = oracle::random_image(rng, 256, 256);
  const ImagePlane large = oracle::random_image(rng, 256, 512);
  SlicParams p;
  p.k = 50;
  const double ts = median_seconds(small, p, 5);
  const double tl = median_seconds(large, p, 5);
  MESSAGE("256x256: " << ts << " s, 256x512: " << tl << " s");
  CHECK(tl / ts <= 3.0);
}

// Release checks: one PASS/FAIL line each, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "../fixtures.hpp"
#include "../oracles.hpp"
#include "pseudorain/color.hpp"
#include "pseudorain/fusion.hpp"
#include "pseudorain/metrics.hpp"
#include "pseudorain/pipeline.hpp"
#include "pseudorain/rain.hpp"
#include "pseudorain/superpixel.hpp"

using namespace pseudorain;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome slic_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> side(8, 32);
  const int ks[] = {2, 4, 8};
  int passes = 0, mismatched = 0;
  for (int i = 0; i < 20; ++i) {
    const ImagePlane img = oracle::random_image(rng, side(rng), side(rng));
    SlicParams p;
    p.k = ks[i % 3];
    SlicSegmenter seg(img, p);
    for (int it = 0; it < p.max_iters; ++it) {
      seg.assign();
      ++passes;
      if (seg.labels() != oracle::slic_assignment(seg)) ++mismatched;
      if (seg.update() < 1e-3) break;
    }
  }
  const double t = seconds_since(t0);
  return {mismatched == 0 && t < 10.0,
          fmt("20 images, %d assignment passes, %d mismatched, %.2f s", passes, mismatched, t)};
}

double median_slic_seconds(const ImagePlane& img) {
  SlicParams p;
  p.k = 50;
  std::vector<double> t;
  for (int r = 0; r < 5; ++r) {
    const auto t0 = Clock::now();
    (void)slic_segment(img, p);
    t.push_back(seconds_since(t0));
  }
  std::sort(t.begin(), t.end());
  return t[2];
}

Outcome slic_linearity() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(102);
  const double small = median_slic_seconds(oracle::random_image(rng, 256, 256));
  const double large = median_slic_seconds(oracle::random_image(rng, 512, 512));
  const double ratio = large / small;
  const double t = seconds_since(t0);
  return {ratio <= 6.0 && t < 60.0, fmt("256^2 %.3f s, 512^2 %.3f s, ratio %.2f", small, large, ratio)};
}

Outcome matcher_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<int> hay_side(16, 64), needle_side(1, 16);
  int bad = 0, bad_spectral = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const ImagePlane hay = oracle::random_image(rng, hay_side(rng), hay_side(rng));
    const ImagePlane needle = oracle::random_image(rng, needle_side(rng), needle_side(rng));
    const MatchResult want = oracle::match(hay, needle);
    const MatchResult got = match_region(hay, needle);
    const MatchResult spec = detail::match_region_spectral(hay, needle, 1, nullptr);
    worst = std::max({worst, std::abs(got.mse - want.mse), std::abs(spec.mse - want.mse)});
    if (got.y != want.y || got.x != want.x || std::abs(got.mse - want.mse) > 1e-10) ++bad;
    if (spec.y != want.y || spec.x != want.x || std::abs(spec.mse - want.mse) > 1e-10) ++bad_spectral;
  }
  const double t = seconds_since(t0);
  return {bad == 0 && bad_spectral == 0 && t < 10.0,
          fmt("50 instances, %d mismatched (spectral path %d), max |dMSE| %.1e, %.2f s", bad, bad_spectral, worst, t)};
}

Outcome fusion_identities() {
  std::mt19937_64 rng(104);
  double worst_identity = 0.0;
  int leaks = 0, cases = 0;
  for (int i = 0; i < 20; ++i) {
    const ImagePlane target = oracle::random_image(rng, 24 + i % 7, 20 + i % 5);
    SuperpixelPatch patch;
    patch.bbox = {0, 0, 3 + i % 6, 4 + i % 5};
    patch.pixels = oracle::random_image(rng, patch.bbox.height, patch.bbox.width);
    patch.mask = oracle::random_mask(rng, patch.bbox.height, patch.bbox.width);

    for (bool fallback : {false, true}) {
      FusionParams p;
      p.min_patch_frac = 0.0;
      p.alpha = 1.0;
      const ImagePlane same = fallback ? fuse_fallback(target, patch, p, i) : fuse_forward(target, patch, p, i);
      for (std::size_t j = 0; j < same.size(); ++j)
        worst_identity = std::max(worst_identity, std::abs(same.samples()[j] - target.samples()[j]));

      p.alpha = std::uniform_real_distribution<double>(0.0, 0.9)(rng);
      FusionRecord rec;
      const ImagePlane out =
          fallback ? fuse_fallback(target, patch, p, i, &rec) : fuse_forward(target, patch, p, i, &rec);
      ++cases;
      bool leaked = false;
      for (int y = 0; y < target.height(); ++y)
        for (int x = 0; x < target.width(); ++x) {
          const bool in = y >= rec.match.y && y < rec.match.y + rec.window_height && x >= rec.match.x &&
                          x < rec.match.x + rec.window_width;
          if (in) continue;
          for (int c = 0; c < 3; ++c) leaked |= out.at(y, x, c) != target.at(y, x, c);
        }
      leaks += leaked ? 1 : 0;
    }
  }
  return {worst_identity <= 1e-7 && leaks == 0,
          fmt("alpha=1 max deviation %.1e over 40 fusions; %d/%d cases changed pixels outside the window",
              worst_identity, leaks, cases)};
}

Outcome kernel_normalization() {
  const RainParams r;
  std::mt19937_64 rng(105);
  std::uniform_int_distribution<int> len(static_cast<int>(r.length.min), static_cast<int>(r.length.max));
  std::uniform_int_distribution<int> wid(static_cast<int>(r.width.min), static_cast<int>(r.width.max));
  std::uniform_real_distribution<double> ang(r.theta.min, r.theta.max);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) worst = std::max(worst, std::abs(motion_kernel(len(rng), ang(rng), wid(rng)).sum() - 1.0));
  double worst_g = 0.0;
  int gauss = 0;
  for (int k = 1; k <= 31; k += 2)
    for (double sigma : {0.2, 0.5, 1.0, 2.0, 5.0, 20.0}) {
      worst_g = std::max(worst_g, std::abs(gaussian_kernel(k, sigma).sum() - 1.0));
      ++gauss;
    }
  return {worst <= 1e-9 && worst_g <= 1e-9,
          fmt("200 motion kernels max |sum-1| %.1e; %d Gaussian kernels max |sum-1| %.1e", worst, gauss, worst_g)};
}

Outcome luminance_blend() {
  std::mt19937_64 rng(106);
  const ImagePlane clean = oracle::random_image(rng, 32, 32);
  const StreakMask streaks{StreakStage::Motion, oracle::random_image(rng, 32, 32, 1)};
  const ImagePlane same = composite_rain(clean, streaks, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) worst = std::max(worst, std::abs(same.samples()[i] - clean.samples()[i]));

  const YuvImage sat = composite_rain_yuv(clean, {StreakStage::Motion, ImagePlane(32, 32, 1, 1.0)}, 0.0);
  const bool all_one = std::all_of(sat.y.samples().begin(), sat.y.samples().end(), [](double v) { return v == 1.0; });
  const double spot = blend_luminance(0.6, 0.0, 0.9);
  return {worst <= 2.0 / 255.0 && all_one && spot == 0.54,
          fmt("beta=1 max deviation %.1e; beta=0 luminance all 1: %s; (0.6, 0, 0.9) -> %.17g", worst,
              all_one ? "yes" : "no", spot)};
}

ImagePlane cyclic_shift(const ImagePlane& img, int dy, int dx) {
  ImagePlane out(img.height(), img.width(), img.channels());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < img.channels(); ++c)
        out.at((y + dy) % img.height(), (x + dx) % img.width(), c) = img.at(y, x, c);
  return out;
}

Outcome loss_identities() {
  std::mt19937_64 rng(107);
  const ImagePlane x = oracle::random_image(rng, 24, 20);
  const double c_err = std::abs(charbonnier(x, x, 1e-3) - 1e-3);
  const double f = fft_magnitude_loss(x, cyclic_shift(x, 5, 7));
  const double e = edge_loss(ImagePlane(16, 16, 3, 0.1), ImagePlane(16, 16, 3, 0.8));
  const double db = psnr(ImagePlane(8, 8, 3, 0.5), ImagePlane(8, 8, 3, 0.0));
  double worst_ssim = 0.0;
  for (int i = 0; i < 20; ++i) {
    const ImagePlane a = oracle::random_image(rng, 16 + i % 5, 14 + i % 7);
    ImagePlane b = a;
    std::normal_distribution<double> n(0.0, 0.1);
    for (double& s : b.samples()) s = std::clamp(s + n(rng), 0.0, 1.0);
    worst_ssim = std::max(worst_ssim, std::abs(ssim(a, b) - oracle::ssim(a, b)));
  }
  return {c_err <= 1e-9 && f <= 1e-5 && e == 0.0 && std::abs(db - 6.0206) <= 1e-3 && worst_ssim <= 1e-6,
          fmt("|charb-eps| %.1e; fft shift %.1e; edge %.1e; psnr %.4f dB; ssim max |d| %.1e", c_err, f, e, db,
              worst_ssim)};
}

Outcome color_roundtrips() {
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_rgb = 0.0, worst_ab = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ImagePlane img = oracle::random_image(rng, 16, 16);
    const ImagePlane back = yuv_to_rgb(rgb_to_yuv(img));
    for (std::size_t j = 0; j < img.size(); ++j) worst_rgb = std::max(worst_rgb, std::abs(back.samples()[j] - img.samples()[j]));

    ImagePlane gray(16, 16, 3);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        const double v = u(rng);
        for (int c = 0; c < 3; ++c) gray.at(y, x, c) = v;
      }
    const LabImage lab = rgb_to_lab(gray);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) worst_ab = std::max({worst_ab, std::abs(lab.at(y, x).a), std::abs(lab.at(y, x).b)});
  }
  return {worst_rgb <= 2.0 / 255.0 && worst_ab < 1e-3,
          fmt("100 images: rgb->yuv->rgb max error %.1e; gray Lab max |a|,|b| %.1e", worst_rgb, worst_ab)};
}

bool same_tree(const fs::path& a, const fs::path& b, int& files) {
  files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const fs::path other = b / fs::relative(e.path(), a);
    if (!fs::exists(other) || oracle::read_bytes(e.path()) != oracle::read_bytes(other)) return false;
    ++files;
  }
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file() && !fs::exists(a / fs::relative(e.path(), b))) return false;
  return true;
}

PipelineConfig fixture_config(const oracle::TempDir& root, const std::string& out) {
  PipelineConfig c;
  c.source_dir = root.path() / "src";
  c.target_dir = root.path() / "tgt";
  c.out_dir = root.path() / out;
  c.seed = 2024;
  return c;
}

Outcome end_to_end_determinism() {
  const auto t0 = Clock::now();
  oracle::TempDir root("accept");
  fixture::write_set(root.path() / "src", "src", 4, 11);
  fixture::write_set(root.path() / "tgt", "tgt", 4, 12);
  const char* outs[] = {"w1a", "w1b", "w4a", "w4b"};
  int failed = 0;
  for (int i = 0; i < 4; ++i) {
    PipelineConfig c = fixture_config(root, outs[i]);
    c.workers = i < 2 ? 1 : 4;
    for (const auto& s : run_pipeline(c)) failed += s.ok ? 0 : 1;
  }
  int files = 0;
  bool same = true;
  for (int i = 1; i < 4; ++i) same &= same_tree(root.path() / outs[0], root.path() / outs[i], files);
  const double t = seconds_since(t0);
  return {same && failed == 0 && files > 1 && t < 120.0,
          fmt("4 runs (workers 1,1,4,4): %d files each, identical: %s, failed samples %d, %.2f s", files,
              same ? "yes" : "no", failed, t)};
}

Outcome degenerate_identity() {
  oracle::TempDir root("degen");
  fixture::write_set(root.path() / "src", "src", 4, 21);
  fixture::write_set(root.path() / "tgt", "tgt", 4, 22);
  PipelineConfig c = fixture_config(root, "out");
  c.patches_per_target = 0;
  c.rain.beta = {1.0, 1.0};
  c.rain.p = {1e-9, 1e-9};
  double worst_clean = 0.0, worst_rainy = 0.0;
  int failed = 0;
  for (const auto& s : run_pipeline(c)) {
    if (!s.ok) {
      ++failed;
      continue;
    }
    const ImagePlane target = load_image(s.target_image);
    const ImagePlane clean = load_image(c.out_dir / s.clean_path);
    const ImagePlane rainy = load_image(c.out_dir / s.rainy_path);
    for (std::size_t i = 0; i < target.size(); ++i) {
      worst_clean = std::max(worst_clean, std::abs(clean.samples()[i] - target.samples()[i]));
      worst_rainy = std::max(worst_rainy, std::abs(rainy.samples()[i] - clean.samples()[i]));
    }
  }
  return {failed == 0 && worst_clean <= 2.0 / 255.0 && worst_rainy <= 2.0 / 255.0,
          fmt("max |clean-target| %.4f, max |rainy-clean| %.4f (limit %.4f)", worst_clean, worst_rainy, 2.0 / 255.0)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"SLIC oracle equivalence", slic_oracle},
      {"SLIC linearity", slic_linearity},
      {"Matcher oracle equivalence", matcher_oracle},
      {"Fusion identities", fusion_identities},
      {"Kernel normalization", kernel_normalization},
      {"Luminance blend checks", luminance_blend},
      {"Loss identities", loss_identities},
      {"Color roundtrips", color_roundtrips},
      {"End-to-end determinism", end_to_end_determinism},
      {"Degenerate-config identity", degenerate_identity},
  };
  int failures = 0;
  int n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %d. %s: %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failures, n);
  return failures == 0 ? 0 : 1;
}

#include "pseudorain/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fft.hpp"

namespace pseudorain {

void LossWeights::validate() const {
  if (lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "loss weights must be non-negative");
  }
  if (!(epsilon >= 1e-6 && epsilon <= 1e-3)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in [1e-6, 1e-3]");
  }
}

namespace {

void require_same_shape(const ImagePlane& a, const ImagePlane& b) {
  if (a.empty() || !a.same_shape(b)) throw Error(ErrorCode::DimensionMismatch, "images differ in shape");
}

int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace

double charbonnier(const ImagePlane& pred, const ImagePlane& gt, double epsilon) {
  require_same_shape(pred, gt);
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
  const auto p = pred.samples();
  const auto g = gt.samples();
  const double eps2 = epsilon * epsilon;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - g[i];
    sum += std::sqrt(d * d + eps2);
  }
  return sum / static_cast<double>(p.size());
}

double fft_magnitude_loss(const ImagePlane& pred, const ImagePlane& gt) {
  require_same_shape(pred, gt);
  const int h = pred.height(), w = pred.width();
  double total = 0.0;
  for (int c = 0; c < pred.channels(); ++c) {
    const ImagePlane a = pred.channel(c);
    const ImagePlane b = gt.channel(c);
    const auto fa = fft::forward_full({a.samples().begin(), a.samples().end()}, h, w);
    const auto fb = fft::forward_full({b.samples().begin(), b.samples().end()}, h, w);
    double sum = 0.0;
    for (std::size_t i = 0; i < fa.size(); ++i) sum += std::abs(std::abs(fa[i]) - std::abs(fb[i]));
    total += sum / static_cast<double>(fa.size());
  }
  return total / pred.channels();
}

ImagePlane sobel_magnitude(const ImagePlane& img) {
  const int h = img.height(), w = img.width();
  ImagePlane out(h, w, img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      const int ym = reflect101(y - 1, h), yp = reflect101(y + 1, h);
      for (int x = 0; x < w; ++x) {
        const int xm = reflect101(x - 1, w), xp = reflect101(x + 1, w);
        const double gx = (img.at(ym, xp, c) + 2.0 * img.at(y, xp, c) + img.at(yp, xp, c)) -
                          (img.at(ym, xm, c) + 2.0 * img.at(y, xm, c) + img.at(yp, xm, c));
        const double gy = (img.at(yp, xm, c) + 2.0 * img.at(yp, x, c) + img.at(yp, xp, c)) -
                          (img.at(ym, xm, c) + 2.0 * img.at(ym, x, c) + img.at(ym, xp, c));
        out.at(y, x, c) = std::sqrt(gx * gx + gy * gy);
      }
    }
  }
  return out;
}

double edge_loss(const ImagePlane& pred, const ImagePlane& gt) {
  require_same_shape(pred, gt);
  const ImagePlane ep = sobel_magnitude(pred);
  const ImagePlane eg = sobel_magnitude(gt);
  const auto a = ep.samples();
  const auto b = eg.samples();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

double psnr(const ImagePlane& pred, const ImagePlane& gt) {
  require_same_shape(pred, gt);
  const auto p = pred.samples();
  const auto g = gt.samples();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += (p[i] - g[i]) * (p[i] - g[i]);
  const double mse = sum / static_cast<double>(p.size());
  if (mse < 1e-10) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
}

namespace {

// Valid-mode separable filter of a single-channel h x w array.
std::vector<double> filter_valid(const std::vector<double>& in, int h, int w, const std::vector<double>& g) {
  const int k = static_cast<int>(g.size());
  const int oh = h - k + 1, ow = w - k + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * static_cast<std::size_t>(ow));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += g[static_cast<std::size_t>(i)] * in[static_cast<std::size_t>(y * w + x + i)];
      rows[static_cast<std::size_t>(y * ow + x)] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * static_cast<std::size_t>(ow));
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += g[static_cast<std::size_t>(i)] * rows[static_cast<std::size_t>((y + i) * ow + x)];
      out[static_cast<std::size_t>(y * ow + x)] = acc;
    }
  }
  return out;
}

}  // namespace

double ssim(const ImagePlane& pred, const ImagePlane& gt) {
  require_same_shape(pred, gt);
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  constexpr double kSigma = 1.5;
  const int h = pred.height(), w = pred.width();
  const auto largest_odd = [](int n) { return n % 2 == 1 ? n : n - 1; };
  const int k = std::min({11, largest_odd(h), largest_odd(w)});

  std::vector<double> g(static_cast<std::size_t>(k));
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    const double d = i - k / 2;
    g[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    total += g[static_cast<std::size_t>(i)];
  }
  for (double& v : g) v /= total;

  const std::size_t n = pred.pixel_count();
  double acc = 0.0;
  for (int c = 0; c < pred.channels(); ++c) {
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = pred.samples()[i * static_cast<std::size_t>(pred.channels()) + static_cast<std::size_t>(c)];
      y[i] = gt.samples()[i * static_cast<std::size_t>(gt.channels()) + static_cast<std::size_t>(c)];
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, h, w, g);
    const auto my = filter_valid(y, h, w, g);
    const auto sxx = filter_valid(xx, h, w, g);
    const auto syy = filter_valid(yy, h, w, g);
    const auto sxy = filter_valid(xy, h, w, g);
    double sum = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i];
      const double vy = syy[i] - my[i] * my[i];
      const double cov = sxy[i] - mx[i] * my[i];
      sum += ((2.0 * mx[i] * my[i] + kC1) * (2.0 * cov + kC2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + kC1) * (vx + vy + kC2));
    }
    acc += sum / static_cast<double>(mx.size());
  }
  return std::clamp(acc / pred.channels(), -1.0, 1.0);
}

ScoreReport total_loss(const ImagePlane& pred, const ImagePlane& gt, const LossWeights& weights) {
  weights.validate();
  ScoreReport r;
  r.charbonnier = charbonnier(pred, gt, weights.epsilon);
  r.fft_loss = fft_magnitude_loss(pred, gt);
  r.edge_loss = edge_loss(pred, gt);
  r.total = weights.lambda1 * r.charbonnier + weights.lambda2 * r.fft_loss + weights.lambda3 * r.edge_loss;
  r.psnr_db = psnr(pred, gt);
  r.ssim = ssim(pred, gt);
  return r;
}

}  // namespace pseudorain

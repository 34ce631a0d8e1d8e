#pragma once

#include "pseudorain/image.hpp"

namespace pseudorain {

struct LossWeights {
  double lambda1 = 1.0;  // Charbonnier
  double lambda2 = 1.0;  // FFT magnitude
  double lambda3 = 1.0;  // edge
  double epsilon = 1e-3;

  void validate() const;
};

struct ScoreReport {
  double charbonnier = 0.0;
  double fft_loss = 0.0;
  double edge_loss = 0.0;
  double total = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

/// Mean of sqrt((pred - gt)^2 + eps^2) over every sample.
double charbonnier(const ImagePlane& pred, const ImagePlane& gt, double epsilon = 1e-3);

/// Mean absolute difference of 2-D DFT magnitudes, per channel over H*W
/// bins, averaged over channels.
double fft_magnitude_loss(const ImagePlane& pred, const ImagePlane& gt);

/// Per-channel 3x3 Sobel gradient magnitude (reflect-101 borders).
ImagePlane sobel_magnitude(const ImagePlane& img);

/// Mean absolute difference of Sobel gradient magnitudes.
double edge_loss(const ImagePlane& pred, const ImagePlane& gt);

constexpr double kPsnrCapDb = 99.0;

/// 10 log10(1 / MSE) for unit peak, capped at 99 dB.
double psnr(const ImagePlane& pred, const ImagePlane& gt);

/// Mean SSIM over channels with an 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, unit dynamic range, valid-region averaging. Images
/// narrower than 11 pixels use the largest odd window that fits.
double ssim(const ImagePlane& pred, const ImagePlane& gt);

ScoreReport total_loss(const ImagePlane& pred, const ImagePlane& gt, const LossWeights& weights = {});

}  // namespace pseudorain

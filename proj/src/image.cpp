#include "pseudorain/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pseudorain {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidImage: return "InvalidImage";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::NeedleLargerThanHaystack: return "NeedleLargerThanHaystack";
    case ErrorCode::FusionConditionFailed: return "FusionConditionFailed";
    case ErrorCode::EvenKernel: return "EvenKernel";
    case ErrorCode::EmptyInputDir: return "EmptyInputDir";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

ImagePlane::ImagePlane(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 1 || width < 1 || channels < 1) {
    throw Error(ErrorCode::InvalidImage, "image dimensions must be positive");
  }
  data_.assign(pixel_count() * static_cast<std::size_t>(channels), fill);
}

ImagePlane::ImagePlane(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  if (height < 1 || width < 1 || channels < 1) {
    throw Error(ErrorCode::InvalidImage, "image dimensions must be positive");
  }
  if (data_.size() != pixel_count() * static_cast<std::size_t>(channels)) {
    throw Error(ErrorCode::InvalidImage, "sample count does not match dimensions");
  }
}

void ImagePlane::clamp() noexcept {
  for (double& s : data_) s = std::clamp(s, 0.0, 1.0);
}

void ImagePlane::validate() const {
  for (double s : data_) {
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw Error(ErrorCode::InvalidImage, "sample outside [0,1] or not finite");
    }
  }
}

ImagePlane ImagePlane::crop(int top, int left, int h, int w) const {
  if (top < 0 || left < 0 || h < 1 || w < 1 || top + h > height_ || left + w > width_) {
    throw Error(ErrorCode::DimensionMismatch, "crop window outside image");
  }
  ImagePlane out(h, w, channels_);
  const auto row = static_cast<std::size_t>(w) * static_cast<std::size_t>(channels_);
  for (int y = 0; y < h; ++y) {
    const auto src = data_.begin() + static_cast<std::ptrdiff_t>(index(top + y, left));
    std::copy(src, src + static_cast<std::ptrdiff_t>(row),
              out.data_.begin() + static_cast<std::ptrdiff_t>(out.index(y, 0)));
  }
  return out;
}

ImagePlane ImagePlane::channel(int c) const {
  if (c < 0 || c >= channels_) throw Error(ErrorCode::ChannelMismatch, "no such channel");
  ImagePlane out(height_, width_, 1);
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    out.data_[i] = data_[i * static_cast<std::size_t>(channels_) + static_cast<std::size_t>(c)];
  }
  return out;
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

namespace {

int nearest_source(int i, int dst, int src) {
  // Sample at pixel centres.
  const int s = static_cast<int>(std::floor((i + 0.5) * src / static_cast<double>(dst)));
  return std::clamp(s, 0, src - 1);
}

}  // namespace

ImagePlane resize_nearest(const ImagePlane& img, int h, int w) {
  ImagePlane out(h, w, img.channels());
  for (int y = 0; y < h; ++y) {
    const int sy = nearest_source(y, h, img.height());
    for (int x = 0; x < w; ++x) {
      const int sx = nearest_source(x, w, img.width());
      for (int c = 0; c < img.channels(); ++c) out.at(y, x, c) = img.at(sy, sx, c);
    }
  }
  return out;
}

BinaryMask resize_nearest(const BinaryMask& mask, int h, int w) {
  BinaryMask out(h, w);
  for (int y = 0; y < h; ++y) {
    const int sy = nearest_source(y, h, mask.height);
    for (int x = 0; x < w; ++x) out.at(y, x) = mask.at(sy, nearest_source(x, w, mask.width));
  }
  return out;
}

}  // namespace pseudorain

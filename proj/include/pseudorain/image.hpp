#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pseudorain {

enum class ErrorCode {
  FileNotFound,
  UnsupportedFormat,
  DecodeError,
  IoError,
  InvalidImage,
  InvalidArgument,
  ChannelMismatch,
  DimensionMismatch,
  ImageTooSmall,
  NeedleLargerThanHaystack,
  FusionConditionFailed,
  EvenKernel,
  EmptyInputDir,
  ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Row-major floating-point image with interleaved channels.
///
/// Samples are expected to lie in [0,1]; operations that can leave that
/// range clamp before returning. The constructor does not validate sample
/// values, use validate() at trust boundaries.
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(int height, int width, int channels, double fill = 0.0);
  ImagePlane(int height, int width, int channels, std::vector<double> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& at(int y, int x, int c = 0) noexcept { return data_[index(y, x, c)]; }
  double at(int y, int x, int c = 0) const noexcept { return data_[index(y, x, c)]; }

  std::span<double> samples() noexcept { return data_; }
  std::span<const double> samples() const noexcept { return data_; }

  std::size_t index(int y, int x, int c = 0) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  bool same_shape(const ImagePlane& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }

  void clamp() noexcept;

  /// Throws InvalidImage if any sample is non-finite or outside [0,1].
  void validate() const;

  /// Copy of the window [top, top+h) x [left, left+w).
  ImagePlane crop(int top, int left, int h, int w) const;

  /// Single channel `c` as a 1-channel plane.
  ImagePlane channel(int c) const;

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Binary map, one byte per pixel (0 or 1).
struct BinaryMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w), bits(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), fill) {}

  std::uint8_t& at(int y, int x) noexcept {
    return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)];
  }
  std::uint8_t at(int y, int x) const noexcept {
    return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)];
  }
  std::size_t count() const noexcept;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// Nearest-neighbour resample to (h, w).
ImagePlane resize_nearest(const ImagePlane& img, int h, int w);
BinaryMask resize_nearest(const BinaryMask& mask, int h, int w);

}  // namespace pseudorain

#include "pseudorain/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace pseudorain {
namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

bool is_supported_image(const fs::path& path) {
  const auto ext = lower_extension(path);
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

ImagePlane load_image(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, path.string());
  }
  if (!is_supported_image(path)) {
    throw Error(ErrorCode::UnsupportedFormat, path.string());
  }
  cv::Mat bgr;
  try {
    bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::DecodeError, path.string() + ": " + e.what());
  }
  if (bgr.empty() || bgr.depth() != CV_8U || bgr.channels() != 3) {
    throw Error(ErrorCode::DecodeError, path.string());
  }

  ImagePlane img(bgr.rows, bgr.cols, 3);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      img.at(y, x, 0) = row[x][2] / 255.0;
      img.at(y, x, 1) = row[x][1] / 255.0;
      img.at(y, x, 2) = row[x][0] / 255.0;
    }
  }
  return img;
}

void save_image(const ImagePlane& img, const fs::path& path) {
  if (img.empty()) throw Error(ErrorCode::InvalidImage, "empty image");
  img.validate();
  if (img.channels() != 1 && img.channels() != 3) {
    throw Error(ErrorCode::ChannelMismatch, "only 1- or 3-channel images can be saved");
  }
  if (lower_extension(path) != ".png") {
    throw Error(ErrorCode::UnsupportedFormat, "output must be .png: " + path.string());
  }

  const auto quantize = [](double s) {
    return static_cast<std::uint8_t>(std::lround(s * 255.0));
  };
  cv::Mat mat(img.height(), img.width(), img.channels() == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      if (img.channels() == 1) {
        row[x] = quantize(img.at(y, x));
      } else {
        row[3 * x + 0] = quantize(img.at(y, x, 2));
        row[3 * x + 1] = quantize(img.at(y, x, 1));
        row[3 * x + 2] = quantize(img.at(y, x, 0));
      }
    }
  }

  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::IoError, path.string() + ": " + e.what());
  }
  if (!ok) throw Error(ErrorCode::IoError, "could not write " + path.string());
}

}  // namespace pseudorain

#pragma once

#include <filesystem>

#include "pseudorain/image.hpp"

namespace pseudorain {

/// Reads an 8-bit PNG or JPEG as a 3-channel plane scaled by 1/255.
/// Grayscale files are replicated across the three channels.
ImagePlane load_image(const std::filesystem::path& path);

/// Writes an 8-bit PNG (grayscale for 1-channel planes, RGB for 3-channel).
/// Rejects planes holding non-finite or out-of-range samples.
void save_image(const ImagePlane& img, const std::filesystem::path& path);

bool is_supported_image(const std::filesystem::path& path);

}  // namespace pseudorain

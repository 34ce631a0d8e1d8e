#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "pseudorain/fusion.hpp"
#include "pseudorain/metrics.hpp"
#include "pseudorain/rain.hpp"
#include "pseudorain/superpixel.hpp"

namespace pseudorain {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct PipelineConfig {
  std::filesystem::path source_dir;
  std::filesystem::path target_dir;
  std::filesystem::path out_dir;
  Seed seed = 0;
  SlicParams slic;
  FusionParams fusion;
  RainParams rain;
  LossWeights loss;
  int patches_per_target = 3;
  int workers = 1;
  bool emit_debug = false;

  /// Parameter and directory checks; throws ConfigError.
  void validate() const;
};

struct PatchStep {
  int source_label = 0;
  FusionRecord record;
};

/// Everything random that went into one sample.
struct DrawnParams {
  Seed sample_seed = 0;
  double alpha = 0.0;
  double mask_keep_frac = 0.0;
  std::vector<PatchStep> patches;
  DrawnRain rain;
};

struct PairedSample {
  std::size_t index = 0;
  std::string id;
  bool ok = false;
  std::string error;
  std::filesystem::path rainy_path;  // relative to the output directory
  std::filesystem::path clean_path;
  std::filesystem::path source_image;
  std::filesystem::path target_image;
  DrawnParams drawn;
  ScoreReport scores;
};

/// In-memory products of one sample.
struct SampleImages {
  ImagePlane clean;
  ImagePlane rainy;
  SuperpixelLabeling labeling;
  StreakMask streaks;
};

/// Sorted PNG/JPEG files directly inside `dir`.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

/// Seed for sample `index` under the global seed.
Seed sample_seed(Seed global_seed, std::size_t index);

/// Index into the source list for each of `target_count` targets:
/// a seeded permutation of the sources, visited round-robin.
std::vector<std::size_t> assign_sources(std::size_t source_count, std::size_t target_count, Seed global_seed);

/// Segments the source, fuses patches into the target and renders rain.
/// Fills `drawn` with the parameters used. Pure given its arguments.
SampleImages generate_sample(const PipelineConfig& config, const ImagePlane& source,
                             const ImagePlane& target, Seed seed, DrawnParams& drawn);

/// Full batch: writes rainy/, clean/, optional debug/ and manifest.jsonl
/// under config.out_dir. Per-sample failures are recorded, not thrown.
std::vector<PairedSample> run_pipeline(const PipelineConfig& config);

}  // namespace pseudorain

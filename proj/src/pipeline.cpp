#include "pseudorain/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "pseudorain/image_io.hpp"
#include "pseudorain/manifest.hpp"

namespace pseudorain {
namespace fs = std::filesystem;

namespace {

// Stream indices under a sample seed.
constexpr std::uint64_t kPatchPickStream = 0;
constexpr std::uint64_t kRainStream = 1;
constexpr std::uint64_t kFusionStreamBase = 1000;
// Stream index under the global seed for the source permutation.
constexpr std::uint64_t kSourceOrderStream = 0xFFFF'FFFF'FFFF'FFFFULL;

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

void log_line(const std::string& msg) {
  std::lock_guard lock(log_mutex());
  std::cerr << "[pseudorain] " << msg << '\n';
}

}  // namespace

void PipelineConfig::validate() const {
  try {
    slic.validate();
    fusion.validate();
    rain.validate();
    loss.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  if (patches_per_target < 0) throw Error(ErrorCode::ConfigError, "patches_per_target must be >= 0");
  if (workers < 1) throw Error(ErrorCode::ConfigError, "workers must be >= 1");
  std::error_code ec;
  if (!fs::is_directory(source_dir, ec)) throw Error(ErrorCode::ConfigError, "no such source directory: " + source_dir.string());
  if (!fs::is_directory(target_dir, ec)) throw Error(ErrorCode::ConfigError, "no such target directory: " + target_dir.string());
  if (out_dir.empty()) throw Error(ErrorCode::ConfigError, "output directory not set");
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_supported_image(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

Seed sample_seed(Seed global_seed, std::size_t index) { return derive_seed(global_seed, index); }

std::vector<std::size_t> assign_sources(std::size_t source_count, std::size_t target_count, Seed global_seed) {
  std::vector<std::size_t> order(source_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(global_seed, kSourceOrderStream));
  for (std::size_t i = source_count; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)));
    std::swap(order[i - 1], order[j]);
  }
  std::vector<std::size_t> out(target_count);
  for (std::size_t t = 0; t < target_count; ++t) out[t] = order[t % source_count];
  return out;
}

SampleImages generate_sample(const PipelineConfig& config, const ImagePlane& source,
                             const ImagePlane& target, Seed seed, DrawnParams& drawn) {
  drawn = {};
  drawn.sample_seed = seed;
  drawn.alpha = config.fusion.alpha;
  drawn.mask_keep_frac = config.fusion.mask_keep_frac;

  SampleImages images;
  images.clean = target;
  if (config.patches_per_target > 0) {
    images.labeling = slic_segment(source, config.slic, seed);
    const auto patches = extract_patches(source, images.labeling);

    // Partial Fisher-Yates pick of distinct patches.
    std::vector<std::size_t> order(patches.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng pick(derive_seed(seed, kPatchPickStream));
    const std::size_t count = std::min(order.size(), static_cast<std::size_t>(config.patches_per_target));
    for (std::size_t i = 0; i < count; ++i) {
      const auto j = static_cast<std::size_t>(
          pick.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(order.size() - 1)));
      std::swap(order[i], order[j]);
    }

    for (std::size_t i = 0; i < count; ++i) {
      const SuperpixelPatch& patch = patches[order[i]];
      PatchStep step;
      step.source_label = patch.source_label;
      images.clean = fuse_patch(images.clean, patch, config.fusion, derive_seed(seed, kFusionStreamBase + i),
                                &step.record);
      drawn.patches.push_back(step);
    }
  }

  RainResult rain = synthesize_rain(images.clean, config.rain, derive_seed(seed, kRainStream));
  images.rainy = std::move(rain.rainy);
  images.streaks = std::move(rain.mask);
  drawn.rain = rain.drawn;
  return images;
}

namespace {

std::vector<std::string> make_ids(const std::vector<fs::path>& targets) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    std::string id = targets[i].stem().string();
    if (!seen.insert(id).second) {
      id += "_" + std::to_string(i);
      seen.insert(id);
    }
    ids.push_back(std::move(id));
  }
  return ids;
}

PairedSample process_one(const PipelineConfig& config, std::size_t index, const std::string& id,
                         const fs::path& source_path, const fs::path& target_path) {
  PairedSample sample;
  sample.index = index;
  sample.id = id;
  sample.source_image = source_path;
  sample.target_image = target_path;
  sample.drawn.sample_seed = sample_seed(config.seed, index);
  try {
    const ImagePlane source = load_image(source_path);
    const ImagePlane target = load_image(target_path);
    SampleImages images = generate_sample(config, source, target, sample.drawn.sample_seed, sample.drawn);

    sample.rainy_path = fs::path("rainy") / (id + ".png");
    sample.clean_path = fs::path("clean") / (id + ".png");
    save_image(images.rainy, config.out_dir / sample.rainy_path);
    save_image(images.clean, config.out_dir / sample.clean_path);
    if (config.emit_debug) {
      if (!images.labeling.labels.empty()) {
        save_image(render_labels(images.labeling), config.out_dir / "debug" / (id + "_labels.png"));
      }
      save_image(images.streaks.plane, config.out_dir / "debug" / (id + "_mask.png"));
    }
    sample.scores = total_loss(images.rainy, images.clean, config.loss);
    sample.ok = true;
  } catch (const std::exception& e) {
    sample.ok = false;
    sample.error = e.what();
    sample.rainy_path.clear();
    sample.clean_path.clear();
    log_line("sample " + id + " failed: " + e.what());
  }
  return sample;
}

}  // namespace

std::vector<PairedSample> run_pipeline(const PipelineConfig& config) {
  config.validate();
  const auto sources = list_images(config.source_dir);
  const auto targets = list_images(config.target_dir);
  if (sources.empty()) throw Error(ErrorCode::EmptyInputDir, "no images in " + config.source_dir.string());
  if (targets.empty()) throw Error(ErrorCode::EmptyInputDir, "no images in " + config.target_dir.string());

  fs::create_directories(config.out_dir / "rainy");
  fs::create_directories(config.out_dir / "clean");
  if (config.emit_debug) fs::create_directories(config.out_dir / "debug");

  const auto ids = make_ids(targets);
  const auto source_of = assign_sources(sources.size(), targets.size(), config.seed);
  std::vector<PairedSample> samples(targets.size());

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < targets.size(); i = next.fetch_add(1)) {
      samples[i] = process_one(config, i, ids[i], sources[source_of[i]], targets[i]);
    }
  };
  const auto thread_count = std::min<std::size_t>(static_cast<std::size_t>(config.workers), targets.size());
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(thread_count);
    for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  }

  write_manifest(samples, config, config.out_dir / "manifest.jsonl");
  return samples;
}

}  // namespace pseudorain

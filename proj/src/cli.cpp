#include "pseudorain/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "pseudorain/image_io.hpp"
#include "pseudorain/manifest.hpp"
#include "pseudorain/pipeline.hpp"

namespace pseudorain {
namespace fs = std::filesystem;

namespace {

void add_loss_options(CLI::App& cmd, LossWeights& loss) {
  cmd.add_option("--lambda1", loss.lambda1, "Charbonnier weight")->capture_default_str();
  cmd.add_option("--lambda2", loss.lambda2, "FFT magnitude weight")->capture_default_str();
  cmd.add_option("--lambda3", loss.lambda3, "Edge weight")->capture_default_str();
  cmd.add_option("--epsilon", loss.epsilon, "Charbonnier epsilon")->capture_default_str();
}

void add_range(CLI::App& cmd, const std::string& name, Range& range, const std::string& what) {
  cmd.add_option("--" + name + "-min", range.min, what + " (lower bound)")->capture_default_str();
  cmd.add_option("--" + name + "-max", range.max, what + " (upper bound)")->capture_default_str();
}

int run_synth(PipelineConfig& config) {
  std::vector<PairedSample> samples;
  try {
    samples = run_pipeline(config);
  } catch (const Error& e) {
    std::cerr << "pseudorain synth: " << e.what() << '\n';
    return kExitFatal;
  }
  std::size_t failed = 0;
  for (const auto& s : samples) failed += s.ok ? 0 : 1;
  std::cout << "wrote " << samples.size() - failed << " pairs to " << config.out_dir.string();
  if (failed > 0) std::cout << " (" << failed << " failed)";
  std::cout << '\n';
  return failed > 0 ? kExitSampleFailures : kExitOk;
}

int run_score(const fs::path& pred_dir, const fs::path& gt_dir, const fs::path& out_path,
              const LossWeights& weights) {
  try {
    weights.validate();
  } catch (const Error& e) {
    std::cerr << "pseudorain score: " << e.what() << '\n';
    return kExitFatal;
  }
  std::error_code ec;
  if (!fs::is_directory(pred_dir, ec) || !fs::is_directory(gt_dir, ec)) {
    std::cerr << "pseudorain score: prediction and ground-truth directories must exist\n";
    return kExitFatal;
  }
  std::map<std::string, fs::path> gt_by_name;
  for (const auto& p : list_images(gt_dir)) gt_by_name[p.filename().string()] = p;
  const auto preds = list_images(pred_dir);
  if (preds.empty()) {
    std::cerr << "pseudorain score: no images in " << pred_dir.string() << '\n';
    return kExitFatal;
  }

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "pseudorain score: cannot open " << out_path.string() << '\n';
    return kExitFatal;
  }
  out << nlohmann::json{{"type", "header"},
                        {"toolkit", "pseudorain"},
                        {"version", kToolkitVersion},
                        {"weights",
                         {{"lambda1", weights.lambda1},
                          {"lambda2", weights.lambda2},
                          {"lambda3", weights.lambda3},
                          {"epsilon", weights.epsilon}}}}
             .dump()
      << '\n';

  std::size_t failed = 0;
  for (const auto& pred_path : preds) {
    const std::string name = pred_path.filename().string();
    nlohmann::json line{{"type", "score"}, {"name", name}};
    try {
      const auto it = gt_by_name.find(name);
      if (it == gt_by_name.end()) throw Error(ErrorCode::FileNotFound, "no ground truth for " + name);
      line["scores"] = to_json(total_loss(load_image(pred_path), load_image(it->second), weights));
      line["status"] = "ok";
    } catch (const std::exception& e) {
      line["status"] = "failed";
      line["error"] = e.what();
      ++failed;
      std::cerr << "pseudorain score: " << name << ": " << e.what() << '\n';
    }
    out << line.dump() << '\n';
  }
  return failed > 0 ? kExitSampleFailures : kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Pseudo-paired rain/clean sample synthesis"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file ([synth] section or synth.key=value lines); flags take precedence");

  PipelineConfig config;
  std::string source_dir, target_dir, out_dir;
  auto* synth = app.add_subcommand("synth", "Synthesize pseudo-paired rainy/clean images");
  synth->add_option("--source-dir", source_dir, "Source-domain clean images")->required();
  synth->add_option("--target-dir", target_dir, "Target-domain clean images")->required();
  synth->add_option("--out", out_dir, "Output directory")->required();
  synth->add_option("--seed", config.seed, "Global seed")->capture_default_str();
  synth->add_option("--alpha", config.fusion.alpha, "Fusion weight kept by the target")->capture_default_str();
  synth->add_option("--superpixels", config.slic.k, "SLIC superpixel count")->capture_default_str();
  synth->add_option("--patches-per-target", config.patches_per_target, "Patches fused per target")
      ->capture_default_str();
  synth->add_option("--workers", config.workers, "Worker threads")->capture_default_str();
  synth->add_flag("--emit-debug", config.emit_debug, "Write label maps and streak masks to out/debug");
  synth->add_option("--compactness", config.slic.m, "SLIC compactness")->capture_default_str();
  synth->add_option("--slic-iters", config.slic.max_iters, "SLIC iteration cap")->capture_default_str();
  synth->add_option("--min-region-frac", config.slic.min_region_frac, "SLIC fragment merge threshold")
      ->capture_default_str();
  synth->add_option("--keep-frac", config.fusion.mask_keep_frac, "Random mask keep probability")
      ->capture_default_str();
  synth->add_option("--min-patch-frac", config.fusion.min_patch_frac, "Patch/target area ratio for direct fusion")
      ->capture_default_str();
  synth->add_option("--stride", config.fusion.stride, "Sliding-window stride")->capture_default_str();
  add_range(*synth, "rain-p", config.rain.p, "Salt density");
  synth->add_option("--gauss-k", config.rain.gauss_k, "Gaussian kernel size (odd)")->capture_default_str();
  synth->add_option("--sigma-g", config.rain.sigma_g, "Gaussian sigma")->capture_default_str();
  add_range(*synth, "streak-length", config.rain.length, "Streak length in pixels");
  add_range(*synth, "streak-angle", config.rain.theta, "Streak angle in degrees");
  add_range(*synth, "streak-width", config.rain.width, "Streak width in pixels");
  add_range(*synth, "beta", config.rain.beta, "Luminance fusion coefficient");
  add_loss_options(*synth, config.loss);

  std::string pred_dir, gt_dir, score_out;
  LossWeights score_weights;
  auto* score = app.add_subcommand("score", "Score predictions against ground truth");
  score->add_option("--pred-dir", pred_dir, "Predicted images")->required();
  score->add_option("--gt-dir", gt_dir, "Ground-truth images (matched by file name)")->required();
  score->add_option("--out", score_out, "Output JSON-lines file")->required();
  add_loss_options(*score, score_weights);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitFatal;
  }

  if (synth->parsed()) {
    config.source_dir = source_dir;
    config.target_dir = target_dir;
    config.out_dir = out_dir;
    return run_synth(config);
  }
  return run_score(pred_dir, gt_dir, score_out, score_weights);
}

}  // namespace pseudorain

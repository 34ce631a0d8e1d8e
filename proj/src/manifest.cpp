#include "pseudorain/manifest.hpp"

#include <fstream>
#include <string>

namespace pseudorain {

using nlohmann::json;

json to_json(const ScoreReport& s) {
  return json{{"charbonnier", s.charbonnier}, {"fft_loss", s.fft_loss}, {"edge_loss", s.edge_loss},
              {"total", s.total},             {"psnr_db", s.psnr_db},   {"ssim", s.ssim}};
}

ScoreReport scores_from_json(const json& j) {
  ScoreReport s;
  s.charbonnier = j.at("charbonnier").get<double>();
  s.fft_loss = j.at("fft_loss").get<double>();
  s.edge_loss = j.at("edge_loss").get<double>();
  s.total = j.at("total").get<double>();
  s.psnr_db = j.at("psnr_db").get<double>();
  s.ssim = j.at("ssim").get<double>();
  return s;
}

json to_json(const DrawnParams& d) {
  json patches = json::array();
  for (const auto& step : d.patches) {
    const auto& r = step.record;
    patches.push_back({{"source_label", step.source_label},
                       {"fallback", r.fallback},
                       {"y", r.match.y},
                       {"x", r.match.x},
                       {"mse", r.match.mse},
                       {"window_height", r.window_height},
                       {"window_width", r.window_width},
                       {"mask_seed", r.mask_seed}});
  }
  return json{{"sample_seed", d.sample_seed},
              {"alpha", d.alpha},
              {"mask_keep_frac", d.mask_keep_frac},
              {"patches", std::move(patches)},
              {"rain",
               {{"p", d.rain.p},
                {"length", d.rain.length},
                {"theta", d.rain.theta},
                {"width", d.rain.width},
                {"beta", d.rain.beta},
                {"seed", d.rain.seed},
                {"salt_seed", d.rain.salt_seed}}}};
}

DrawnParams drawn_from_json(const json& j) {
  DrawnParams d;
  d.sample_seed = j.at("sample_seed").get<Seed>();
  d.alpha = j.at("alpha").get<double>();
  d.mask_keep_frac = j.at("mask_keep_frac").get<double>();
  for (const auto& p : j.at("patches")) {
    PatchStep step;
    step.source_label = p.at("source_label").get<int>();
    step.record.fallback = p.at("fallback").get<bool>();
    step.record.match = {p.at("y").get<int>(), p.at("x").get<int>(), p.at("mse").get<double>()};
    step.record.window_height = p.at("window_height").get<int>();
    step.record.window_width = p.at("window_width").get<int>();
    step.record.mask_seed = p.at("mask_seed").get<Seed>();
    d.patches.push_back(step);
  }
  const auto& r = j.at("rain");
  d.rain.p = r.at("p").get<double>();
  d.rain.length = r.at("length").get<int>();
  d.rain.theta = r.at("theta").get<double>();
  d.rain.width = r.at("width").get<int>();
  d.rain.beta = r.at("beta").get<double>();
  d.rain.seed = r.at("seed").get<Seed>();
  d.rain.salt_seed = r.at("salt_seed").get<Seed>();
  return d;
}

json to_json(const PairedSample& s) {
  json j{{"type", "sample"},
         {"index", s.index},
         {"id", s.id},
         {"status", s.ok ? "ok" : "failed"},
         {"source_image", s.source_image.generic_string()},
         {"target_image", s.target_image.generic_string()}};
  if (s.ok) {
    j["rainy_path"] = s.rainy_path.generic_string();
    j["clean_path"] = s.clean_path.generic_string();
    j["drawn_params"] = to_json(s.drawn);
    j["scores"] = to_json(s.scores);
  } else {
    j["error"] = s.error;
    j["drawn_params"] = {{"sample_seed", s.drawn.sample_seed}};
  }
  return j;
}

PairedSample sample_from_json(const json& j) {
  PairedSample s;
  s.index = j.at("index").get<std::size_t>();
  s.id = j.at("id").get<std::string>();
  s.ok = j.at("status").get<std::string>() == "ok";
  s.source_image = j.at("source_image").get<std::string>();
  s.target_image = j.at("target_image").get<std::string>();
  if (s.ok) {
    s.rainy_path = j.at("rainy_path").get<std::string>();
    s.clean_path = j.at("clean_path").get<std::string>();
    s.drawn = drawn_from_json(j.at("drawn_params"));
    s.scores = scores_from_json(j.at("scores"));
  } else {
    s.error = j.value("error", "");
    s.drawn.sample_seed = j.at("drawn_params").at("sample_seed").get<Seed>();
  }
  return s;
}

json config_to_json(const PipelineConfig& c) {
  const auto range = [](const Range& r) { return json::array({r.min, r.max}); };
  return json{{"source_dir", c.source_dir.generic_string()},
              {"target_dir", c.target_dir.generic_string()},
              {"seed", c.seed},
              {"patches_per_target", c.patches_per_target},
              {"emit_debug", c.emit_debug},
              {"slic",
               {{"k", c.slic.k},
                {"m", c.slic.m},
                {"max_iters", c.slic.max_iters},
                {"min_region_frac", c.slic.min_region_frac}}},
              {"fusion",
               {{"alpha", c.fusion.alpha},
                {"mask_keep_frac", c.fusion.mask_keep_frac},
                {"min_patch_frac", c.fusion.min_patch_frac},
                {"stride", c.fusion.stride}}},
              {"rain",
               {{"p", range(c.rain.p)},
                {"gauss_k", c.rain.gauss_k},
                {"sigma_g", c.rain.sigma_g},
                {"length", range(c.rain.length)},
                {"theta", range(c.rain.theta)},
                {"width", range(c.rain.width)},
                {"beta", range(c.rain.beta)}}},
              {"loss",
               {{"lambda1", c.loss.lambda1},
                {"lambda2", c.loss.lambda2},
                {"lambda3", c.loss.lambda3},
                {"epsilon", c.loss.epsilon}}}};
}

void write_manifest(const std::vector<PairedSample>& samples, const PipelineConfig& config,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const json header{{"type", "header"},
                    {"toolkit", "pseudorain"},
                    {"version", kToolkitVersion},
                    {"config", config_to_json(config)}};
  out << header.dump() << '\n';
  for (const auto& s : samples) out << to_json(s).dump() << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  Manifest m;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::DecodeError, std::string("bad manifest line: ") + e.what());
    }
    if (first) {
      if (j.value("type", "") != "header") throw Error(ErrorCode::DecodeError, "manifest lacks a header line");
      m.header = std::move(j);
      first = false;
    } else {
      m.samples.push_back(sample_from_json(j));
    }
  }
  if (first) throw Error(ErrorCode::DecodeError, "empty manifest");
  return m;
}

}  // namespace pseudorain

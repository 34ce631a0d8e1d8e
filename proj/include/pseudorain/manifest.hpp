#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "pseudorain/pipeline.hpp"

namespace pseudorain {

// JSON views of the pipeline records. Objects use sorted keys.
nlohmann::json to_json(const ScoreReport& scores);
nlohmann::json to_json(const DrawnParams& drawn);
nlohmann::json to_json(const PairedSample& sample);
ScoreReport scores_from_json(const nlohmann::json& j);
DrawnParams drawn_from_json(const nlohmann::json& j);
PairedSample sample_from_json(const nlohmann::json& j);

/// Resolved configuration as written to the manifest header. Output
/// directory and worker count are left out since they do not affect results.
nlohmann::json config_to_json(const PipelineConfig& config);

/// JSON-lines manifest: a header line, then one line per sample in index order.
void write_manifest(const std::vector<PairedSample>& samples, const PipelineConfig& config,
                    const std::filesystem::path& path);

struct Manifest {
  nlohmann::json header;
  std::vector<PairedSample> samples;
};

Manifest read_manifest(const std::filesystem::path& path);

}  // namespace pseudorain

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dipoleforge/augment.hpp"
#include "dipoleforge/classify.hpp"
#include "dipoleforge/harness.hpp"
#include "dipoleforge/headmodel.hpp"
#include "dipoleforge/kernels.hpp"
#include "dipoleforge/recording.hpp"
#include "dipoleforge/ssd.hpp"
#include "dipoleforge/synthscene.hpp"

namespace dipoleforge::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Recording directory: meta.json plus data.f32 (little-endian float32,
/// channels x samples, row-major).
void write_recording(const fs::path& dir, const MultichannelRecording& rec);
MultichannelRecording read_recording(const fs::path& dir);

/// headmodel.json plus leadfield.f64 (little-endian float64,
/// voxels x channels x 3, row-major) in `dir`.
void write_head_model(const fs::path& dir, const headmodel::HeadModel& model,
                      const kernels::LeadfieldTable& table);

struct LoadedHeadModel {
  headmodel::HeadModel model;
  std::optional<kernels::LeadfieldTable> leadfields;  // absent when the cache file is missing
};
/// `path` is headmodel.json or the directory holding it.
LoadedHeadModel read_head_model(const fs::path& path);

json to_json(const headmodel::HeadModelConfig& cfg);
headmodel::HeadModelConfig head_model_config_from_json(const json& j,
                                                      headmodel::HeadModelConfig base = {});

void write_ssd(const fs::path& path, const ssd::SsdResult& result, const ssd::SsdBands& bands,
               const std::vector<std::string>& channel_labels);

json to_json(const dipolefit::DipoleFit& fit, const headmodel::HeadModel& model);
void write_augmentation_report(const fs::path& path, const augment::AugmentationReport& report,
                               const headmodel::HeadModel& model);

void write_lda(const fs::path& path, const classify::LdaModel& model);
classify::LdaModel read_lda(const fs::path& path);

json to_json(const harness::EvalResult& result);
harness::EvalResult eval_result_from_json(const json& j);
void write_results(const fs::path& dir, const harness::EvalResult& result);
/// Sorted per-participant table and mean +/- SEM per arm.
std::string format_report(const harness::EvalResult& result);

json to_json(const synthscene::GroundTruth& truth);
void write_ground_truth(const fs::path& path, const std::vector<synthscene::GroundTruth>& truths);

/// All module settings. Config files are JSON objects with optional
/// sections "headmodel", "scene", "ssd", "augment", "eval"; missing keys keep
/// their defaults.
struct Config {
  headmodel::HeadModelConfig headmodel;
  synthscene::SceneConfig scene;
  ssd::SsdBands bands;
  augment::AugmentationConfig augmentation;
  harness::EvalConfig eval;
};
Config config_from_json(const json& j);
Config read_config(const fs::path& path);

json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& j);
void write_text(const fs::path& path, const std::string& text);

}  // namespace dipoleforge::io

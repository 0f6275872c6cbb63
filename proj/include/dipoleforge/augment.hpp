#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dipoleforge/dipolefit.hpp"
#include "dipoleforge/headmodel.hpp"
#include "dipoleforge/recording.hpp"
#include "dipoleforge/ssd.hpp"

namespace dipoleforge::augment {

enum class SelectionMode { All, StrongestK, QualityGated };

struct ComponentSelection {
  SelectionMode mode = SelectionMode::All;
  std::size_t k = 0;                                        // StrongestK
  double threshold = dipolefit::kDefaultQualityThreshold;  // QualityGated
};

struct AugmentationConfig {
  std::size_t n_variants = 5;  // N, including the original
  double min_shift = 0.015;    // meters
  ComponentSelection components;
  std::uint64_t seed = 0;
  double max_rotation_deg = 0.0;  // 0 keeps the fitted orientation

  void validate() const;
};

struct Reconstruction {
  MultichannelRecording recording;
  bool lossy = false;
  double residual_norm = 0.0;  // ||X - A S||_F, with X the original
};

/// A * sources, headed like `original`. A non-square decomposition is
/// flagged lossy and its residual against `original` is reported.
Reconstruction regenerate(const Decomposition& dec, const SourceActivity& sources,
                          const MultichannelRecording& original);

/// Field of the fitted moment at `target_voxel`, rescaled to the norm of the
/// original pattern column and signed to correlate positively with it.
Eigen::VectorXd augment_component(const Decomposition& dec, std::size_t component_index,
                                  const dipolefit::DipoleFit& fit, std::size_t target_voxel,
                                  const headmodel::HeadModel& model);
Eigen::VectorXd augment_component(const Decomposition& dec, std::size_t component_index,
                                  const dipolefit::DipoleFit& fit, std::size_t target_voxel,
                                  const dipolefit::MusicScanner& scanner);

/// Unit moment rotated about a uniformly random axis by an angle drawn
/// uniformly from [0, max_deg].
Eigen::Vector3d rotate_moment(const Eigen::Vector3d& moment, double max_deg, std::uint64_t seed);

struct ComponentReport {
  std::size_t index = 0;
  double score = 0.0;  // SSD eigenvalue
  bool selected = false;
  dipolefit::DipoleFit fit;
  std::vector<std::size_t> targets;  // one per generated variant
  double pattern_norm = 0.0;
};

struct AugmentationReport {
  AugmentationConfig config;
  ssd::SsdBands bands;
  std::size_t channels = 0;
  std::size_t effective_rank = 0;
  bool lossy = false;
  double residual_norm = 0.0;
  std::vector<ComponentReport> components;
};

struct ParticipantAugmentation {
  std::vector<MultichannelRecording> variants;  // N - 1 recordings
  AugmentationReport report;
};

ParticipantAugmentation generate_participant(const MultichannelRecording& rec,
                                             const dipolefit::MusicScanner& scanner,
                                             const AugmentationConfig& cfg,
                                             const ssd::SsdBands& bands = {});
ParticipantAugmentation generate_participant(const MultichannelRecording& rec,
                                             const headmodel::HeadModel& model,
                                             const AugmentationConfig& cfg,
                                             const ssd::SsdBands& bands = {});

}  // namespace dipoleforge::augment

#include "dipoleforge/augment.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "dipoleforge/error.hpp"
#include "dipoleforge/linmodel.hpp"
#include "dipoleforge/rng.hpp"

namespace dipoleforge::augment {

void AugmentationConfig::validate() const {
  if (n_variants < 1) misconfigured("n_variants must be >= 1");
  if (!(min_shift >= 0.0)) misconfigured("min_shift must be >= 0");
  if (!(max_rotation_deg >= 0.0 && max_rotation_deg <= 180.0))
    misconfigured("max_rotation_deg must lie in [0, 180]");
  if (components.mode == SelectionMode::StrongestK && components.k == 0)
    misconfigured("strongest-k selection needs k >= 1");
  if (components.mode == SelectionMode::QualityGated &&
      !(components.threshold >= 0.0 && components.threshold <= 1.0))
    misconfigured("quality threshold must lie in [0, 1]");
}

Reconstruction regenerate(const Decomposition& dec, const SourceActivity& sources,
                          const MultichannelRecording& original) {
  if (dec.patterns.cols() != sources.data.rows())
    reject("decomposition has " + std::to_string(dec.patterns.cols()) + " components, sources " +
           std::to_string(sources.data.rows()));
  if (dec.patterns.rows() != original.channels() || sources.data.cols() != original.samples())
    reject("decomposition and sources do not match the recording shape");
  Reconstruction out;
  out.recording = linmodel::apply_forward(dec.patterns, sources, original);
  out.lossy = dec.patterns.cols() != dec.patterns.rows();
  out.residual_norm = (original.data - out.recording.data).norm();
  return out;
}

namespace {

Eigen::VectorXd shifted_pattern(const Decomposition& dec, std::size_t component_index,
                                const Eigen::Vector3d& moment, const headmodel::Leadfield& target) {
  if (component_index >= static_cast<std::size_t>(dec.patterns.cols()))
    reject("component index " + std::to_string(component_index) + " out of range");
  const Eigen::VectorXd original = dec.patterns.col(static_cast<Eigen::Index>(component_index));
  if (target.rows() != original.size())
    reject("head model channel count does not match the decomposition");
  Eigen::VectorXd a = target * moment;
  const double norm = a.norm();
  if (!(norm > 0.0)) return original;  // silent direction; keep the pattern
  a *= original.norm() / norm;
  if (a.dot(original) < 0.0) a = -a;
  return a;
}

}  // namespace

Eigen::VectorXd augment_component(const Decomposition& dec, std::size_t component_index,
                                  const dipolefit::DipoleFit& fit, std::size_t target_voxel,
                                  const headmodel::HeadModel& model) {
  return shifted_pattern(dec, component_index, fit.moment, model.leadfield(target_voxel));
}

Eigen::VectorXd augment_component(const Decomposition& dec, std::size_t component_index,
                                  const dipolefit::DipoleFit& fit, std::size_t target_voxel,
                                  const dipolefit::MusicScanner& scanner) {
  if (target_voxel >= scanner.leadfields().voxels())
    reject("target voxel " + std::to_string(target_voxel) + " out of range");
  return shifted_pattern(dec, component_index, fit.moment, scanner.leadfields().at(target_voxel));
}

Eigen::Vector3d rotate_moment(const Eigen::Vector3d& moment, double max_deg, std::uint64_t seed) {
  if (max_deg <= 0.0) return moment;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Eigen::Vector3d axis;
  do {
    axis = Eigen::Vector3d(normal(gen), normal(gen), normal(gen));
  } while (axis.norm() < 1e-12);
  std::uniform_real_distribution<double> angle(0.0, max_deg * std::numbers::pi / 180.0);
  return Eigen::AngleAxisd(angle(gen), axis.normalized()) * moment;
}

namespace {

std::vector<bool> select_components(const ComponentSelection& sel,
                                    const std::vector<ComponentReport>& comps) {
  std::vector<bool> out(comps.size(), false);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    switch (sel.mode) {
      case SelectionMode::All:
        out[i] = true;
        break;
      case SelectionMode::StrongestK:
        out[i] = i < sel.k;  // components are sorted by descending score
        break;
      case SelectionMode::QualityGated:
        out[i] = dipolefit::fit_quality_gate(comps[i].fit, sel.threshold);
        break;
    }
  }
  return out;
}

}  // namespace

ParticipantAugmentation generate_participant(const MultichannelRecording& rec,
                                             const dipolefit::MusicScanner& scanner,
                                             const AugmentationConfig& cfg,
                                             const ssd::SsdBands& bands) {
  cfg.validate();
  ParticipantAugmentation out;
  out.report.config = cfg;
  out.report.bands = bands;
  out.report.channels = static_cast<std::size_t>(rec.channels());
  if (cfg.n_variants == 1) return out;

  if (rec.channel_labels != scanner.model().channel_labels())
    reject("recording channels do not match the head model montage");

  const auto dec = ssd::ssd_decompose(rec, bands);
  const auto& a = dec.decomposition.patterns;
  const auto& s = dec.sources;
  out.report.effective_rank = dec.effective_rank;
  const auto recon = regenerate(dec.decomposition, s, rec);
  out.report.lossy = recon.lossy;
  out.report.residual_norm = recon.residual_norm;

  const std::size_t d = static_cast<std::size_t>(a.cols());
  const std::size_t generated = cfg.n_variants - 1;
  out.report.components.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    auto& c = out.report.components[i];
    c.index = i;
    c.score = s.component_scores[static_cast<Eigen::Index>(i)];
    c.pattern_norm = a.col(static_cast<Eigen::Index>(i)).norm();
    c.fit = scanner.fit(a.col(static_cast<Eigen::Index>(i)), i);
  }
  const auto selected = select_components(cfg.components, out.report.components);

  for (std::size_t i = 0; i < d; ++i) {
    auto& c = out.report.components[i];
    c.selected = selected[i];
    if (!c.selected) continue;
    try {
      c.targets = scanner.model().nearest_voxels(c.fit.voxel, generated, cfg.min_shift);
    } catch (const InsufficientNeighborsError& e) {
      throw InsufficientNeighborsError("component " + std::to_string(i) + ": " + e.what(),
                                       e.available(), e.requested());
    }
  }

  // X - A S is carried into every variant when the decomposition is lossy.
  Eigen::MatrixXd residual;
  if (recon.lossy) residual = rec.data - recon.recording.data;

  const std::uint64_t participant_seed = cfg.seed;
  out.variants.reserve(generated);
  for (std::size_t j = 0; j < generated; ++j) {
    Eigen::MatrixXd mixing = a;
    for (std::size_t i = 0; i < d; ++i) {
      const auto& c = out.report.components[i];
      if (!c.selected) continue;
      dipolefit::DipoleFit fit = c.fit;
      fit.moment = rotate_moment(fit.moment, cfg.max_rotation_deg,
                                 derive_seed(participant_seed, {j, i}));
      mixing.col(static_cast<Eigen::Index>(i)) =
          augment_component(dec.decomposition, i, fit, c.targets[j], scanner);
    }
    Eigen::MatrixXd x = mixing * s.data;
    if (recon.lossy) x += residual;
    auto variant = with_data(rec, std::move(x));
    variant.metadata["variant"] = std::to_string(j + 1);
    variant.metadata["augmentation_seed"] = std::to_string(cfg.seed);
    out.variants.push_back(std::move(variant));
  }
  return out;
}

ParticipantAugmentation generate_participant(const MultichannelRecording& rec,
                                             const headmodel::HeadModel& model,
                                             const AugmentationConfig& cfg,
                                             const ssd::SsdBands& bands) {
  if (cfg.n_variants == 1) {
    cfg.validate();
    ParticipantAugmentation out;
    out.report.config = cfg;
    out.report.bands = bands;
    out.report.channels = static_cast<std::size_t>(rec.channels());
    return out;
  }
  return generate_participant(rec, dipolefit::MusicScanner(model), cfg, bands);
}

}  // namespace dipoleforge::augment

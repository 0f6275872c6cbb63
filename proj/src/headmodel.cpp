#include "dipoleforge/headmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dipoleforge/error.hpp"
#include "dipoleforge/montage.hpp"

namespace dipoleforge::headmodel {

HeadModel::HeadModel(HeadModelConfig config) : config_(std::move(config)) {
  forward_ = std::make_shared<const SphereForward>(config_.geometry, config_.series_degree,
                                                   config_.series_mode);
  const auto& radii = config_.geometry.radii;
  const double h = config_.grid_spacing;
  if (!(h > 0.0)) misconfigured("grid spacing must be positive");

  const auto names = config_.channels.empty() ? montage::labels(config_.montage)
                                              : config_.channels;
  const auto known = montage::labels(config_.montage);
  for (const auto& name : names) {
    if (std::find(known.begin(), known.end(), name) == known.end())
      misconfigured("channel '" + name + "' is not part of montage " + config_.montage);
    const auto unit = montage::unit_position(name);
    electrodes_.push_back({name, *unit * radii[2]});
  }
  if (electrodes_.size() < 2) misconfigured("head model needs at least 2 electrodes");

  const double inner = kShellInner * radii[0];
  const double outer = kShellOuter * radii[0];
  const int k = static_cast<int>(std::floor(outer / h));
  for (int i = -k; i <= k; ++i)
    for (int j = -k; j <= k; ++j)
      for (int l = -k; l <= k; ++l) {
        const Eigen::Vector3d v(i * h, j * h, l * h);
        const double r = v.norm();
        if (r >= inner && r <= outer) {
          voxels_.push_back(v);
          lattice_.emplace_back(i, j, l);
        }
      }
  if (voxels_.empty())
    misconfigured("grid spacing " + std::to_string(h) + " m leaves no voxel in the cortical shell");
}

HeadModel build_head_model(const HeadModelConfig& config) { return HeadModel(config); }

std::vector<std::string> HeadModel::channel_labels() const {
  std::vector<std::string> out;
  out.reserve(electrodes_.size());
  for (const auto& e : electrodes_) out.push_back(e.label);
  return out;
}

void HeadModel::check_voxel(std::size_t v) const {
  if (v >= voxels_.size())
    reject("voxel index " + std::to_string(v) + " out of range (model has " +
           std::to_string(voxels_.size()) + ")");
}

std::size_t HeadModel::nearest_voxel(const Eigen::Vector3d& position) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < voxels_.size(); ++i) {
    const double d = (voxels_[i] - position).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Leadfield HeadModel::raw_gain_at(const Eigen::Vector3d& position) const {
  Leadfield g(static_cast<Eigen::Index>(electrodes_.size()), 3);
  for (std::size_t e = 0; e < electrodes_.size(); ++e)
    g.row(static_cast<Eigen::Index>(e)) = forward_->gain(electrodes_[e].position, position);
  return g;
}

Leadfield HeadModel::leadfield_at(const Eigen::Vector3d& position) const {
  Leadfield g = raw_gain_at(position);
  average_reference(g);
  return g;
}

Leadfield HeadModel::leadfield(std::size_t voxel) const {
  check_voxel(voxel);
  return leadfield_at(voxels_[voxel]);
}

Eigen::VectorXd HeadModel::dipole_field(const Dipole& dipole) const {
  return leadfield(dipole.voxel) * dipole.moment;
}

double HeadModel::grid_distance(std::size_t a, std::size_t b) const {
  check_voxel(a);
  check_voxel(b);
  return std::sqrt(static_cast<double>((lattice_[a] - lattice_[b]).squaredNorm()));
}

std::vector<std::size_t> HeadModel::nearest_voxels(std::size_t origin, std::size_t count,
                                                   double min_distance) const {
  check_voxel(origin);
  if (!(min_distance >= 0.0)) reject("min_distance must be >= 0");
  if (count == 0) return {};

  // Integer lattice distances keep ties exact.
  const double min_steps = min_distance / config_.grid_spacing;
  std::vector<std::pair<long, std::size_t>> candidates;
  for (std::size_t i = 0; i < voxels_.size(); ++i) {
    if (i == origin) continue;
    const long d2 = (lattice_[i] - lattice_[origin]).squaredNorm();
    if (static_cast<double>(d2) >= min_steps * min_steps) candidates.emplace_back(d2, i);
  }
  if (candidates.size() < count)
    throw InsufficientNeighborsError("only " + std::to_string(candidates.size()) +
                                         " voxels lie at least " + std::to_string(min_distance) +
                                         " m from voxel " + std::to_string(origin) + ", " +
                                         std::to_string(count) + " requested",
                                     candidates.size(), count);
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(count),
                    candidates.end());
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(candidates[i].second);
  return out;
}

}  // namespace dipoleforge::headmodel

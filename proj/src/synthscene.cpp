#include "dipoleforge/synthscene.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <unsupported/Eigen/FFT>

#include "dipoleforge/error.hpp"
#include "dipoleforge/rng.hpp"

namespace dipoleforge::synthscene {

namespace {

constexpr double kNanoAmpereMeter = 1e-9;
constexpr double kMicrovolt = 1e6;  // volts -> microvolts

enum Stream : std::uint64_t { kJitter = 0, kLabels = 1, kNoise = 2, kSensor = 3, kPhase = 4 };

// Scene-wide stream, outside the participant index range.
constexpr std::uint64_t kSceneLayout = ~0ULL;

Eigen::Vector3d random_axis(std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  Eigen::Vector3d v;
  do {
    v = Eigen::Vector3d(normal(gen), normal(gen), normal(gen));
  } while (v.norm() < 1e-12);
  return v.normalized();
}

}  // namespace

// Unequal amplitudes: two equally strong sources with the same spectrum give
// SSD a degenerate eigenpair and their patterns come out mixed.
std::vector<TaskDipole> default_task_dipoles() {
  return {
      {Eigen::Vector3d(-0.04, 0.0, 0.05), Eigen::Vector3d(0.0, 1.0, 0.0), 14.0, kRightHand},
      {Eigen::Vector3d(0.04, 0.0, 0.05), Eigen::Vector3d(0.0, 1.0, 0.0), 7.0, kLeftHand},
  };
}

void SceneConfig::validate() const {
  if (n_participants < 1) misconfigured("n_participants must be >= 1");
  if (trials_per_class < 1) misconfigured("trials_per_class must be >= 1");
  if (!(sample_rate > 0.0)) misconfigured("sample_rate must be positive");
  if (!(layout.fixation_s >= 0.0 && layout.task_s > 0.0 && layout.blank_s >= 0.0))
    misconfigured("trial layout durations must be non-negative with a positive task window");
  if (!(erd_depth >= 0.0 && erd_depth < 1.0)) misconfigured("erd_depth must lie in [0, 1)");
  if (!(frequency_hz > 0.0 && frequency_hz < sample_rate / 2.0))
    misconfigured("source frequency must lie below Nyquist");
  if (!(amplitude_jitter >= 0.0)) misconfigured("amplitude_jitter must be >= 0");
  if (!(noise_amplitude_nam >= 0.0)) misconfigured("noise amplitude must be >= 0");
  if (!(snr > 0.0)) misconfigured("snr must be positive (inf disables sensor noise)");
  if (!(voxel_jitter_steps >= 0.0)) misconfigured("voxel jitter must be >= 0");
  if (!(rotation_jitter_deg >= 0.0 && rotation_jitter_deg <= 180.0))
    misconfigured("rotation jitter must lie in [0, 180] degrees");
  for (const auto& d : task_dipoles)
    if (!(d.moment.norm() > 0.0)) misconfigured("task dipole moment must be non-zero");
}

Eigen::RowVectorXd pink_noise(Eigen::Index samples, std::uint64_t seed) {
  if (samples < 2) reject("pink noise needs at least 2 samples");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::vector<double> white(static_cast<std::size_t>(samples));
  for (auto& w : white) w = normal(gen);

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, white);
  spectrum[0] = 0.0;
  const auto n = spectrum.size();
  for (std::size_t k = 1; k < n; ++k) {
    const auto f = static_cast<double>(std::min(k, n - k));
    spectrum[k] /= std::sqrt(f);
  }
  std::vector<double> shaped;
  fft.inv(shaped, spectrum);

  Eigen::RowVectorXd out = Eigen::Map<Eigen::RowVectorXd>(shaped.data(), samples);
  out.array() -= out.mean();
  const double sd = std::sqrt(out.squaredNorm() / static_cast<double>(samples - 1));
  return out / sd;
}

VirtualParticipant generate_virtual_participant(const headmodel::HeadModel& model,
                                                const SceneConfig& cfg,
                                                std::size_t participant_index) {
  cfg.validate();
  const double fs = cfg.sample_rate;
  const auto p = static_cast<std::uint64_t>(participant_index);
  const auto trial_len = static_cast<std::int64_t>(std::llround(cfg.layout.trial_s() * fs));
  const auto cue = static_cast<std::int64_t>(std::llround(cfg.layout.fixation_s * fs));
  const auto task_len = static_cast<std::int64_t>(std::llround(cfg.layout.task_s * fs));
  const std::size_t n_trials = 2 * cfg.trials_per_class;
  const auto samples = static_cast<Eigen::Index>(trial_len * static_cast<std::int64_t>(n_trials));

  VirtualParticipant out;
  auto& truth = out.truth;
  truth.participant = participant_index;

  // Every dipole has a scene-wide base location and orientation; each
  // participant sees it moved to a voxel within voxel_jitter_steps and rotated
  // by at most rotation_jitter_deg.
  std::mt19937_64 jitter(derive_seed(cfg.seed, {p, kJitter}));
  std::mt19937_64 phase_gen(derive_seed(cfg.seed, {p, kPhase}));
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  auto place = [&](std::string role, std::size_t base, const Eigen::Vector3d& moment, double amplitude) {
    std::vector<std::size_t> candidates;
    for (std::size_t v = 0; v < model.voxel_count(); ++v)
      if (model.grid_distance(v, base) <= cfg.voxel_jitter_steps) candidates.push_back(v);
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    PlantedDipole d;
    d.role = std::move(role);
    d.voxel = candidates[pick(jitter)];
    d.position = model.voxels()[d.voxel];
    const Eigen::Vector3d axis = random_axis(jitter);
    const double angle = unit01(jitter) * cfg.rotation_jitter_deg * std::numbers::pi / 180.0;
    d.moment = (Eigen::AngleAxisd(angle, axis) * moment.normalized()).normalized();
    d.amplitude_nam = amplitude;
    truth.dipoles.push_back(d);
  };
  const double h = model.grid_spacing();
  for (const auto& td : cfg.task_dipoles) {
    const auto base = model.nearest_voxel(td.position);
    if ((model.voxels()[base] - td.position).norm() > h)
      misconfigured("task dipole position lies outside the voxel grid");
    place("task", base, td.moment, td.amplitude_nam);
  }
  std::mt19937_64 layout_gen(derive_seed(cfg.seed, {kSceneLayout}));
  std::uniform_int_distribution<std::size_t> any_voxel(0, model.voxel_count() - 1);
  for (std::size_t k = 0; k < cfg.n_noise_dipoles; ++k) {
    const auto base = any_voxel(layout_gen);
    place("noise", base, random_axis(layout_gen), cfg.noise_amplitude_nam);
  }

  // Balanced, shuffled class sequence.
  std::vector<int> labels(n_trials);
  for (std::size_t i = 0; i < n_trials; ++i) labels[i] = i < cfg.trials_per_class ? kLeftHand : kRightHand;
  std::mt19937_64 label_gen(derive_seed(cfg.seed, {p, kLabels}));
  std::shuffle(labels.begin(), labels.end(), label_gen);

  // Task time courses: a fresh random phase per trial keeps the two task
  // sources incoherent; amplitude is constant within the baseline and task
  // parts of each trial.
  const std::size_t n_task = cfg.task_dipoles.size();
  const double omega = 2.0 * std::numbers::pi * cfg.frequency_hz / fs;
  std::normal_distribution<double> amp_normal;
  Eigen::MatrixXd task(static_cast<Eigen::Index>(n_task), samples);
  for (std::size_t t = 0; t < n_trials; ++t) {
    TrialTruth tt;
    const auto start = static_cast<std::int64_t>(t) * trial_len;
    tt.marker_sample = start + cue;
    tt.label = labels[t];
    for (std::size_t i = 0; i < n_task; ++i) {
      const double base =
          cfg.task_dipoles[i].amplitude_nam * std::exp(cfg.amplitude_jitter * amp_normal(phase_gen));
      const double during =
          cfg.task_dipoles[i].desynchronizes_on == labels[t] ? base * (1.0 - cfg.erd_depth) : base;
      const double phase = unit01(phase_gen) * 2.0 * std::numbers::pi;
      for (std::int64_t n = 0; n < trial_len; ++n) {
        const bool in_task = n >= cue && n < cue + task_len;
        task(static_cast<Eigen::Index>(i), start + n) =
            (in_task ? during : base) * std::sin(omega * static_cast<double>(n) + phase);
      }
      tt.task_amplitudes_nam.push_back(during);
      tt.task_phases.push_back(phase);
    }
    out.recording.markers.push_back({tt.marker_sample, tt.label});
    truth.trials.push_back(std::move(tt));
  }

  truth.source_time_courses.resize(static_cast<Eigen::Index>(truth.dipoles.size()), samples);
  truth.source_time_courses.topRows(static_cast<Eigen::Index>(n_task)) = task;
  for (std::size_t k = 0; k < cfg.n_noise_dipoles; ++k) {
    const auto r = static_cast<Eigen::Index>(n_task + k);
    truth.source_time_courses.row(r) =
        cfg.noise_amplitude_nam * pink_noise(samples, derive_seed(cfg.seed, {p, kNoise, k}));
  }

  const auto c = static_cast<Eigen::Index>(model.channel_count());
  Eigen::MatrixXd mixing(c, static_cast<Eigen::Index>(truth.dipoles.size()));
  for (std::size_t i = 0; i < truth.dipoles.size(); ++i)
    mixing.col(static_cast<Eigen::Index>(i)) =
        model.leadfield(truth.dipoles[i].voxel) * truth.dipoles[i].moment;
  Eigen::MatrixXd data = (kNanoAmpereMeter * kMicrovolt) * mixing * truth.source_time_courses;

  if (std::isfinite(cfg.snr)) {
    const double rms = std::sqrt(data.squaredNorm() / static_cast<double>(data.size()));
    truth.sensor_noise_std_uv = rms / cfg.snr;
    std::mt19937_64 sensor(derive_seed(cfg.seed, {p, kSensor}));
    std::normal_distribution<double> normal;
    for (Eigen::Index t = 0; t < samples; ++t)
      for (Eigen::Index ch = 0; ch < c; ++ch) data(ch, t) += truth.sensor_noise_std_uv * normal(sensor);
  }

  auto& rec = out.recording;
  rec.data = std::move(data);
  rec.sample_rate = fs;
  rec.channel_labels = model.channel_labels();
  rec.metadata["participant"] = std::to_string(participant_index);
  rec.metadata["scene_seed"] = std::to_string(cfg.seed);
  rec.metadata["unit"] = "uV";
  return out;
}

}  // namespace dipoleforge::synthscene

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dipoleforge/headmodel.hpp"
#include "dipoleforge/recording.hpp"

namespace dipoleforge::synthscene {

struct TrialLayout {
  double fixation_s = 2.0;  // marker (cue onset) at the end of fixation
  double task_s = 4.0;
  double blank_s = 2.0;
  double trial_s() const { return fixation_s + task_s + blank_s; }
};

struct TaskDipole {
  Eigen::Vector3d position;
  Eigen::Vector3d moment;  // direction; normalized on use
  double amplitude_nam = 10.0;
  int desynchronizes_on = kRightHand;  // class whose task window lowers the amplitude
};

/// Left-hemisphere source (desynchronizes for right-hand imagery, 14 nAm) and
/// a weaker right-hemisphere mirror (7 nAm).
std::vector<TaskDipole> default_task_dipoles();

struct SceneConfig {
  std::size_t n_participants = 18;
  std::size_t trials_per_class = 75;
  double sample_rate = 100.0;
  TrialLayout layout;
  double erd_depth = 0.5;
  double frequency_hz = 10.0;
  std::vector<TaskDipole> task_dipoles = default_task_dipoles();
  double amplitude_jitter = 0.2;  // std of per-trial log amplitude
  std::size_t n_noise_dipoles = 20;
  double noise_amplitude_nam = 10.0;  // RMS of each pink-noise dipole
  double snr = 5.0;  // RMS of the dipole signal over RMS of the sensor noise; inf = none
  double voxel_jitter_steps = 2.0;
  double rotation_jitter_deg = 25.0;
  std::uint64_t seed = 7;

  void validate() const;
};

struct PlantedDipole {
  std::string role;  // "task" or "noise"
  std::size_t voxel = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d moment = Eigen::Vector3d::UnitZ();  // unit
  double amplitude_nam = 0.0;
};

struct TrialTruth {
  std::int64_t marker_sample = 0;
  int label = 0;
  std::vector<double> task_amplitudes_nam;  // per task dipole during the task window
  std::vector<double> task_phases;          // per task dipole, radians at trial start
};

struct GroundTruth {
  std::size_t participant = 0;
  std::vector<PlantedDipole> dipoles;
  std::vector<TrialTruth> trials;
  Eigen::MatrixXd source_time_courses;  // dipoles x samples, nAm
  double sensor_noise_std_uv = 0.0;
};

struct VirtualParticipant {
  MultichannelRecording recording;  // microvolts
  GroundTruth truth;
};

VirtualParticipant generate_virtual_participant(const headmodel::HeadModel& model,
                                                const SceneConfig& cfg,
                                                std::size_t participant_index);

/// Unit-variance 1/f-power noise of the given length.
Eigen::RowVectorXd pink_noise(Eigen::Index samples, std::uint64_t seed);

}  // namespace dipoleforge::synthscene

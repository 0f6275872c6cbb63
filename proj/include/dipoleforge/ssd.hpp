#pragma once

#include <cstddef>
#include <optional>

#include "dipoleforge/recording.hpp"

namespace dipoleforge::ssd {

struct Band {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

struct SsdBands {
  Band signal{8.0, 13.0};
  Band flank_low{5.0, 8.0};
  Band flank_high{13.0, 16.0};

  /// Throws a rejected-input error when the bands overlap or are inverted.
  void validate(double sample_rate) const;
};

struct SsdResult {
  Decomposition decomposition;
  SourceActivity sources;
  std::size_t effective_rank = 0;  // numerical rank of C_s + C_n
  bool reduced = false;            // true when effective_rank < channels
};

/// Minimum seconds of data left after the filter edges are discarded.
inline constexpr double kMinAnalysisSeconds = 10.0;

/// Relative eigenvalue cutoff for the numerical rank of C_s + C_n.
inline constexpr double kRankTolerance = 1e-10;

/// Spatial filters maximizing lambda = w'C_s w / w'(C_s + C_n)w, where C_s is
/// the covariance of the signal-band data and C_n that of the summed flank-band
/// data. Filters are sorted by descending lambda and scaled to w'C_s w = 1;
/// each filter/pattern pair is signed so the pattern's largest-magnitude
/// entry is positive. Patterns use the broadband covariance.
SsdResult ssd_decompose(const MultichannelRecording& rec, const SsdBands& bands = {},
                        std::optional<std::size_t> n_components = std::nullopt);

/// Band-power ratio (signal band / summed flank bands) of one time course,
/// measured with the same filters and edge handling as ssd_decompose.
double band_power_ratio(const Eigen::RowVectorXd& signal, double sample_rate,
                        const SsdBands& bands = {});

}  // namespace dipoleforge::ssd

#include "dipoleforge/recording.hpp"

#include <set>

#include "dipoleforge/error.hpp"

namespace dipoleforge {

void MultichannelRecording::validate() const {
  if (data.rows() < 2) reject("recording needs at least 2 channels");
  if (data.cols() < 1) reject("recording has no samples");
  if (!(sample_rate > 0.0)) reject("sample rate must be positive");
  if (static_cast<Eigen::Index>(channel_labels.size()) != data.rows())
    reject("channel label count " + std::to_string(channel_labels.size()) +
           " does not match channel count " + std::to_string(data.rows()));
  std::set<std::string> seen(channel_labels.begin(), channel_labels.end());
  if (seen.size() != channel_labels.size()) reject("channel labels are not unique");
  for (const auto& m : markers)
    if (m.sample < 0 || m.sample >= data.cols())
      reject("marker at sample " + std::to_string(m.sample) + " outside [0, " +
             std::to_string(data.cols()) + ")");
}

MultichannelRecording with_data(const MultichannelRecording& like, Eigen::MatrixXd data) {
  MultichannelRecording out;
  out.data = std::move(data);
  out.sample_rate = like.sample_rate;
  out.channel_labels = like.channel_labels;
  out.markers = like.markers;
  out.metadata = like.metadata;
  return out;
}

namespace {

class Fnv1a {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= c[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  template <typename T>
  void value(const T& v) {
    bytes(&v, sizeof(T));
  }
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace

std::uint64_t content_hash(const MultichannelRecording& rec) {
  Fnv1a h;
  h.value(rec.data.rows());
  h.value(rec.data.cols());
  h.bytes(rec.data.data(), sizeof(double) * static_cast<std::size_t>(rec.data.size()));
  h.value(rec.sample_rate);
  for (const auto& l : rec.channel_labels) {
    h.bytes(l.data(), l.size());
    h.value('\0');
  }
  for (const auto& m : rec.markers) {
    h.value(m.sample);
    h.value(m.label);
  }
  return h.digest();
}

}  // namespace dipoleforge

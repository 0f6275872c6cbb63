#include "dipoleforge/io.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "dipoleforge/error.hpp"

namespace dipoleforge::io {

namespace {

constexpr int kFormatVersion = 1;

[[noreturn]] void io_error(const std::string& msg) { throw Error(ErrorKind::Io, msg); }

template <typename T>
void write_le(std::ostream& os, const T* values, std::size_t n) {
  static_assert(std::is_arithmetic_v<T>);
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(values), static_cast<std::streamsize>(n * sizeof(T)));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      char b[sizeof(T)];
      std::memcpy(b, &values[i], sizeof(T));
      std::reverse(b, b + sizeof(T));
      os.write(b, sizeof(T));
    }
  }
}

template <typename T>
void read_le(std::istream& is, T* values, std::size_t n) {
  is.read(reinterpret_cast<char*>(values), static_cast<std::streamsize>(n * sizeof(T)));
  if constexpr (std::endian::native != std::endian::little) {
    for (std::size_t i = 0; i < n; ++i) {
      char b[sizeof(T)];
      std::memcpy(b, &values[i], sizeof(T));
      std::reverse(b, b + sizeof(T));
      std::memcpy(&values[i], b, sizeof(T));
    }
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) io_error("cannot open '" + path.string() + "' for writing");
  return os;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) io_error("cannot open '" + path.string() + "'");
  return is;
}

void check_format(const json& j, const std::string& format, const fs::path& path) {
  if (!j.is_object() || j.value("format", "") != format)
    io_error("'" + path.string() + "' is not a " + format + " file");
}

json vec(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

json columns(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(vec(m.col(j)));
  return out;
}

Eigen::Vector3d vec3(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) misconfigured("expected a 3-vector");
  return {v[0], v[1], v[2]};
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

/// Sets `out` from j[key] when present.
template <typename T>
void get(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      misconfigured(std::string("config key '") + key + "': " + e.what());
    }
  }
}

void check_keys(const json& j, const char* section, std::initializer_list<const char*> keys) {
  if (!j.is_object()) misconfigured(std::string("config section '") + section + "' must be an object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key()))
      misconfigured(std::string("unknown key '") + it.key() + "' in config section '" + section + "'");
}

double number_or_inf(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    misconfigured("expected a number or \"inf\", got \"" + s + "\"");
  }
  return j.get<double>();
}

ssd::Band band(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) misconfigured("band must be [low_hz, high_hz]");
  return {v[0], v[1]};
}

json to_json(const ssd::SsdBands& b) {
  return {{"signal", {b.signal.low_hz, b.signal.high_hz}},
          {"flank_low", {b.flank_low.low_hz, b.flank_low.high_hz}},
          {"flank_high", {b.flank_high.low_hz, b.flank_high.high_hz}}};
}

std::string selection_name(augment::SelectionMode m) {
  switch (m) {
    case augment::SelectionMode::All: return "all";
    case augment::SelectionMode::StrongestK: return "strongest-k";
    case augment::SelectionMode::QualityGated: return "quality-gated";
  }
  return "all";
}

json to_json(const augment::AugmentationConfig& c) {
  return {{"n_variants", c.n_variants},
          {"min_shift", c.min_shift},
          {"components", selection_name(c.components.mode)},
          {"k", c.components.k},
          {"threshold", c.components.threshold},
          {"seed", c.seed},
          {"max_rotation_deg", c.max_rotation_deg},
          {"pattern_scaling", "norm-matched to the original pattern column"}};
}

}  // namespace

// --- recordings ------------------------------------------------------------

void write_recording(const fs::path& dir, const MultichannelRecording& rec) {
  rec.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) io_error("cannot create directory '" + dir.string() + "': " + ec.message());

  json markers = json::array();
  for (const auto& m : rec.markers) markers.push_back({{"sample", m.sample}, {"label", m.label}});
  const json meta = {
      {"format", "dipoleforge.recording"},
      {"version", kFormatVersion},
      {"sample_rate", rec.sample_rate},
      {"channels", rec.channels()},
      {"samples", rec.samples()},
      {"channel_labels", rec.channel_labels},
      {"markers", markers},
      {"metadata", rec.metadata},
      {"data", {{"file", "data.f32"},
                {"dtype", "float32"},
                {"byte_order", "little"},
                {"shape", {rec.channels(), rec.samples()}},
                {"order", "row-major"}}},
  };
  write_json(dir / "meta.json", meta);

  const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> f =
      rec.data.cast<float>();
  auto os = open_out(dir / "data.f32");
  write_le(os, f.data(), static_cast<std::size_t>(f.size()));
  if (!os) io_error("write to '" + (dir / "data.f32").string() + "' failed");
}

MultichannelRecording read_recording(const fs::path& dir) {
  const auto meta_path = dir / "meta.json";
  const auto meta = read_json(meta_path);
  check_format(meta, "dipoleforge.recording", meta_path);
  MultichannelRecording rec;
  try {
    rec.sample_rate = meta.at("sample_rate").get<double>();
    rec.channel_labels = meta.at("channel_labels").get<std::vector<std::string>>();
    for (const auto& m : meta.at("markers"))
      rec.markers.push_back({m.at("sample").get<std::int64_t>(), m.at("label").get<int>()});
    rec.metadata = meta.value("metadata", std::map<std::string, std::string>{});
    const auto c = meta.at("channels").get<Eigen::Index>();
    const auto t = meta.at("samples").get<Eigen::Index>();
    const auto data_path = dir / meta.at("data").value("file", "data.f32");
    const auto expected = static_cast<std::uintmax_t>(c * t) * sizeof(float);
    if (fs::file_size(data_path) != expected)
      io_error("'" + data_path.string() + "' holds " + std::to_string(fs::file_size(data_path)) +
               " bytes, expected " + std::to_string(expected));
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> f(c, t);
    auto is = open_in(data_path);
    read_le(is, f.data(), static_cast<std::size_t>(f.size()));
    if (!is) io_error("short read from '" + data_path.string() + "'");
    rec.data = f.cast<double>();
  } catch (const json::exception& e) {
    io_error("malformed '" + meta_path.string() + "': " + e.what());
  } catch (const fs::filesystem_error& e) {
    io_error(e.what());
  }
  rec.validate();
  return rec;
}

// --- head model --------------------------------------------------------------

json to_json(const headmodel::HeadModelConfig& cfg) {
  return {{"radii", cfg.geometry.radii},
          {"conductivities", cfg.geometry.conductivities},
          {"grid_spacing", cfg.grid_spacing},
          {"montage", cfg.montage},
          {"channels", cfg.channels},
          {"series_degree", cfg.series_degree},
          {"series_mode",
           cfg.series_mode == headmodel::SeriesMode::Plain ? "plain" : "accelerated"}};
}

headmodel::HeadModelConfig head_model_config_from_json(const json& j,
                                                      headmodel::HeadModelConfig cfg) {
  check_keys(j, "headmodel",
             {"radii", "conductivities", "grid_spacing", "montage", "channels", "series_degree",
              "series_mode"});
  get(j, "radii", cfg.geometry.radii);
  get(j, "conductivities", cfg.geometry.conductivities);
  get(j, "grid_spacing", cfg.grid_spacing);
  get(j, "montage", cfg.montage);
  get(j, "channels", cfg.channels);
  get(j, "series_degree", cfg.series_degree);
  std::string mode;
  get(j, "series_mode", mode);
  if (mode == "plain") cfg.series_mode = headmodel::SeriesMode::Plain;
  else if (mode == "accelerated") cfg.series_mode = headmodel::SeriesMode::Accelerated;
  else if (!mode.empty()) misconfigured("series_mode must be \"accelerated\" or \"plain\"");
  return cfg;
}

void write_head_model(const fs::path& dir, const headmodel::HeadModel& model,
                      const kernels::LeadfieldTable& table) {
  if (table.voxels() != model.voxel_count() || table.channels() != model.channel_count())
    reject("leadfield table shape does not match the head model");
  json electrodes = json::array();
  for (const auto& e : model.electrodes())
    electrodes.push_back({{"label", e.label}, {"position", vec(e.position)}});
  json voxels = json::array();
  for (const auto& v : model.voxels()) voxels.push_back(vec(v));
  const json j = {
      {"format", "dipoleforge.headmodel"},
      {"version", kFormatVersion},
      {"config", to_json(model.config())},
      {"electrodes", electrodes},
      {"voxels", voxels},
      {"leadfield", {{"file", "leadfield.f64"},
                     {"dtype", "float64"},
                     {"byte_order", "little"},
                     {"shape", {table.voxels(), table.channels(), 3}},
                     {"order", "row-major"},
                     {"reference", "average"},
                     {"unit", "V / (A m)"}}},
  };
  write_json(dir / "headmodel.json", j);
  auto os = open_out(dir / "leadfield.f64");
  write_le(os, table.raw().data(), table.raw().size());
  if (!os) io_error("write to '" + (dir / "leadfield.f64").string() + "' failed");
}

LoadedHeadModel read_head_model(const fs::path& path) {
  const auto file = fs::is_directory(path) ? path / "headmodel.json" : path;
  const auto j = read_json(file);
  check_format(j, "dipoleforge.headmodel", file);
  LoadedHeadModel out{headmodel::HeadModel(head_model_config_from_json(j.at("config"))), std::nullopt};
  const auto& lf = j.at("leadfield");
  const auto shape = lf.at("shape").get<std::vector<std::size_t>>();
  if (shape.size() != 3 || shape[0] != out.model.voxel_count() ||
      shape[1] != out.model.channel_count() || shape[2] != 3)
    io_error("leadfield shape in '" + file.string() + "' does not match its configuration");
  const auto data_path = file.parent_path() / lf.value("file", "leadfield.f64");
  if (!fs::exists(data_path)) return out;
  kernels::LeadfieldTable table(shape[0], shape[1]);
  if (fs::file_size(data_path) != table.raw().size() * sizeof(double))
    io_error("'" + data_path.string() + "' has the wrong size");
  auto is = open_in(data_path);
  read_le(is, table.raw().data(), table.raw().size());
  if (!is) io_error("short read from '" + data_path.string() + "'");
  out.leadfields = std::move(table);
  return out;
}

// --- ssd, fits, augmentation -------------------------------------------------

void write_ssd(const fs::path& path, const ssd::SsdResult& result, const ssd::SsdBands& bands,
               const std::vector<std::string>& channel_labels) {
  const auto& d = result.decomposition;
  write_json(path, {{"format", "dipoleforge.ssd"},
                    {"version", kFormatVersion},
                    {"bands", to_json(bands)},
                    {"channel_labels", channel_labels},
                    {"effective_rank", result.effective_rank},
                    {"reduced", result.reduced},
                    {"eigenvalues", vec(result.sources.component_scores)},
                    {"filters", columns(d.filters)},
                    {"patterns", columns(d.patterns)}});
}

json to_json(const dipolefit::DipoleFit& fit, const headmodel::HeadModel& model) {
  return {{"pattern_index", fit.pattern_index},
          {"voxel", fit.voxel},
          {"position", vec(model.voxels().at(fit.voxel))},
          {"moment", vec(fit.moment)},
          {"subspace_correlation", fit.subspace_correlation},
          {"reduced_rank", fit.reduced_rank},
          {"low_confidence", fit.low_confidence}};
}

void write_augmentation_report(const fs::path& path, const augment::AugmentationReport& report,
                               const headmodel::HeadModel& model) {
  json comps = json::array();
  for (const auto& c : report.components)
    comps.push_back({{"index", c.index},
                     {"eigenvalue", c.score},
                     {"selected", c.selected},
                     {"pattern_norm", c.pattern_norm},
                     {"fit", to_json(c.fit, model)},
                     {"targets", c.targets}});
  write_json(path, {{"format", "dipoleforge.augmentation_report"},
                    {"version", kFormatVersion},
                    {"config", to_json(report.config)},
                    {"bands", to_json(report.bands)},
                    {"channels", report.channels},
                    {"effective_rank", report.effective_rank},
                    {"lossy", report.lossy},
                    {"residual_norm", report.residual_norm},
                    {"components", comps}});
}

// --- classifier ----------------------------------------------------------------

void write_lda(const fs::path& path, const classify::LdaModel& model) {
  write_json(path, {{"format", "dipoleforge.lda"},
                    {"version", kFormatVersion},
                    {"positive_label", kRightHand},
                    {"weights", vec(model.weights)},
                    {"bias", model.bias},
                    {"shrinkage_intensity", model.shrinkage_intensity},
                    {"channel_labels", model.channel_labels}});
}

classify::LdaModel read_lda(const fs::path& path) {
  const auto j = read_json(path);
  check_format(j, "dipoleforge.lda", path);
  classify::LdaModel m;
  const auto w = j.at("weights").get<std::vector<double>>();
  m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  m.bias = j.at("bias").get<double>();
  m.shrinkage_intensity = j.at("shrinkage_intensity").get<double>();
  m.channel_labels = j.value("channel_labels", std::vector<std::string>{});
  return m;
}

// --- results -------------------------------------------------------------------

json to_json(const harness::EvalResult& r) {
  auto arm = [](const harness::ArmSummary& a) { return json{{"mean", a.mean}, {"sem", a.sem}}; };
  json per_seed = json::array();
  for (const auto& s : r.per_seed)
    per_seed.push_back({{"seed", s.seed}, {"baseline", arm(s.baseline)}, {"augmented", arm(s.augmented)}});
  json per_participant = json::array();
  for (const auto& p : r.per_participant)
    per_participant.push_back(
        {{"participant", p.participant}, {"baseline", p.baseline}, {"augmented", p.augmented}});
  json folds = json::array();
  for (const auto& f : r.folds)
    folds.push_back({{"seed", f.seed},
                     {"participant", f.participant},
                     {"baseline", f.baseline},
                     {"augmented", f.augmented},
                     {"train_trials_baseline", f.train_trials_baseline},
                     {"train_trials_augmented", f.train_trials_augmented},
                     {"test_trials", f.test_trials}});
  json audits = json::array();
  for (const auto& a : r.audits)
    audits.push_back({{"seed", a.seed},
                      {"target", a.target},
                      {"hash_before", hex64(a.hash_before)},
                      {"hash_after", hex64(a.hash_after)},
                      {"augmented_participants", a.augmented},
                      {"passed", a.passed}});
  json excluded = json::array();
  for (const auto& e : r.excluded)
    excluded.push_back({{"participant", e.participant}, {"reason", e.reason}});
  return {{"format", "dipoleforge.results"},
          {"version", kFormatVersion},
          {"k", r.k},
          {"n_variants", r.n_variants},
          {"seeds", r.seeds},
          {"summary",
           {{"baseline", arm(r.baseline)},
            {"augmented", arm(r.augmented)},
            {"sign_test",
             {{"improved", r.sign_test.improved},
              {"worsened", r.sign_test.worsened},
              {"ties", r.sign_test.ties},
              {"p_value", r.sign_test.p_value}}},
            {"audits_passed", r.audits_passed()}}},
          {"per_seed", per_seed},
          {"per_participant", per_participant},
          {"folds", folds},
          {"audits", audits},
          {"excluded", excluded}};
}

harness::EvalResult eval_result_from_json(const json& j) {
  if (j.value("format", "") != "dipoleforge.results") io_error("not a dipoleforge.results document");
  harness::EvalResult r;
  try {
    r.k = j.at("k").get<std::size_t>();
    r.n_variants = j.at("n_variants").get<std::size_t>();
    r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    for (const auto& f : j.at("folds"))
      r.folds.push_back({f.at("seed").get<std::uint64_t>(), f.at("participant").get<std::string>(),
                         f.at("baseline").get<double>(), f.at("augmented").get<double>(),
                         f.value("train_trials_baseline", std::size_t{0}),
                         f.value("train_trials_augmented", std::size_t{0}),
                         f.value("test_trials", std::size_t{0})});
    for (const auto& a : j.value("audits", json::array())) {
      harness::FoldAudit fa;
      fa.seed = a.at("seed").get<std::uint64_t>();
      fa.target = a.at("target").get<std::string>();
      fa.hash_before = std::stoull(a.at("hash_before").get<std::string>(), nullptr, 16);
      fa.hash_after = std::stoull(a.at("hash_after").get<std::string>(), nullptr, 16);
      fa.augmented = a.at("augmented_participants").get<std::vector<std::string>>();
      fa.passed = a.at("passed").get<bool>();
      r.audits.push_back(std::move(fa));
    }
    for (const auto& e : j.value("excluded", json::array()))
      r.excluded.push_back({e.at("participant").get<std::string>(), e.at("reason").get<std::string>()});
  } catch (const json::exception& e) {
    io_error(std::string("malformed results document: ") + e.what());
  }
  harness::summarize(r);
  return r;
}

void write_results(const fs::path& dir, const harness::EvalResult& result) {
  write_json(dir / "results.json", to_json(result));
  std::ostringstream csv;
  csv << "participant,arm,seed,accuracy\n";
  char buf[64];
  for (const auto& f : result.folds) {
    std::snprintf(buf, sizeof buf, "%.17g", f.baseline);
    csv << f.participant << ",baseline," << f.seed << ',' << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", f.augmented);
    csv << f.participant << ",augmented," << f.seed << ',' << buf << '\n';
  }
  write_text(dir / "results.csv", csv.str());
}

std::string format_report(const harness::EvalResult& r) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "k=%zu  N=%zu  seeds=%zu  participants=%zu\n", r.k, r.n_variants,
                r.seeds.size(), r.per_participant.size());
  os << buf;
  os << "participant            baseline  augmented\n";
  for (const auto& p : r.per_participant) {
    std::snprintf(buf, sizeof buf, "%-20s %9.2f%% %9.2f%%\n", p.participant.c_str(),
                  100.0 * p.baseline, 100.0 * p.augmented);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "baseline (N=1):  %.2f +/- %.2f %%\n", 100.0 * r.baseline.mean,
                100.0 * r.baseline.sem);
  os << buf;
  std::snprintf(buf, sizeof buf, "augmented (N=%zu): %.2f +/- %.2f %%\n", r.n_variants,
                100.0 * r.augmented.mean, 100.0 * r.augmented.sem);
  os << buf;
  std::snprintf(buf, sizeof buf, "sign test: %zu improved, %zu worsened, %zu ties, p = %.3g\n",
                r.sign_test.improved, r.sign_test.worsened, r.sign_test.ties, r.sign_test.p_value);
  os << buf;
  for (const auto& e : r.excluded) os << "excluded " << e.participant << ": " << e.reason << '\n';
  return os.str();
}

// --- ground truth --------------------------------------------------------------

json to_json(const synthscene::GroundTruth& t) {
  json dipoles = json::array();
  for (const auto& d : t.dipoles)
    dipoles.push_back({{"role", d.role},
                       {"voxel", d.voxel},
                       {"position", vec(d.position)},
                       {"moment", vec(d.moment)},
                       {"amplitude_nam", d.amplitude_nam}});
  json trials = json::array();
  for (const auto& tr : t.trials)
    trials.push_back({{"marker_sample", tr.marker_sample},
                      {"label", tr.label},
                      {"task_amplitudes_nam", tr.task_amplitudes_nam},
                      {"task_phases", tr.task_phases}});
  return {{"participant", t.participant},
          {"sensor_noise_std_uv", t.sensor_noise_std_uv},
          {"dipoles", dipoles},
          {"trials", trials}};
}

void write_ground_truth(const fs::path& path, const std::vector<synthscene::GroundTruth>& truths) {
  json parts = json::array();
  for (const auto& t : truths) parts.push_back(to_json(t));
  write_json(path, {{"format", "dipoleforge.ground_truth"},
                    {"version", kFormatVersion},
                    {"participants", parts}});
}

// --- configuration ---------------------------------------------------------------

Config config_from_json(const json& j) {
  Config c;
  check_keys(j, "top level", {"headmodel", "scene", "ssd", "augment", "eval"});
  if (j.contains("headmodel")) c.headmodel = head_model_config_from_json(j["headmodel"]);

  if (j.contains("scene")) {
    const auto& s = j["scene"];
    check_keys(s, "scene",
               {"n_participants", "trials_per_class", "sample_rate", "fixation_s", "task_s",
                "blank_s", "erd_depth", "frequency_hz", "task_dipoles", "amplitude_jitter",
                "n_noise_dipoles", "noise_amplitude_nam", "snr", "voxel_jitter_steps",
                "rotation_jitter_deg", "seed"});
    auto& sc = c.scene;
    get(s, "n_participants", sc.n_participants);
    get(s, "trials_per_class", sc.trials_per_class);
    get(s, "sample_rate", sc.sample_rate);
    get(s, "fixation_s", sc.layout.fixation_s);
    get(s, "task_s", sc.layout.task_s);
    get(s, "blank_s", sc.layout.blank_s);
    get(s, "erd_depth", sc.erd_depth);
    get(s, "frequency_hz", sc.frequency_hz);
    get(s, "amplitude_jitter", sc.amplitude_jitter);
    get(s, "n_noise_dipoles", sc.n_noise_dipoles);
    get(s, "noise_amplitude_nam", sc.noise_amplitude_nam);
    if (s.contains("snr")) sc.snr = number_or_inf(s["snr"]);
    get(s, "voxel_jitter_steps", sc.voxel_jitter_steps);
    get(s, "rotation_jitter_deg", sc.rotation_jitter_deg);
    get(s, "seed", sc.seed);
    if (s.contains("task_dipoles")) {
      sc.task_dipoles.clear();
      for (const auto& d : s["task_dipoles"]) {
        check_keys(d, "scene.task_dipoles", {"position", "moment", "amplitude_nam", "desynchronizes_on"});
        synthscene::TaskDipole td{vec3(d.at("position")), vec3(d.at("moment")), 10.0, kRightHand};
        get(d, "amplitude_nam", td.amplitude_nam);
        get(d, "desynchronizes_on", td.desynchronizes_on);
        sc.task_dipoles.push_back(td);
      }
    }
  }

  if (j.contains("ssd")) {
    const auto& s = j["ssd"];
    check_keys(s, "ssd", {"signal", "flank_low", "flank_high"});
    if (s.contains("signal")) c.bands.signal = band(s["signal"]);
    if (s.contains("flank_low")) c.bands.flank_low = band(s["flank_low"]);
    if (s.contains("flank_high")) c.bands.flank_high = band(s["flank_high"]);
  }

  if (j.contains("augment")) {
    const auto& a = j["augment"];
    check_keys(a, "augment",
               {"n_variants", "min_shift", "components", "k", "threshold", "seed", "max_rotation_deg"});
    auto& ac = c.augmentation;
    get(a, "n_variants", ac.n_variants);
    get(a, "min_shift", ac.min_shift);
    get(a, "k", ac.components.k);
    get(a, "threshold", ac.components.threshold);
    get(a, "seed", ac.seed);
    get(a, "max_rotation_deg", ac.max_rotation_deg);
    std::string mode;
    get(a, "components", mode);
    if (mode == "all") ac.components.mode = augment::SelectionMode::All;
    else if (mode == "strongest-k") ac.components.mode = augment::SelectionMode::StrongestK;
    else if (mode == "quality-gated") ac.components.mode = augment::SelectionMode::QualityGated;
    else if (!mode.empty())
      misconfigured("augment.components must be \"all\", \"strongest-k\" or \"quality-gated\"");
  }

  if (j.contains("eval")) {
    const auto& e = j["eval"];
    check_keys(e, "eval",
               {"k", "n_variants", "test_trials_per_target", "seeds", "segment_before_s",
                "segment_after_s", "band", "epoch_offset_s", "epoch_duration_s",
                "laplacian_centers"});
    auto& ec = c.eval;
    get(e, "k", ec.k);
    get(e, "n_variants", ec.n_variants);
    get(e, "test_trials_per_target", ec.test_trials_per_target);
    get(e, "seeds", ec.seeds);
    get(e, "segment_before_s", ec.segment.before_s);
    get(e, "segment_after_s", ec.segment.after_s);
    if (e.contains("band")) {
      const auto b = band(e["band"]);
      ec.features.band_low_hz = b.low_hz;
      ec.features.band_high_hz = b.high_hz;
    }
    get(e, "epoch_offset_s", ec.features.window.offset_s);
    get(e, "epoch_duration_s", ec.features.window.duration_s);
    get(e, "laplacian_centers", ec.features.centers);
  }
  c.eval.augmentation = c.augmentation;
  c.eval.bands = c.bands;
  return c;
}

Config read_config(const fs::path& path) { return config_from_json(read_json(path)); }

json read_json(const fs::path& path) {
  auto is = open_in(path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    io_error("cannot parse '" + path.string() + "': " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const fs::path& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
  if (!os) io_error("write to '" + path.string() + "' failed");
}

}  // namespace dipoleforge::io

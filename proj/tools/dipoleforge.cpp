// dipoleforge command-line interface.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dipoleforge/augment.hpp"
#include "dipoleforge/classify.hpp"
#include "dipoleforge/dipolefit.hpp"
#include "dipoleforge/error.hpp"
#include "dipoleforge/harness.hpp"
#include "dipoleforge/io.hpp"
#include "dipoleforge/kernels.hpp"
#include "dipoleforge/ssd.hpp"
#include "dipoleforge/synthscene.hpp"

namespace fs = std::filesystem;
using namespace dipoleforge;
using nlohmann::json;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool out_required = true) {
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--config", c.config, "JSON configuration file")->check(CLI::ExistingFile);
  auto* out = cmd->add_option("--out", c.out, "Output path");
  if (out_required) out->required();
}

io::Config load_config(const Common& c) {
  return c.config.empty() ? io::Config{} : io::read_config(c.config);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Configuration: return 2;
    case ErrorKind::Io: return 4;
    default: return 3;
  }
}

int fail(std::string_view kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << std::endl;
  return code;
}

/// Loads a head model file if given, otherwise builds one from the config.
struct ModelHandle {
  std::optional<io::LoadedHeadModel> loaded;
  std::optional<headmodel::HeadModel> built;
  const headmodel::HeadModel& model() const { return loaded ? loaded->model : *built; }
  dipolefit::MusicScanner scanner() const {
    if (loaded && loaded->leadfields) return dipolefit::MusicScanner(loaded->model, *loaded->leadfields);
    return dipolefit::MusicScanner(model());
  }
};

ModelHandle open_model(const std::string& path, const io::Config& cfg) {
  ModelHandle h;
  if (!path.empty()) h.loaded = io::read_head_model(path);
  else h.built.emplace(cfg.headmodel);
  return h;
}

std::vector<harness::Participant> read_dataset(const fs::path& dir) {
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory() && fs::exists(e.path() / "meta.json")) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<harness::Participant> out;
  for (const auto& d : dirs) out.push_back({d.filename().string(), io::read_recording(d)});
  if (out.empty()) throw Error(ErrorKind::Io, "no recording directories under '" + dir.string() + "'");
  return out;
}

std::string participant_id(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "P%02zu", i + 1);
  return buf;
}

std::vector<harness::Participant> synthesize(const headmodel::HeadModel& model,
                                             const synthscene::SceneConfig& scene,
                                             std::vector<synthscene::GroundTruth>* truths) {
  std::vector<synthscene::VirtualParticipant> vps(scene.n_participants);
  const auto n = static_cast<std::ptrdiff_t>(scene.n_participants);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    vps[static_cast<std::size_t>(i)] =
        synthscene::generate_virtual_participant(model, scene, static_cast<std::size_t>(i));
  std::vector<harness::Participant> out;
  for (std::size_t i = 0; i < vps.size(); ++i) {
    out.push_back({participant_id(i), std::move(vps[i].recording)});
    if (truths) truths->push_back(std::move(vps[i].truth));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dipole-shift data augmentation for EEG motor-imagery classification"};
  app.require_subcommand(1);

  Common c;
  std::string model_path, input, data_dir, results_path, lda_out;
  std::size_t participants = 0, n_variants = 0, k = 0, n_components = 0;
  std::optional<double> min_shift, grid_spacing;
  std::vector<std::uint64_t> seeds;
  bool synthetic = false;

  auto* model_cmd = app.add_subcommand("model", "Build a head model and its leadfield cache");
  add_common(model_cmd, c);
  model_cmd->add_option("--grid-spacing", grid_spacing, "Voxel grid spacing in meters");

  auto* synth_cmd = app.add_subcommand("synth", "Generate virtual participants with ground truth");
  add_common(synth_cmd, c);
  synth_cmd->add_option("--model", model_path, "headmodel.json");
  synth_cmd->add_option("--participants", participants, "Number of participants");

  auto* ssd_cmd = app.add_subcommand("ssd", "Spatio-spectral decomposition of a recording");
  add_common(ssd_cmd, c);
  ssd_cmd->add_option("--input", input, "Recording directory")->required();
  ssd_cmd->add_option("--components", n_components, "Keep this many components (0 = all)");

  auto* fit_cmd = app.add_subcommand("fit", "Fit a dipole to every SSD pattern of a recording");
  add_common(fit_cmd, c);
  fit_cmd->add_option("--input", input, "Recording directory")->required();
  fit_cmd->add_option("--model", model_path, "headmodel.json");
  fit_cmd->add_option("--components", n_components, "Fit only the strongest components (0 = all)");

  auto* aug_cmd = app.add_subcommand("augment", "Generate imaginary participants from a recording");
  add_common(aug_cmd, c);
  aug_cmd->add_option("--input", input, "Recording directory")->required();
  aug_cmd->add_option("--model", model_path, "headmodel.json");
  aug_cmd->add_option("--n", n_variants, "N, including the original");
  aug_cmd->add_option("--min-shift", min_shift, "Minimum dipole shift in meters");

  auto* eval_cmd = app.add_subcommand("eval", "Leave-one-subject-out evaluation, N=1 vs N");
  add_common(eval_cmd, c);
  auto* data_opt = eval_cmd->add_option("--data", data_dir, "Directory of recording directories");
  eval_cmd->add_flag("--synthetic", synthetic, "Evaluate on a synthesized dataset")->excludes(data_opt);
  eval_cmd->add_option("--model", model_path, "headmodel.json");
  eval_cmd->add_option("--k", k, "Training trials per class per participant");
  eval_cmd->add_option("--n", n_variants, "N, including the original");
  eval_cmd->add_option("--seeds", seeds, "Evaluation seeds")->delimiter(',');
  eval_cmd->add_option("--participants", participants, "Synthetic participants");
  eval_cmd->add_option("--lda-out", lda_out, "Also write an LDA trained on every original trial");

  auto* report_cmd = app.add_subcommand("report", "Summarize a results.json");
  add_common(report_cmd, c, false);
  report_cmd->add_option("--results", results_path, "results.json")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    kernels::configure_threads_from_env();
    auto cfg = load_config(c);
    if (c.seed) {
      cfg.scene.seed = *c.seed;
      cfg.augmentation.seed = *c.seed;
    }

    if (model_cmd->parsed()) {
      if (grid_spacing) cfg.headmodel.grid_spacing = *grid_spacing;
      const headmodel::HeadModel model(cfg.headmodel);
      io::write_head_model(c.out, model, kernels::leadfield_table(model));
      std::cout << model.voxel_count() << " voxels, " << model.channel_count() << " channels\n";
    } else if (synth_cmd->parsed()) {
      if (participants > 0) cfg.scene.n_participants = participants;
      const auto h = open_model(model_path, cfg);
      std::vector<synthscene::GroundTruth> truths;
      const auto dataset = synthesize(h.model(), cfg.scene, &truths);
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        const fs::path dir = fs::path(c.out) / dataset[i].id;
        io::write_recording(dir, dataset[i].recording);
        MultichannelRecording sources;
        sources.data = truths[i].source_time_courses;
        sources.sample_rate = dataset[i].recording.sample_rate;
        for (std::size_t d = 0; d < truths[i].dipoles.size(); ++d)
          sources.channel_labels.push_back(truths[i].dipoles[d].role + std::to_string(d));
        sources.metadata["unit"] = "nAm";
        io::write_recording(dir / "sources", sources);
      }
      io::write_ground_truth(fs::path(c.out) / "ground_truth.json", truths);
    } else if (ssd_cmd->parsed()) {
      const auto rec = io::read_recording(input);
      const auto res = ssd::ssd_decompose(
          rec, cfg.bands, n_components > 0 ? std::optional<std::size_t>(n_components) : std::nullopt);
      io::write_ssd(c.out, res, cfg.bands, rec.channel_labels);
    } else if (fit_cmd->parsed()) {
      const auto rec = io::read_recording(input);
      const auto h = open_model(model_path, cfg);
      const auto scanner = h.scanner();
      const auto res = ssd::ssd_decompose(
          rec, cfg.bands, n_components > 0 ? std::optional<std::size_t>(n_components) : std::nullopt);
      json fits = json::array();
      for (Eigen::Index i = 0; i < res.decomposition.patterns.cols(); ++i)
        fits.push_back(io::to_json(
            scanner.fit(res.decomposition.patterns.col(i), static_cast<std::size_t>(i)), h.model()));
      io::write_json(c.out, {{"format", "dipoleforge.fits"}, {"version", 1}, {"fits", fits}});
    } else if (aug_cmd->parsed()) {
      if (n_variants > 0) cfg.augmentation.n_variants = n_variants;
      if (min_shift) cfg.augmentation.min_shift = *min_shift;
      const auto rec = io::read_recording(input);
      const auto h = open_model(model_path, cfg);
      const auto res = augment::generate_participant(rec, h.scanner(), cfg.augmentation, cfg.bands);
      for (std::size_t j = 0; j < res.variants.size(); ++j)
        io::write_recording(fs::path(c.out) / ("variant_" + std::to_string(j + 1)), res.variants[j]);
      io::write_augmentation_report(fs::path(c.out) / "augmentation_report.json", res.report,
                                    h.model());
    } else if (eval_cmd->parsed()) {
      auto ecfg = cfg.eval;
      if (k > 0) ecfg.k = k;
      if (n_variants > 0) ecfg.n_variants = n_variants;
      if (!seeds.empty()) ecfg.seeds = seeds;
      if (participants > 0) cfg.scene.n_participants = participants;
      if (!synthetic && data_dir.empty())
        return fail("usage", "eval needs --data <dir> or --synthetic", 2);
      const auto h = open_model(model_path, cfg);
      const auto dataset = synthetic ? synthesize(h.model(), cfg.scene, nullptr) : read_dataset(data_dir);
      const auto result = harness::loso_evaluate(dataset, h.scanner(), ecfg);
      io::write_results(c.out, result);
      std::cout << io::format_report(result);
      if (!lda_out.empty()) {
        std::vector<classify::FeatureSet> sets;
        Eigen::MatrixXd x;
        std::vector<int> y;
        for (const auto& p : dataset) {
          const auto f = classify::compute_features(p.recording, ecfg.features);
          x.conservativeResize(x.rows() + f.features.rows(), f.features.cols());
          x.bottomRows(f.features.rows()) = f.features;
          y.insert(y.end(), f.labels.begin(), f.labels.end());
          sets.push_back(f);
        }
        auto lda = classify::lda_train(x, y);
        lda.channel_labels = sets.front().channel_labels;
        io::write_lda(lda_out, lda);
      }
      if (!result.audits_passed()) return fail("leakage", "no-leakage audit failed", 5);
    } else if (report_cmd->parsed()) {
      const auto result = io::eval_result_from_json(io::read_json(results_path));
      std::cout << io::format_report(result);
      if (!c.out.empty()) io::write_results(c.out, result);
    }
  } catch (const Error& e) {
    return fail(to_string(e.kind()), e.what(), exit_code(e.kind()));
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}

#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "treetrack/ablation.hpp"
#include "treetrack/config.hpp"
#include "treetrack/metrics.hpp"
#include "treetrack/model_tree.hpp"
#include "treetrack/tracker.hpp"
#include "treetrack/vot.hpp"

namespace treetrack {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string mode;
  std::string out_dir = ".";
};

struct SequenceSource {
  std::string dir;  // empty: generate from the synth settings
  std::string preset = "easy";
  bool one_based = false;
};

/// Raised for bad input data; maps to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

KeyValues load_config(const GlobalOptions& g) {
  if (g.config_path.empty()) return {};
  KeyValues kv = read_key_values_file(g.config_path);
  check_known_keys(kv);
  return kv;
}

TrackerConfig tracker_config(const GlobalOptions& g, const KeyValues& kv) {
  TrackerConfig cfg;
  apply_tracker_config(cfg, kv);
  if (g.seed) cfg.seed = *g.seed;
  if (!g.mode.empty()) cfg.mode = parse_mode(g.mode);
  return cfg;
}

SynthConfig synth_config(const std::string& preset, const KeyValues& kv) {
  SynthConfig cfg;
  if (preset == "easy") {
    cfg = SynthConfig::easy(1);
  } else if (preset == "multimodal") {
    cfg = SynthConfig::multimodal(1);
  } else {
    throw ConfigError("unknown preset '" + preset + "' (easy or multimodal)");
  }
  // The presets derive their schedule from the length, so rebuild after it is known.
  if (const auto it = kv.find("length"); it != kv.end()) {
    KeyValues only_length{{"length", it->second}};
    apply_synth_config(cfg, only_length);
    cfg = preset == "easy" ? SynthConfig::easy(cfg.seed, cfg.length)
                           : SynthConfig::multimodal(cfg.seed, cfg.length);
  }
  apply_synth_config(cfg, kv);
  return cfg;
}

Sequence load_sequence(const SequenceSource& src, const KeyValues& kv) {
  if (!src.dir.empty()) {
    return read_sequence(src.dir, src.one_based ? PixelOrigin::OneBased : PixelOrigin::ZeroBased);
  }
  return gen_synthetic(synth_config(src.preset, kv));
}

fs::path ensure_out(const GlobalOptions& g) {
  fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
}

void add_source_options(CLI::App* cmd, SequenceSource& src) {
  cmd->add_option("--sequence", src.dir, "Directory with NNNNNN.pgm/ppm frames and groundtruth.txt");
  cmd->add_option("--preset", src.preset, "Synthetic preset when no --sequence is given")
      ->check(CLI::IsMember({"easy", "multimodal"}));
  cmd->add_flag("--one-based", src.one_based, "Ground-truth coordinates are 1-based");
}

int cmd_synth(const GlobalOptions& g, const std::string& preset, std::ostream& out) {
  const KeyValues kv = load_config(g);
  SynthConfig cfg = synth_config(preset, kv);
  if (g.seed) cfg.seed = *g.seed;
  const Sequence seq = gen_synthetic(cfg);
  const fs::path dir = ensure_out(g);
  write_sequence(seq, dir.string());
  out << "wrote " << seq.size() << " frames to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_track(const GlobalOptions& g, const SequenceSource& src, bool snapshot, bool dot,
              std::ostream& out) {
  const KeyValues kv = load_config(g);
  const TrackerConfig cfg = tracker_config(g, kv);
  const Sequence seq = load_sequence(src, kv);
  seq.validate();
  const RunResult result = run(seq.frames, seq.ground_truth[0], cfg);
  const fs::path dir = ensure_out(g);
  write_boxes_file((dir / "trajectory.txt").string(), result.trajectory);
  if (snapshot) {
    write_text(dir / "tree.json", tree_to_json(result.session.tree(), tracker_config_echo(cfg)));
  }
  if (dot) write_text(dir / "tree.dot", export_dot(result.session.tree()));
  const EvalReport report = otb_metrics(result.trajectory, seq.ground_truth);
  out << "tracked " << seq.size() << " frames, " << result.session.tree().size()
      << " models, precision@20=" << format_number(report.precision_20)
      << " auc=" << format_number(report.auc) << "\n";
  return kExitOk;
}

int cmd_eval(const GlobalOptions& g, const std::string& trajectory, const std::string& truth,
             bool one_based, std::ostream& out) {
  const auto tr = read_boxes_file(trajectory);
  const auto gt = read_boxes_file(truth, one_based ? PixelOrigin::OneBased : PixelOrigin::ZeroBased);
  if (tr.size() != gt.size()) {
    throw DataError("trajectory has " + std::to_string(tr.size()) + " boxes but ground truth has " +
                    std::to_string(gt.size()));
  }
  const EvalReport report = otb_metrics(tr, gt);
  const fs::path dir = ensure_out(g);
  write_text(dir / "report.json", report_to_json(report));
  write_text(dir / "curves.csv", curves_to_csv(report));
  out << "precision@20=" << format_number(report.precision_20)
      << " success@0.5=" << format_number(report.success_50) << " auc=" << format_number(report.auc)
      << "\n";
  return kExitOk;
}

int cmd_vot(const GlobalOptions& g, const SequenceSource& src, std::ostream& out) {
  const KeyValues kv = load_config(g);
  const TrackerConfig cfg = tracker_config(g, kv);
  const Sequence seq = load_sequence(src, kv);
  const EvalReport report = vot_run(cfg, seq);
  const fs::path dir = ensure_out(g);
  write_text(dir / "vot_report.json", report_to_json(report));
  out << "accuracy=" << format_number(report.vot->accuracy) << " failures=" << report.vot->failures
      << "\n";
  return kExitOk;
}

int cmd_ablate(const GlobalOptions& g, std::ostream& out) {
  const KeyValues kv = load_config(g);
  const TrackerConfig base = tracker_config(g, kv);
  SuiteConfig suite;
  apply_suite_config(suite, kv);
  if (g.seed) suite.seeds = {*g.seed};
  std::vector<Sequence> seqs;
  for (int i = 0; i < suite.sequences; ++i) {
    SynthConfig sc = synth_config(suite.preset, kv);
    sc.seed = sc.seed + static_cast<std::uint64_t>(i);
    sc.name = suite.preset + "_" + std::to_string(sc.seed);
    seqs.push_back(gen_synthetic(sc));
  }
  const AblationTable table = ablate(seqs, base, suite.seeds);
  const fs::path dir = ensure_out(g);
  const std::string csv = table.to_csv();
  write_text(dir / "ablation.csv", csv);
  out << csv;
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tree-structured ensemble visual tracker", "treetrack"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Tracker seed (synthetic seed for `synth`)");
  app.add_option("--config", g.config_path, "key=value configuration file");
  app.add_option("--mode", g.mode, "TCNN, Tree_max, Tree_mean, Linear_mean or Linear_single")
      ->check(CLI::Validator(
          [](std::string& text) {
            try {
              parse_mode(text);
            } catch (const std::invalid_argument& e) {
              return std::string(e.what());
            }
            return std::string();
          },
          "MODE"));
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();

  std::string synth_preset = "easy";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic sequence");
  synth->add_option("--preset", synth_preset, "easy or multimodal")
      ->check(CLI::IsMember({"easy", "multimodal"}));

  SequenceSource track_src;
  bool snapshot = false, dot = false;
  auto* track = app.add_subcommand("track", "Track a sequence and write trajectory.txt");
  add_source_options(track, track_src);
  track->add_flag("--snapshot", snapshot, "Also write tree.json");
  track->add_flag("--dot", dot, "Also write tree.dot");

  std::string trajectory, truth;
  bool eval_one_based = false;
  auto* eval = app.add_subcommand("eval", "Score a trajectory against ground truth");
  eval->add_option("trajectory", trajectory, "Trajectory file")->required();
  eval->add_option("groundtruth", truth, "Ground-truth file")->required();
  eval->add_flag("--one-based", eval_one_based, "Ground-truth coordinates are 1-based");

  SequenceSource vot_src;
  auto* vot = app.add_subcommand("vot", "Run the re-initialization protocol");
  add_source_options(vot, vot_src);

  auto* abl = app.add_subcommand("ablate", "Compare the five estimation modes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth) return cmd_synth(g, synth_preset, out);
    if (*track) return cmd_track(g, track_src, snapshot, dot, out);
    if (*eval) return cmd_eval(g, trajectory, truth, eval_one_based, out);
    if (*vot) return cmd_vot(g, vot_src, out);
    if (*abl) return cmd_ablate(g, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace treetrack

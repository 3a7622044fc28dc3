#include "treetrack/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace treetrack {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError("invalid value for '" + key + "': '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "on" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "off" || text == "no") return false;
  throw ConfigError("invalid boolean for '" + key + "': '" + text + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
void set_if(const KeyValues& kv, const char* key, T& target) {
  const auto it = kv.find(key);
  if (it == kv.end()) return;
  if constexpr (std::is_same_v<T, bool>) {
    target = parse_bool(key, it->second);
  } else {
    target = parse_number<T>(key, it->second);
  }
}

const std::set<std::string>& tracker_keys() {
  static const std::set<std::string> keys{
      "n_candidates", "sigma_xy",     "sigma_s",        "scale_base",   "init_lr",
      "init_iterations", "online_lr", "online_iterations", "momentum",  "weight_decay",
      "batch_pos",    "batch_neg",    "delta",          "active_size",  "n_pos",
      "n_neg",        "iou_pos",      "iou_neg",        "mode",         "bbr",
      "bbr_lambda",   "bbr_iou_gate", "hidden",         "patch_size",   "seed",
      "pos_sigma_xy", "pos_sigma_s",  "neg_sigma_xy",   "neg_sigma_s",  "retry_factor"};
  return keys;
}

const std::set<std::string>& synth_keys() {
  static const std::set<std::string> keys{
      "frame_width", "frame_height", "channels",  "length",        "target_width",
      "target_height", "motion_std", "modes",     "mode_switches", "occlusions", "transition_frames",
      "clutter_density", "noise_std", "synth_seed", "name"};
  return keys;
}

const std::set<std::string>& suite_keys() {
  static const std::set<std::string> keys{"suite_sequences", "suite_seeds", "suite_preset"};
  return keys;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_key_values(in);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split(text, ',')) seeds.push_back(parse_number<std::uint64_t>("seeds", item));
  if (seeds.empty()) throw ConfigError("seed list is empty");
  return seeds;
}

void apply_tracker_config(TrackerConfig& c, const KeyValues& kv) {
  set_if(kv, "n_candidates", c.sampling.n_candidates);
  set_if(kv, "sigma_xy", c.sampling.sigma_xy_factor);
  set_if(kv, "sigma_s", c.sampling.sigma_s);
  set_if(kv, "scale_base", c.sampling.scale_base);
  set_if(kv, "init_lr", c.initial_sgd.learning_rate);
  set_if(kv, "init_iterations", c.initial_sgd.iterations);
  set_if(kv, "online_lr", c.online_sgd.learning_rate);
  set_if(kv, "online_iterations", c.online_sgd.iterations);
  if (kv.count("momentum")) {
    set_if(kv, "momentum", c.initial_sgd.momentum);
    c.online_sgd.momentum = c.initial_sgd.momentum;
  }
  if (kv.count("weight_decay")) {
    set_if(kv, "weight_decay", c.initial_sgd.weight_decay);
    c.online_sgd.weight_decay = c.initial_sgd.weight_decay;
  }
  if (kv.count("batch_pos")) {
    set_if(kv, "batch_pos", c.initial_sgd.batch_pos);
    c.online_sgd.batch_pos = c.initial_sgd.batch_pos;
  }
  if (kv.count("batch_neg")) {
    set_if(kv, "batch_neg", c.initial_sgd.batch_neg);
    c.online_sgd.batch_neg = c.initial_sgd.batch_neg;
  }
  set_if(kv, "delta", c.delta);
  set_if(kv, "active_size", c.active_size);
  set_if(kv, "n_pos", c.n_pos);
  set_if(kv, "n_neg", c.n_neg);
  set_if(kv, "iou_pos", c.iou_pos);
  set_if(kv, "iou_neg", c.iou_neg);
  if (const auto it = kv.find("mode"); it != kv.end()) {
    try {
      c.mode = parse_mode(it->second);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  set_if(kv, "bbr", c.bbr_enabled);
  set_if(kv, "bbr_lambda", c.bbr_lambda);
  set_if(kv, "bbr_iou_gate", c.bbr_iou_gate);
  set_if(kv, "hidden", c.hidden);
  set_if(kv, "patch_size", c.patch_size);
  set_if(kv, "seed", c.seed);
  set_if(kv, "pos_sigma_xy", c.pos_sigma_xy);
  set_if(kv, "pos_sigma_s", c.pos_sigma_s);
  set_if(kv, "neg_sigma_xy", c.neg_sigma_xy);
  set_if(kv, "neg_sigma_s", c.neg_sigma_s);
  set_if(kv, "retry_factor", c.retry_factor);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid tracker config: ") + e.what());
  }
}

void apply_synth_config(SynthConfig& c, const KeyValues& kv) {
  set_if(kv, "frame_width", c.frame_width);
  set_if(kv, "frame_height", c.frame_height);
  set_if(kv, "channels", c.channels);
  set_if(kv, "length", c.length);
  set_if(kv, "target_width", c.target_width);
  set_if(kv, "target_height", c.target_height);
  set_if(kv, "motion_std", c.motion_std);
  set_if(kv, "modes", c.appearance_modes);
  set_if(kv, "transition_frames", c.transition_frames);
  set_if(kv, "clutter_density", c.clutter_density);
  set_if(kv, "noise_std", c.noise_std);
  set_if(kv, "synth_seed", c.seed);
  if (const auto it = kv.find("name"); it != kv.end()) c.name = it->second;
  if (const auto it = kv.find("mode_switches"); it != kv.end()) {
    c.mode_switches.clear();
    for (const auto& s : split(it->second, ',')) c.mode_switches.push_back(parse_number<int>("mode_switches", s));
  }
  if (const auto it = kv.find("occlusions"); it != kv.end()) {
    // start:duration:coverage entries separated by ';'
    c.occlusions.clear();
    for (const auto& ev : split(it->second, ';')) {
      const auto parts = split(ev, ':');
      if (parts.size() != 3) throw ConfigError("occlusion entries are start:duration:coverage");
      c.occlusions.push_back({parse_number<int>("occlusions", parts[0]),
                              parse_number<int>("occlusions", parts[1]),
                              parse_number<double>("occlusions", parts[2])});
    }
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid synthetic config: ") + e.what());
  }
}

void apply_suite_config(SuiteConfig& c, const KeyValues& kv) {
  set_if(kv, "suite_sequences", c.sequences);
  if (const auto it = kv.find("suite_seeds"); it != kv.end()) c.seeds = parse_seed_list(it->second);
  if (const auto it = kv.find("suite_preset"); it != kv.end()) c.preset = it->second;
  if (c.sequences < 1) throw ConfigError("suite_sequences must be >= 1");
  if (c.preset != "multimodal" && c.preset != "easy") {
    throw ConfigError("suite_preset must be 'multimodal' or 'easy'");
  }
}

void check_known_keys(const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (!tracker_keys().count(key) && !synth_keys().count(key) && !suite_keys().count(key)) {
      throw ConfigError("unknown config key: " + key);
    }
  }
}

KeyValues tracker_config_echo(const TrackerConfig& c) {
  auto num = [](double v) { return format_number(v); };
  return {
      {"n_candidates", std::to_string(c.sampling.n_candidates)},
      {"sigma_xy", num(c.sampling.sigma_xy_factor)},
      {"sigma_s", num(c.sampling.sigma_s)},
      {"scale_base", num(c.sampling.scale_base)},
      {"init_lr", num(c.initial_sgd.learning_rate)},
      {"init_iterations", std::to_string(c.initial_sgd.iterations)},
      {"online_lr", num(c.online_sgd.learning_rate)},
      {"online_iterations", std::to_string(c.online_sgd.iterations)},
      {"momentum", num(c.online_sgd.momentum)},
      {"weight_decay", num(c.online_sgd.weight_decay)},
      {"batch_pos", std::to_string(c.online_sgd.batch_pos)},
      {"batch_neg", std::to_string(c.online_sgd.batch_neg)},
      {"delta", std::to_string(c.delta)},
      {"active_size", std::to_string(c.active_size)},
      {"n_pos", std::to_string(c.n_pos)},
      {"n_neg", std::to_string(c.n_neg)},
      {"iou_pos", num(c.iou_pos)},
      {"iou_neg", num(c.iou_neg)},
      {"mode", to_string(c.mode)},
      {"bbr", c.bbr_enabled ? "true" : "false"},
      {"bbr_lambda", num(c.bbr_lambda)},
      {"bbr_iou_gate", num(c.bbr_iou_gate)},
      {"hidden", std::to_string(c.hidden)},
      {"patch_size", std::to_string(c.patch_size)},
      {"seed", std::to_string(c.seed)},
      {"pos_sigma_xy", num(c.pos_sigma_xy)},
      {"pos_sigma_s", num(c.pos_sigma_s)},
      {"neg_sigma_xy", num(c.neg_sigma_xy)},
      {"neg_sigma_s", num(c.neg_sigma_s)},
      {"retry_factor", std::to_string(c.retry_factor)},
  };
}

}  // namespace treetrack

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "treetrack/synth.hpp"
#include "treetrack/tracker.hpp"

namespace treetrack {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string>;

/// `key = value` lines; '#' starts a comment; later keys override earlier ones.
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values_file(const std::string& path);

/// Settings for the `ablate` suite besides tracker and synth keys.
struct SuiteConfig {
  int sequences = 20;
  std::vector<std::uint64_t> seeds{1};
  std::string preset = "multimodal";  // or "easy"
};

/// Each apply_* reads the keys it knows and ignores the rest.
void apply_tracker_config(TrackerConfig& cfg, const KeyValues& kv);
void apply_synth_config(SynthConfig& cfg, const KeyValues& kv);
void apply_suite_config(SuiteConfig& cfg, const KeyValues& kv);

/// Throws ConfigError naming any key no section recognizes.
void check_known_keys(const KeyValues& kv);

/// Flat echo of every tracker setting, in the same key=value vocabulary.
KeyValues tracker_config_echo(const TrackerConfig& cfg);

std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace treetrack

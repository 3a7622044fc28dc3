#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treetrack/geometry.hpp"
#include "treetrack/image.hpp"
#include "treetrack/rng.hpp"

namespace treetrack {

struct OcclusionEvent {
  int start = 0;
  int duration = 0;
  double coverage = 0.5;  // fraction of the target width hidden (from the left)
};

/// Desk-scale synthetic sequence: a textured target doing a reflected random
/// walk over a cluttered static background, with appearance-mode switches
/// and occluders that track the target during scheduled events.
struct SynthConfig {
  int frame_width = 120;
  int frame_height = 120;
  int channels = 1;
  int length = 60;
  double target_width = 24.0;
  double target_height = 24.0;
  double motion_std = 1.0;      // random-walk step std, pixels per frame
  int appearance_modes = 1;
  std::vector<int> mode_switches;  // frames where the next mode starts
  int transition_frames = 0;       // cross-fade length ending at each switch
  std::vector<OcclusionEvent> occlusions;
  double clutter_density = 1.0;  // clutter blocks per 400 px^2
  double noise_std = 3.0;        // per-frame pixel noise
  std::uint64_t seed = 1;
  std::string name = "synthetic";

  void validate() const;

  /// Slow translation, one appearance mode, no occlusion.
  static SynthConfig easy(std::uint64_t seed, int length = 60);
  /// Two appearance modes (A -> B -> A) and one partial occlusion.
  static SynthConfig multimodal(std::uint64_t seed, int length = 80);
};

struct Sequence {
  std::string name;
  std::vector<Frame> frames;
  std::vector<BoundingBox> ground_truth;

  std::size_t size() const { return frames.size(); }
  void validate() const;
};

Sequence gen_synthetic(const SynthConfig& cfg);

/// Appearance mode active at `frame` under the config's switch schedule.
int mode_at(const SynthConfig& cfg, int frame);
/// Blend weight in [0, 1) of the upcoming mode during a cross-fade.
double transition_weight(const SynthConfig& cfg, int frame);

/// Directory layout: NNNNNN.pgm / NNNNNN.ppm (0-based index) plus groundtruth.txt.
void write_sequence(const Sequence& seq, const std::string& dir);
Sequence read_sequence(const std::string& dir, PixelOrigin origin = PixelOrigin::ZeroBased);

}  // namespace treetrack

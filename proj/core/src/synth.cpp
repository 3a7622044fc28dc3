#include "treetrack/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <regex>
#include <stdexcept>

namespace treetrack {

namespace fs = std::filesystem;

void SynthConfig::validate() const {
  if (frame_width < 8 || frame_height < 8) throw std::invalid_argument("frame too small");
  if (channels != 1 && channels != 3) throw std::invalid_argument("channels must be 1 or 3");
  if (length < 1) throw std::invalid_argument("sequence length must be >= 1");
  if (!(target_width > 1.0) || !(target_height > 1.0)) {
    throw std::invalid_argument("target size must exceed one pixel");
  }
  if (target_width >= frame_width || target_height >= frame_height) {
    throw std::invalid_argument("target is larger than the frame");
  }
  if (motion_std < 0.0 || noise_std < 0.0 || clutter_density < 0.0) {
    throw std::invalid_argument("synthetic noise parameters must be non-negative");
  }
  if (appearance_modes < 1) throw std::invalid_argument("need at least one appearance mode");
  if (transition_frames < 0) throw std::invalid_argument("transition_frames must be >= 0");
  for (const auto& e : occlusions) {
    if (e.duration < 0 || e.coverage < 0.0 || e.coverage > 1.0) {
      throw std::invalid_argument("invalid occlusion event");
    }
  }
}

SynthConfig SynthConfig::easy(std::uint64_t seed, int length) {
  SynthConfig c;
  c.seed = seed;
  c.length = length;
  c.motion_std = 1.0;
  c.name = "easy_" + std::to_string(seed);
  return c;
}

SynthConfig SynthConfig::multimodal(std::uint64_t seed, int length) {
  SynthConfig c;
  c.seed = seed;
  c.length = length;
  c.motion_std = 1.5;
  c.appearance_modes = 2;
  c.mode_switches = {length / 4, length / 2};
  c.transition_frames = 10;
  c.occlusions = {{(5 * length) / 8, 8, 0.6}};
  c.clutter_density = 1.5;
  c.name = "multimodal_" + std::to_string(seed);
  return c;
}

void Sequence::validate() const {
  if (frames.empty()) throw std::invalid_argument("sequence has no frames");
  if (frames.size() != ground_truth.size()) {
    throw std::invalid_argument("sequence frame and ground-truth counts differ");
  }
}

int mode_at(const SynthConfig& cfg, int frame) {
  int switches = 0;
  for (int s : cfg.mode_switches) {
    if (frame >= s) ++switches;
  }
  return switches % cfg.appearance_modes;
}

double transition_weight(const SynthConfig& cfg, int frame) {
  if (cfg.transition_frames <= 0) return 0.0;
  for (int s : cfg.mode_switches) {
    const int begin = s - cfg.transition_frames;
    if (frame >= begin && frame < s) {
      return static_cast<double>(frame - begin + 1) / (cfg.transition_frames + 1);
    }
  }
  return 0.0;
}

namespace {

constexpr std::uint32_t kLayoutStream = 1;
constexpr std::uint32_t kMotionStream = 2;
constexpr std::uint32_t kTextureStream = 3;
constexpr std::uint32_t kNoiseStream = 4;
constexpr std::uint32_t kOccluderStream = 5;
constexpr int kTextureCells = 6;

// kTextureCells^2 cell intensities per channel.
using Texture = std::vector<std::array<double, 3>>;

Texture make_texture(RngStream rng, double lo, double hi) {
  Texture t(kTextureCells * kTextureCells);
  for (auto& cell : t) {
    const double base = rng.uniform(lo, hi);
    for (auto& ch : cell) ch = std::clamp(base + rng.uniform(-20.0, 20.0), 0.0, 255.0);
  }
  return t;
}

const std::array<double, 3>& texel(const Texture& t, double u, double v) {
  const int i = std::clamp(static_cast<int>(v * kTextureCells), 0, kTextureCells - 1);
  const int j = std::clamp(static_cast<int>(u * kTextureCells), 0, kTextureCells - 1);
  return t[static_cast<std::size_t>(i) * kTextureCells + j];
}

double reflect(double v, double lo, double hi) {
  // A few passes handle steps larger than the allowed range.
  for (int k = 0; k < 8 && (v < lo || v > hi); ++k) {
    if (v < lo) v = 2.0 * lo - v;
    if (v > hi) v = 2.0 * hi - v;
  }
  return std::clamp(v, lo, hi);
}

}  // namespace

Sequence gen_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  const int W = cfg.frame_width, H = cfg.frame_height, C = cfg.channels;

  // Static background: vertical gradient plus random clutter blocks.
  std::vector<double> background(static_cast<std::size_t>(W) * H * C);
  {
    RngStream rng(cfg.seed, stream_id(kLayoutStream, 0));
    const double top = rng.uniform(60.0, 140.0);
    const double bottom = rng.uniform(60.0, 140.0);
    for (int y = 0; y < H; ++y) {
      const double g = top + (bottom - top) * y / (H - 1);
      for (int x = 0; x < W; ++x) {
        for (int c = 0; c < C; ++c) background[(static_cast<std::size_t>(y) * W + x) * C + c] = g;
      }
    }
    const int blocks = static_cast<int>(std::lround(cfg.clutter_density * W * H / 400.0));
    for (int b = 0; b < blocks; ++b) {
      const int bw = 3 + static_cast<int>(rng.below(12));
      const int bh = 3 + static_cast<int>(rng.below(12));
      const int bx = static_cast<int>(rng.below(static_cast<std::uint64_t>(W)));
      const int by = static_cast<int>(rng.below(static_cast<std::uint64_t>(H)));
      std::array<double, 3> value{};
      const double base = rng.uniform(0.0, 255.0);
      for (auto& v : value) v = std::clamp(base + rng.uniform(-30.0, 30.0), 0.0, 255.0);
      for (int y = by; y < std::min(H, by + bh); ++y) {
        for (int x = bx; x < std::min(W, bx + bw); ++x) {
          for (int c = 0; c < C; ++c) {
            background[(static_cast<std::size_t>(y) * W + x) * C + c] = value[c];
          }
        }
      }
    }
  }

  std::vector<Texture> textures;
  for (int m = 0; m < cfg.appearance_modes; ++m) {
    // Alternate bright and dark palettes so modes differ in layout and level.
    const bool bright = m % 2 == 0;
    textures.push_back(make_texture(RngStream(cfg.seed, stream_id(kTextureStream, m)),
                                    bright ? 120.0 : 0.0, bright ? 255.0 : 135.0));
  }
  std::vector<Texture> occluders;
  for (std::size_t e = 0; e < cfg.occlusions.size(); ++e) {
    occluders.push_back(make_texture(RngStream(cfg.seed, stream_id(kOccluderStream, e)), 0.0, 255.0));
  }

  Sequence seq;
  seq.name = cfg.name;
  RngStream motion(cfg.seed, stream_id(kMotionStream, 0));
  const double tw = cfg.target_width, th = cfg.target_height;
  const double lo_x = 0.5 * tw + 1.0, hi_x = W - 0.5 * tw - 1.0;
  const double lo_y = 0.5 * th + 1.0, hi_y = H - 0.5 * th - 1.0;
  double cx = motion.uniform(lo_x + 0.25 * (hi_x - lo_x), hi_x - 0.25 * (hi_x - lo_x));
  double cy = motion.uniform(lo_y + 0.25 * (hi_y - lo_y), hi_y - 0.25 * (hi_y - lo_y));

  for (int t = 0; t < cfg.length; ++t) {
    if (t > 0 && cfg.motion_std > 0.0) {
      cx = reflect(cx + cfg.motion_std * motion.normal(), lo_x, hi_x);
      cy = reflect(cy + cfg.motion_std * motion.normal(), lo_y, hi_y);
    }
    const BoundingBox box = BoundingBox::from_center(cx, cy, tw, th);
    const Texture& tex = textures[static_cast<std::size_t>(mode_at(cfg, t))];
    const double fade = transition_weight(cfg, t);
    const Texture& next_tex =
        textures[static_cast<std::size_t>((mode_at(cfg, t) + 1) % cfg.appearance_modes)];

    const OcclusionEvent* occ = nullptr;
    const Texture* occ_tex = nullptr;
    for (std::size_t e = 0; e < cfg.occlusions.size(); ++e) {
      const auto& ev = cfg.occlusions[e];
      if (t >= ev.start && t < ev.start + ev.duration) {
        occ = &ev;
        occ_tex = &occluders[e];
      }
    }

    RngStream noise(cfg.seed, stream_id(kNoiseStream, static_cast<std::uint64_t>(t)));
    Frame frame(W, H, C);
    for (int y = 0; y < H; ++y) {
      const double py = y + 0.5;
      for (int x = 0; x < W; ++x) {
        const double px = x + 0.5;
        const std::size_t at = (static_cast<std::size_t>(y) * W + x) * C;
        const bool inside = px >= box.x && px < box.right() && py >= box.y && py < box.bottom();
        const double u = (px - box.x) / tw;
        const double v = (py - box.y) / th;
        std::array<double, 3> target{};
        const std::array<double, 3>* src = nullptr;
        if (inside) {
          const auto& a = texel(tex, u, v);
          const auto& b = texel(next_tex, u, v);
          for (int c = 0; c < 3; ++c) target[c] = (1.0 - fade) * a[c] + fade * b[c];
          src = &target;
          if (occ && u < occ->coverage) src = &texel(*occ_tex, u / std::max(occ->coverage, 1e-9), v);
        }
        for (int c = 0; c < C; ++c) {
          const double base = src ? (*src)[c] : background[at + c];
          const double value = base + (cfg.noise_std > 0.0 ? cfg.noise_std * noise.normal() : 0.0);
          frame.data()[at + c] = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
        }
      }
    }
    seq.frames.push_back(std::move(frame));
    seq.ground_truth.push_back(box);
  }
  return seq;
}

void write_sequence(const Sequence& seq, const std::string& dir) {
  seq.validate();
  fs::create_directories(dir);
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu.%s", i, seq.frames[i].channels() == 1 ? "pgm" : "ppm");
    write_pnm((fs::path(dir) / name).string(), seq.frames[i]);
  }
  write_boxes_file((fs::path(dir) / "groundtruth.txt").string(), seq.ground_truth);
}

Sequence read_sequence(const std::string& dir, PixelOrigin origin) {
  if (!fs::is_directory(dir)) throw std::runtime_error("sequence directory not found: " + dir);
  static const std::regex frame_name(R"(\d{6}\.(pgm|ppm))");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() &&
        std::regex_match(entry.path().filename().string(), frame_name)) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  Sequence seq;
  seq.name = fs::path(dir).filename().string();
  for (const auto& f : files) seq.frames.push_back(read_pnm(f.string()));
  seq.ground_truth = read_boxes_file((fs::path(dir) / "groundtruth.txt").string(), origin);
  seq.validate();
  return seq;
}

}  // namespace treetrack

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace treetrack {

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 8-bit image, 1 (gray) or 3 (RGB) interleaved channels, row-major.
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, int channels, std::uint8_t fill = 0);
  Frame(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  const std::vector<std::uint8_t>& data() const { return data_; }
  std::vector<std::uint8_t>& data() { return data_; }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Binary PGM (P5) or PPM (P6), maxval <= 255.
Frame read_pnm(const std::string& path);
void write_pnm(const std::string& path, const Frame& frame);
Frame decode_pnm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_pnm(const Frame& frame);

}  // namespace treetrack

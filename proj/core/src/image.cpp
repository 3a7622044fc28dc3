#include "treetrack/image.hpp"

#include <cctype>
#include <fstream>
#include <iterator>

namespace treetrack {

Frame::Frame(int width, int height, int channels, std::uint8_t fill)
    : Frame(width, height, channels,
            std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                          std::max(height, 0) * std::max(channels, 0),
                                      fill)) {}

Frame::Frame(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width <= 0 || height <= 0) throw ImageError("frame dimensions must be positive");
  if (channels != 1 && channels != 3) throw ImageError("frame must have 1 or 3 channels");
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw ImageError("frame data length does not match width*height*channels");
  }
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  int next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw ImageError("malformed PNM header");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > 1'000'000) throw ImageError("PNM header value out of range");
    }
    return static_cast<int>(value);
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

Frame decode_pnm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw ImageError("not a binary PGM/PPM image");
  }
  const int channels = bytes[1] == '5' ? 1 : 3;
  HeaderReader reader(bytes);
  const int width = reader.next_int();
  const int height = reader.next_int();
  const int maxval = reader.next_int();
  if (maxval <= 0 || maxval > 255) throw ImageError("only 8-bit PNM images are supported");
  reader.advance(1);  // single whitespace after maxval
  const std::size_t need = static_cast<std::size_t>(width) * height * channels;
  if (reader.pos() + need > bytes.size()) throw ImageError("truncated PNM pixel data");
  std::vector<std::uint8_t> data(bytes.begin() + static_cast<std::ptrdiff_t>(reader.pos()),
                                 bytes.begin() + static_cast<std::ptrdiff_t>(reader.pos() + need));
  if (maxval != 255) {
    for (auto& v : data) v = static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
  }
  return Frame(width, height, channels, std::move(data));
}

std::vector<std::uint8_t> encode_pnm(const Frame& frame) {
  const std::string header = std::string(frame.channels() == 1 ? "P5" : "P6") + "\n" +
                             std::to_string(frame.width()) + " " +
                             std::to_string(frame.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), frame.data().begin(), frame.data().end());
  return out;
}

Frame read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot open image: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_pnm(bytes);
}

void write_pnm(const std::string& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageError("cannot write image: " + path);
  const auto bytes = encode_pnm(frame);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace treetrack

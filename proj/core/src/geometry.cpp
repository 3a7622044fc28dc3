#include "treetrack/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace treetrack {

BoundingBox::BoundingBox(double x_, double y_, double w_, double h_)
    : x(x_), y(y_), w(w_), h(h_) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) || !std::isfinite(h)) {
    throw GeometryError("bounding box has non-finite coordinates");
  }
  if (!(w > 0.0) || !(h > 0.0)) {
    throw GeometryError("bounding box must have positive width and height");
  }
}

BoundingBox BoundingBox::from_center(double cx, double cy, double w, double h) {
  return BoundingBox(cx - 0.5 * w, cy - 0.5 * h, w, h);
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  if (a == b) return 1.0;
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double center_error(const BoundingBox& a, const BoundingBox& b) {
  return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

BoundingBox state_to_box(const TargetState& state, double init_w, double init_h,
                         double scale_base) {
  if (!(init_w > 0.0) || !(init_h > 0.0)) {
    throw GeometryError("initial target size must be positive");
  }
  const double factor = std::pow(scale_base, state.s);
  return BoundingBox::from_center(state.cx, state.cy, init_w * factor, init_h * factor);
}

TargetState box_to_state(const BoundingBox& box, double init_w, double init_h,
                         double scale_base) {
  if (!(init_w > 0.0) || !(init_h > 0.0)) {
    throw GeometryError("initial target size must be positive");
  }
  const double log_ratio = 0.5 * (std::log(box.w / init_w) + std::log(box.h / init_h));
  return TargetState{box.center_x(), box.center_y(), log_ratio / std::log(scale_base)};
}

namespace {

double parse_field(std::string_view token, std::size_t line_no) {
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.front()))) {
    token.remove_prefix(1);
  }
  while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) {
    token.remove_suffix(1);
  }
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || token.empty()) {
    throw GeometryError("malformed box field on line " + std::to_string(line_no) + ": '" +
                        std::string(token) + "'");
  }
  return value;
}

}  // namespace

std::vector<BoundingBox> read_boxes(std::istream& in, PixelOrigin origin) {
  std::vector<BoundingBox> boxes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::replace(line.begin(), line.end(), '\t', ',');
    // Allow plain whitespace separation as well.
    if (line.find(',') == std::string::npos) {
      std::istringstream ws(line);
      std::string tok, joined;
      while (ws >> tok) joined += (joined.empty() ? "" : ",") + tok;
      line = joined;
    }

    std::vector<double> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(parse_field(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 4) {
      throw GeometryError("expected 4 fields on line " + std::to_string(line_no) + ", got " +
                          std::to_string(fields.size()));
    }
    const double shift = origin == PixelOrigin::OneBased ? 1.0 : 0.0;
    boxes.emplace_back(fields[0] - shift, fields[1] - shift, fields[2], fields[3]);
  }
  return boxes;
}

std::vector<BoundingBox> read_boxes_file(const std::string& path, PixelOrigin origin) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open box file: " + path);
  return read_boxes(in, origin);
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_boxes(std::ostream& out, const std::vector<BoundingBox>& boxes) {
  for (const auto& b : boxes) {
    out << format_number(b.x) << ',' << format_number(b.y) << ',' << format_number(b.w) << ','
        << format_number(b.h) << '\n';
  }
}

void write_boxes_file(const std::string& path, const std::vector<BoundingBox>& boxes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write box file: " + path);
  write_boxes(out, boxes);
}

}  // namespace treetrack

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace treetrack {

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Axis-aligned box with real-valued top-left corner and positive extent.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double h = 1.0;

  BoundingBox() = default;
  /// Throws GeometryError unless w > 0 and h > 0 (and all fields finite).
  BoundingBox(double x, double y, double w, double h);

  static BoundingBox from_center(double cx, double cy, double w, double h);

  double center_x() const { return x + 0.5 * w; }
  double center_y() const { return y + 0.5 * h; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Candidate state: box center plus a log-scale index relative to the
/// initial target size (width = init_w * base^s).
struct TargetState {
  double cx = 0.0;
  double cy = 0.0;
  double s = 0.0;

  friend bool operator==(const TargetState&, const TargetState&) = default;
};

inline constexpr double kDefaultScaleBase = 1.05;

double intersection_area(const BoundingBox& a, const BoundingBox& b);
double iou(const BoundingBox& a, const BoundingBox& b);
double center_error(const BoundingBox& a, const BoundingBox& b);

BoundingBox state_to_box(const TargetState& state, double init_w, double init_h,
                         double scale_base = kDefaultScaleBase);

// Non-isotropic size changes are projected onto s through the geometric mean
// of the width and height ratios.
TargetState box_to_state(const BoundingBox& box, double init_w, double init_h,
                         double scale_base = kDefaultScaleBase);

enum class PixelOrigin { ZeroBased, OneBased };

/// Reads `x,y,w,h` lines (comma, tab or whitespace separated). Blank lines and
/// lines starting with '#' are skipped. One-based input is shifted to 0-based.
std::vector<BoundingBox> read_boxes(std::istream& in,
                                    PixelOrigin origin = PixelOrigin::ZeroBased);
std::vector<BoundingBox> read_boxes_file(const std::string& path,
                                         PixelOrigin origin = PixelOrigin::ZeroBased);

/// Writes one `x,y,w,h` line per box using shortest round-trip formatting.
void write_boxes(std::ostream& out, const std::vector<BoundingBox>& boxes);
void write_boxes_file(const std::string& path, const std::vector<BoundingBox>& boxes);

std::string format_number(double value);

}  // namespace treetrack

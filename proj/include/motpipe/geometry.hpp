#pragma once

#include <array>

namespace motpipe {

// Axis-aligned box in t-l-w-h convention, sub-pixel coordinates.
// Origin at image top-left, y grows downward.
struct BBox {
    double left = 0.0;
    double top = 0.0;
    double width = 0.0;
    double height = 0.0;

    double right() const { return left + width; }
    double bottom() const { return top + height; }
    double area() const { return width * height; }
    double center_x() const { return left + width / 2.0; }
    double center_y() const { return top + height / 2.0; }

    bool valid() const { return width > 0.0 && height > 0.0; }

    // (cx, cy, aspect, height) with aspect = width / height.
    std::array<double, 4> to_xyah() const;
    static BBox from_xyah(double cx, double cy, double aspect, double height);

    BBox translated(double dx, double dy) const { return {left + dx, top + dy, width, height}; }
};

// |A∩B| / |A∪B|, in [0,1]. Throws std::invalid_argument on a degenerate box.
double iou(const BBox& a, const BBox& b);

// Generalized IoU: iou − (|C| − |A∪B|)/|C| with C the smallest enclosing box.
// In [-1,1]; negative for well-separated boxes.
double giou(const BBox& a, const BBox& b);

}  // namespace motpipe

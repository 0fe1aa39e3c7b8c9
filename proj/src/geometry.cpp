#include "motpipe/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace motpipe {

namespace {

void require_valid(const BBox& b, const char* who) {
    if (!b.valid()) {
        throw std::invalid_argument(std::string(who) + ": degenerate box (non-positive side)");
    }
}

double intersection_area(const BBox& a, const BBox& b) {
    // Clamp overlap extents at 0 before multiplying; zero-area overlaps stay exact.
    const double w = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.left, b.left));
    const double h = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top));
    return w * h;
}

}  // namespace

std::array<double, 4> BBox::to_xyah() const {
    return {center_x(), center_y(), width / height, height};
}

BBox BBox::from_xyah(double cx, double cy, double aspect, double height) {
    const double width = aspect * height;
    return {cx - width / 2.0, cy - height / 2.0, width, height};
}

double iou(const BBox& a, const BBox& b) {
    require_valid(a, "iou");
    require_valid(b, "iou");
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    return inter / uni;
}

double giou(const BBox& a, const BBox& b) {
    require_valid(a, "giou");
    require_valid(b, "giou");
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    const double hull_w = std::max(a.right(), b.right()) - std::min(a.left, b.left);
    const double hull_h = std::max(a.bottom(), b.bottom()) - std::min(a.top, b.top);
    const double hull = hull_w * hull_h;
    return inter / uni - (hull - uni) / hull;
}

}  // namespace motpipe

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <span>

#include "layoutkit/errors.hpp"

namespace layoutkit {

// Axis-aligned rectangle in page-pixel coordinates, top-left origin,
// y growing downward. Degenerate (zero-area) boxes are legal values.
struct BBox {
    double left = 0.0;
    double top = 0.0;
    double right = 0.0;
    double bottom = 0.0;

    double width() const { return right - left; }
    double height() const { return bottom - top; }
    double area() const { return width() * height(); }
    bool valid() const { return left <= right && top <= bottom; }

    BBox intersect(const BBox& other) const {
        BBox r{std::max(left, other.left), std::max(top, other.top),
               std::min(right, other.right), std::min(bottom, other.bottom)};
        if (r.left >= r.right || r.top >= r.bottom) {
            return BBox{0.0, 0.0, 0.0, 0.0};
        }
        return r;
    }

    BBox translated(double dx, double dy) const {
        return BBox{left + dx, top + dy, right + dx, bottom + dy};
    }

    bool operator==(const BBox&) const = default;
};

inline double intersection_area(const BBox& a, const BBox& b) {
    const double w = std::min(a.right, b.right) - std::max(a.left, b.left);
    const double h = std::min(a.bottom, b.bottom) - std::max(a.top, b.top);
    if (w <= 0.0 || h <= 0.0) return 0.0;
    return w * h;
}

// Intersection over union. Undefined when both boxes are degenerate.
inline double iou(const BBox& a, const BBox& b) {
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) {
        throw GeometryError("iou undefined: both boxes have zero area");
    }
    return inter / uni;
}

// Fraction of `inner` covered by `outer`. Undefined for zero-area `inner`.
inline double containment_fraction(const BBox& inner, const BBox& outer) {
    const double denom = inner.area();
    if (denom <= 0.0) {
        throw GeometryError(
            "containment_fraction undefined: inner box has zero area");
    }
    return intersection_area(inner, outer) / denom;
}

// Minimal axis-aligned rectangle enclosing every input box.
inline BBox union_bbox(std::span<const BBox> boxes) {
    if (boxes.empty()) {
        throw EmptyInputError("union_bbox requires at least one box");
    }
    BBox u = boxes.front();
    for (const BBox& b : boxes.subspan(1)) {
        u.left = std::min(u.left, b.left);
        u.top = std::min(u.top, b.top);
        u.right = std::max(u.right, b.right);
        u.bottom = std::max(u.bottom, b.bottom);
    }
    return u;
}

inline BBox union_bbox(std::initializer_list<BBox> boxes) {
    return union_bbox(std::span<const BBox>(boxes.begin(), boxes.size()));
}

}  // namespace layoutkit

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "dsstile/errors.hpp"

namespace dss {

// Coordinate frame a box lives in. "Image" means the scaled raster the tiler
// works on; "Original" is the native capture before any DSS downscaling.
enum class Frame : std::uint8_t { Tile, Image, Original };

inline const char* frame_name(Frame f) {
    switch (f) {
        case Frame::Tile: return "tile";
        case Frame::Image: return "image";
        case Frame::Original: return "original";
    }
    return "?";
}

// Axis-aligned box, top-left anchored, sizes in pixels.
struct BoxF {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;
    Frame frame = Frame::Image;
};

inline double area(const BoxF& b) {
    return (b.w > 0.0 && b.h > 0.0) ? b.w * b.h : 0.0;
}

// Intersection of two boxes in the same frame; degenerate result has w=h=0.
inline BoxF intersect(const BoxF& a, const BoxF& b) {
    if (a.frame != b.frame) {
        throw DomainError(std::string("intersect: frame mismatch (") +
                          frame_name(a.frame) + " vs " + frame_name(b.frame) + ")");
    }
    const double x0 = std::max(a.x, b.x);
    const double y0 = std::max(a.y, b.y);
    const double x1 = std::min(a.x + a.w, b.x + b.w);
    const double y1 = std::min(a.y + a.h, b.y + b.h);
    BoxF r;
    r.frame = a.frame;
    if (x1 > x0 && y1 > y0) {
        r.x = x0;
        r.y = y0;
        r.w = x1 - x0;
        r.h = y1 - y0;
    } else {
        r.x = x0;
        r.y = y0;
        r.w = 0.0;
        r.h = 0.0;
    }
    return r;
}

// Intersection-over-union. 0 when disjoint or either box is degenerate.
inline double iou(const BoxF& a, const BoxF& b) {
    if (a.frame != b.frame) {
        throw DomainError(std::string("iou: frame mismatch (") +
                          frame_name(a.frame) + " vs " + frame_name(b.frame) + ")");
    }
    const double aa = area(a);
    const double ab = area(b);
    if (aa <= 0.0 || ab <= 0.0) return 0.0;
    const double ai = area(intersect(a, b));
    if (ai <= 0.0) return 0.0;
    return ai / (aa + ab - ai);
}

} // namespace dss

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dsstile/errors.hpp"

namespace dss {

// 8-bit interleaved raster, row-major, origin at the top-left.
struct Raster {
    int width = 0;
    int height = 0;
    int channels = 3;
    std::vector<std::uint8_t> data;

    Raster() = default;
    Raster(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {
        if (w <= 0 || h <= 0 || c <= 0) throw DomainError("Raster: dimensions must be > 0");
    }

    bool valid() const {
        return width > 0 && height > 0 && channels > 0 &&
               data.size() == static_cast<std::size_t>(width) * height * channels;
    }

    int long_side() const { return std::max(width, height); }

    std::uint8_t& at(int x, int y, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

struct ScaledRaster {
    Raster raster;
    double scale_factor = 1.0; // target_long_side / native_long_side
};

namespace detail {

// Fractional pixel coverage of src interval [pos0, pos1) against integer cells.
// Walks cells [floor(pos0), ceil(pos1)) and hands (index, weight) to fn.
template <typename Fn>
inline void for_each_cell(double pos0, double pos1, int limit, Fn&& fn) {
    int i0 = static_cast<int>(std::floor(pos0));
    int i1 = static_cast<int>(std::ceil(pos1));
    i0 = std::max(i0, 0);
    i1 = std::min(i1, limit);
    for (int i = i0; i < i1; ++i) {
        const double lo = std::max(pos0, static_cast<double>(i));
        const double hi = std::min(pos1, static_cast<double>(i + 1));
        if (hi > lo) fn(i, hi - lo);
    }
}

} // namespace detail

// Downscale so the long side equals target_long_side, preserving aspect
// ratio (short side rounded to nearest pixel). Resampling is an exact box
// (area-average) filter: each output pixel is the mean of its fractional
// source footprint, accumulated in doubles and rounded once. Streams one
// accumulator row, so peak extra memory is a single source row.
inline ScaledRaster scale_raster(const Raster& img, int target_long_side) {
    if (!img.valid()) throw DomainError("scale_raster: invalid raster");
    if (target_long_side <= 0) throw DomainError("scale_raster: target must be > 0");
    const int native_long = img.long_side();
    if (target_long_side > native_long) {
        throw DomainError("scale_raster: upscale requested (" + std::to_string(target_long_side) +
                          " > native " + std::to_string(native_long) + ")");
    }
    const double scale = static_cast<double>(target_long_side) / native_long;
    if (target_long_side == native_long) {
        return {img, 1.0};
    }

    int out_w, out_h;
    if (img.width >= img.height) {
        out_w = target_long_side;
        out_h = std::max(1, static_cast<int>(std::llround(img.height * scale)));
    } else {
        out_h = target_long_side;
        out_w = std::max(1, static_cast<int>(std::llround(img.width * scale)));
    }

    const int ch = img.channels;
    if (ch > 16) throw DomainError("scale_raster: more than 16 channels unsupported");
    Raster out(out_w, out_h, ch);
    const double x_ratio = static_cast<double>(img.width) / out_w;
    const double y_ratio = static_cast<double>(img.height) / out_h;

    std::vector<double> row_acc(static_cast<std::size_t>(img.width) * ch);
    for (int oy = 0; oy < out_h; ++oy) {
        std::fill(row_acc.begin(), row_acc.end(), 0.0);
        const double sy0 = oy * y_ratio;
        const double sy1 = (oy + 1) * y_ratio;
        double y_cover = 0.0;
        detail::for_each_cell(sy0, sy1, img.height, [&](int sy, double wy) {
            y_cover += wy;
            const std::uint8_t* src = img.data.data() + static_cast<std::size_t>(sy) * img.width * ch;
            for (std::size_t k = 0; k < row_acc.size(); ++k) {
                row_acc[k] += wy * src[k];
            }
        });
        std::uint8_t* dst = out.data.data() + static_cast<std::size_t>(oy) * out_w * ch;
        for (int ox = 0; ox < out_w; ++ox) {
            const double sx0 = ox * x_ratio;
            const double sx1 = (ox + 1) * x_ratio;
            double x_cover = 0.0;
            double acc[16] = {}; // channels capped well below this in practice
            detail::for_each_cell(sx0, sx1, img.width, [&](int sx, double wx) {
                x_cover += wx;
                const double* cell = row_acc.data() + static_cast<std::size_t>(sx) * ch;
                for (int c = 0; c < ch; ++c) acc[c] += wx * cell[c];
            });
            const double norm = y_cover * x_cover;
            for (int c = 0; c < ch; ++c) {
                const long v = std::lround(acc[c] / norm);
                dst[static_cast<std::size_t>(ox) * ch + c] =
                    static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
            }
        }
    }
    return {std::move(out), scale};
}

} // namespace dss

#pragma once

// Overlapping tile geometry over a scaled raster, plus the coordinate maps
// between tile space and the original capture.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "dsstile/geometry.hpp"
#include "dsstile/raster.hpp"

namespace dss {

// One tile rectangle in scaled-image coordinates. Tiles keep the full N x N
// footprint whenever the image allows it; the edge tiles are shifted back
// instead of padded.
struct TileRegion {
    int x_off = 0;
    int y_off = 0;
    int width = 0;
    int height = 0;
    int row = 0;
    int col = 0;

    BoxF as_box() const {
        return BoxF{static_cast<double>(x_off), static_cast<double>(y_off),
                    static_cast<double>(width), static_cast<double>(height), Frame::Image};
    }

    bool operator==(const TileRegion&) const = default;
};

struct TilePlan {
    int image_w = 0;
    int image_h = 0;
    int tile_size_px = 0;
    double overlap_fraction = 0.0;
    int step_px = 0;
    int n_cols = 0;
    int n_rows = 0;
    std::vector<TileRegion> tiles; // row-major

    std::size_t tile_count() const { return tiles.size(); }
};

namespace detail {

// Offsets along one dimension of extent P: fixed stride, last tile anchored
// to the edge so nothing sticks out.
inline std::vector<int> axis_offsets(int extent, int tile, int step) {
    if (extent <= tile) return {0};
    const int n = static_cast<int>((extent - tile + step - 1) / step) + 1;
    std::vector<int> offs;
    offs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n - 1; ++i) offs.push_back(i * step);
    offs.push_back(extent - tile);
    return offs;
}

} // namespace detail

// step = N - round(N*overlap); tiles per dimension = 1 if P <= N, else
// ceil((P-N)/step) + 1. Guarantees full coverage and at least the requested
// overlap between neighbors.
inline TilePlan plan_tiles(int image_w, int image_h, int tile_size_px, double overlap_fraction) {
    if (image_w <= 0 || image_h <= 0) throw DomainError("plan_tiles: image dims must be > 0");
    if (tile_size_px <= 0) throw DomainError("plan_tiles: tile size must be > 0");
    if (!(overlap_fraction >= 0.0) || overlap_fraction >= 1.0) {
        throw DomainError("plan_tiles: overlap must be in [0, 1)");
    }
    const int overlap_px = static_cast<int>(std::llround(tile_size_px * overlap_fraction));
    const int step = tile_size_px - overlap_px;
    if (step < 1) throw DomainError("plan_tiles: overlap leaves a stride below one pixel");

    TilePlan plan;
    plan.image_w = image_w;
    plan.image_h = image_h;
    plan.tile_size_px = tile_size_px;
    plan.overlap_fraction = overlap_fraction;
    plan.step_px = step;

    const int tile_w = std::min(tile_size_px, image_w);
    const int tile_h = std::min(tile_size_px, image_h);
    const auto xs = detail::axis_offsets(image_w, tile_w, step);
    const auto ys = detail::axis_offsets(image_h, tile_h, step);
    plan.n_cols = static_cast<int>(xs.size());
    plan.n_rows = static_cast<int>(ys.size());
    plan.tiles.reserve(xs.size() * ys.size());
    for (int r = 0; r < plan.n_rows; ++r) {
        for (int c = 0; c < plan.n_cols; ++c) {
            plan.tiles.push_back(TileRegion{xs[static_cast<std::size_t>(c)],
                                            ys[static_cast<std::size_t>(r)],
                                            tile_w, tile_h, r, c});
        }
    }
    return plan;
}

// Non-overlapping cols x rows grid (training-set preparation). Cell sizes are
// ceil(P/cells); the last row/column is edge-anchored, so odd extents get a
// sliver of overlap rather than a short tile.
inline TilePlan plan_grid(int image_w, int image_h, int cols, int rows) {
    if (image_w <= 0 || image_h <= 0) throw DomainError("plan_grid: image dims must be > 0");
    if (cols < 1 || rows < 1) throw DomainError("plan_grid: grid must be at least 1x1");
    cols = std::min(cols, image_w);
    rows = std::min(rows, image_h);
    const int tile_w = (image_w + cols - 1) / cols;
    const int tile_h = (image_h + rows - 1) / rows;

    TilePlan plan;
    plan.image_w = image_w;
    plan.image_h = image_h;
    plan.tile_size_px = std::max(tile_w, tile_h);
    plan.overlap_fraction = 0.0;
    plan.step_px = tile_w;
    plan.n_cols = cols;
    plan.n_rows = rows;
    for (int r = 0; r < rows; ++r) {
        const int y = std::min(r * tile_h, image_h - tile_h);
        for (int c = 0; c < cols; ++c) {
            const int x = std::min(c * tile_w, image_w - tile_w);
            plan.tiles.push_back(TileRegion{x, y, tile_w, tile_h, r, c});
        }
    }
    return plan;
}

// Exact pixel copy of a region; no resampling.
inline Raster cut_tile(const Raster& img, const TileRegion& region) {
    if (!img.valid()) throw DomainError("cut_tile: invalid raster");
    if (region.x_off < 0 || region.y_off < 0 || region.width <= 0 || region.height <= 0 ||
        region.x_off + region.width > img.width || region.y_off + region.height > img.height) {
        throw DomainError("cut_tile: region outside raster bounds");
    }
    Raster out(region.width, region.height, img.channels);
    const std::size_t row_bytes = static_cast<std::size_t>(region.width) * img.channels;
    for (int y = 0; y < region.height; ++y) {
        const std::uint8_t* src = img.data.data() +
            ((static_cast<std::size_t>(region.y_off + y) * img.width) + region.x_off) * img.channels;
        std::memcpy(out.data.data() + static_cast<std::size_t>(y) * row_bytes, src, row_bytes);
    }
    return out;
}

// Tile-space box -> original-capture coordinates: translate by the tile
// offset, then undo the DSS scale. Width/height go through the same map.
inline BoxF remap_to_image(const BoxF& box, const TileRegion& region, double scale_factor) {
    if (box.frame != Frame::Tile) {
        throw DomainError("remap_to_image: box must be in tile frame");
    }
    if (scale_factor == 0.0 || !std::isfinite(scale_factor)) {
        throw DomainError("remap_to_image: scale factor must be finite and nonzero");
    }
    BoxF out;
    out.x = (box.x + region.x_off) / scale_factor;
    out.y = (box.y + region.y_off) / scale_factor;
    out.w = box.w / scale_factor;
    out.h = box.h / scale_factor;
    out.frame = Frame::Original;
    return out;
}

// Intersect an image-space annotation with a tile. Kept (in tile
// coordinates) when the visible fraction of the original area reaches
// min_visibility; dropped otherwise.
inline std::optional<BoxF> clip_annotation_to_tile(const BoxF& ann, const TileRegion& region,
                                                   double min_visibility) {
    if (ann.frame != Frame::Image) {
        throw DomainError("clip_annotation_to_tile: annotation must be in image frame");
    }
    if (!(min_visibility >= 0.0) || min_visibility > 1.0) {
        throw DomainError("clip_annotation_to_tile: min_visibility must be in [0, 1]");
    }
    const double full = area(ann);
    if (full <= 0.0) return std::nullopt;
    const BoxF inter = intersect(ann, region.as_box());
    const double kept = area(inter);
    if (kept <= 0.0 || kept / full < min_visibility) return std::nullopt;
    return BoxF{inter.x - region.x_off, inter.y - region.y_off, inter.w, inter.h, Frame::Tile};
}

inline void to_json(nlohmann::json& j, const TileRegion& r) {
    j = nlohmann::json{{"x_off", r.x_off}, {"y_off", r.y_off},
                       {"width", r.width}, {"height", r.height},
                       {"row", r.row},     {"col", r.col}};
}

inline void to_json(nlohmann::json& j, const TilePlan& p) {
    j = nlohmann::json{{"image_w", p.image_w},
                       {"image_h", p.image_h},
                       {"tile_size_px", p.tile_size_px},
                       {"overlap_fraction", p.overlap_fraction},
                       {"step_px", p.step_px},
                       {"n_cols", p.n_cols},
                       {"n_rows", p.n_rows},
                       {"tiles", p.tiles}};
}

} // namespace dss

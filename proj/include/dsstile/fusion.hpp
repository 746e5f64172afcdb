#pragma once

// Per-tile detection fusion: confidence floor, remap into the original
// frame, class-aware greedy NMS.

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "dsstile/geometry.hpp"
#include "dsstile/tiling.hpp"

namespace dss {

struct Detection {
    BoxF box;
    double score = 0.0;
    int class_id = 0;
    std::optional<int> source_tile; // row-major grid index, when known
};

struct FusionConfig {
    double match_iou_threshold = 0.5;  // T_m
    double confidence_threshold = 0.25; // T_d
};

namespace detail {

// Deterministic priority: score desc, then area desc; stable sort keeps
// input order as the final tie-break.
inline bool higher_priority(const Detection& a, const Detection& b) {
    if (a.score != b.score) return a.score > b.score;
    return area(a.box) > area(b.box);
}

} // namespace detail

// Hard class-aware NMS: walk detections in priority order, keep one iff its
// IoU with every already-kept detection of the same class is <= threshold.
// Output preserves the priority order.
inline std::vector<Detection> greedy_nms(const std::vector<Detection>& dets, double iou_threshold) {
    for (std::size_t i = 1; i < dets.size(); ++i) {
        if (dets[i].box.frame != dets[0].box.frame) {
            throw DomainError("greedy_nms: detections span multiple coordinate frames");
        }
    }
    std::vector<Detection> sorted = dets;
    std::stable_sort(sorted.begin(), sorted.end(), detail::higher_priority);

    std::vector<Detection> kept;
    kept.reserve(sorted.size());
    for (const Detection& d : sorted) {
        bool suppressed = false;
        for (const Detection& k : kept) {
            if (k.class_id != d.class_id) continue;
            if (iou(k.box, d.box) > iou_threshold) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(d);
    }
    return kept;
}

// Tile-frame detections from every tile of one image -> fused detections in
// original coordinates. Scores below T_d never reach the NMS stage.
inline std::vector<Detection> merge_tile_detections(
    const std::vector<std::pair<TileRegion, std::vector<Detection>>>& per_tile,
    double scale_factor, const FusionConfig& cfg) {
    std::vector<Detection> remapped;
    for (const auto& [region, dets] : per_tile) {
        for (const Detection& d : dets) {
            if (d.score < cfg.confidence_threshold) continue;
            Detection out = d;
            out.box = remap_to_image(d.box, region, scale_factor);
            remapped.push_back(std::move(out));
        }
    }
    return greedy_nms(remapped, cfg.match_iou_threshold);
}

} // namespace dss

#pragma once

// COCO-style detection evaluation: greedy score-descending matching per
// class and IoU threshold, 101-point interpolated AP, size-category
// breakdown with crowd/out-of-range annotations treated as ignore regions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dsstile/coco.hpp"
#include "dsstile/errors.hpp"

namespace dss {

struct SizeCategory {
    std::string name;
    double min_area = 0.0; // inclusive
    double max_area = std::numeric_limits<double>::infinity(); // exclusive

    bool contains(double a) const { return a >= min_area && a < max_area; }
};

inline std::vector<SizeCategory> coco_size_categories() {
    const double inf = std::numeric_limits<double>::infinity();
    return {{"small", 0.0, 1024.0}, {"medium", 1024.0, 9216.0}, {"large", 9216.0, inf}};
}

inline SizeCategory all_sizes() {
    return {"all", 0.0, std::numeric_limits<double>::infinity()};
}

// 0.50:0.05:0.95.
inline std::vector<double> coco_iou_thresholds() {
    std::vector<double> t;
    for (int i = 0; i < 10; ++i) t.push_back(0.5 + 0.05 * i);
    return t;
}

struct ClassAp {
    int category_id = 0;
    std::string name;
    std::optional<double> ap_5095;
    std::optional<double> ap50;
    long long gt_count = 0;
};

struct EvalReport {
    std::optional<double> map_5095;
    std::optional<double> map50;
    std::map<std::string, std::optional<double>> map50_by_size;
    std::vector<ClassAp> per_class;
    long long detection_count = 0;
    long long gt_count = 0; // non-crowd ground truth
    double avg_fps = 0.0;   // 0 until a timed run fills it in
    std::vector<double> per_image_ms;
};

namespace evaldetail {

struct GtBox {
    BoxF box;
    double area = 0.0;
    bool crowd = false;
};

struct DtBox {
    BoxF box;
    double score = 0.0;
};

// Crowd ground truth acts as an ignore region: overlap is measured against
// the detection's own area, so any detection inside the crowd "matches" it.
inline double match_iou(const DtBox& d, const GtBox& g) {
    if (!g.crowd) return iou(d.box, g.box);
    const double da = area(d.box);
    if (da <= 0.0) return 0.0;
    const double inter = area(intersect(d.box, g.box));
    return inter / da;
}

struct ScoredOutcome {
    double score = 0.0;
    bool matched = false;
    bool ignored = false;
};

// Match one image's detections of one class against its ground truth at one
// IoU threshold, restricted to a size range. Out-of-range and crowd GT are
// ignored; detections matched to ignored GT are ignored; unmatched
// detections outside the range are ignored too.
inline void match_image(const std::vector<DtBox>& dts_sorted, const std::vector<GtBox>& gts,
                        double threshold, const SizeCategory& range,
                        std::vector<ScoredOutcome>& out, long long& n_unignored_gt) {
    std::vector<char> gt_ignore(gts.size());
    std::vector<std::size_t> gt_order(gts.size());
    for (std::size_t g = 0; g < gts.size(); ++g) {
        gt_ignore[g] = gts[g].crowd || !range.contains(gts[g].area);
        if (!gt_ignore[g]) ++n_unignored_gt;
    }
    // Unignored ground truth first; stable within each group.
    std::size_t w = 0;
    for (std::size_t g = 0; g < gts.size(); ++g)
        if (!gt_ignore[g]) gt_order[w++] = g;
    for (std::size_t g = 0; g < gts.size(); ++g)
        if (gt_ignore[g]) gt_order[w++] = g;

    std::vector<char> gt_matched(gts.size(), 0);
    for (const DtBox& d : dts_sorted) {
        double best_iou = threshold;
        std::ptrdiff_t best = -1;
        for (std::size_t k = 0; k < gt_order.size(); ++k) {
            const std::size_t g = gt_order[k];
            if (gt_matched[g] && !gts[g].crowd) continue;
            // Once a real match is on hand, ignored candidates cannot win.
            if (best > -1 && !gt_ignore[static_cast<std::size_t>(best)] && gt_ignore[g]) break;
            const double v = match_iou(d, gts[g]);
            if (v < best_iou) continue;
            best_iou = v;
            best = static_cast<std::ptrdiff_t>(g);
        }
        ScoredOutcome o;
        o.score = d.score;
        if (best > -1) {
            const auto g = static_cast<std::size_t>(best);
            o.matched = true;
            o.ignored = gt_ignore[g] != 0;
            if (!gts[g].crowd) gt_matched[g] = 1;
        } else {
            o.matched = false;
            o.ignored = !range.contains(area(d.box));
        }
        out.push_back(o);
    }
}

// 101-point interpolated AP over outcomes sorted by score descending.
inline std::optional<double> ap_101(const std::vector<ScoredOutcome>& sorted, long long n_unignored_gt) {
    if (n_unignored_gt == 0) return std::nullopt;
    std::vector<double> recall, precision;
    long long tp = 0, fp = 0;
    for (const auto& o : sorted) {
        if (o.ignored) continue;
        if (o.matched) ++tp; else ++fp;
        recall.push_back(static_cast<double>(tp) / static_cast<double>(n_unignored_gt));
        precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
    }
    for (std::size_t i = precision.size(); i-- > 1;) {
        precision[i - 1] = std::max(precision[i - 1], precision[i]);
    }
    double sum = 0.0;
    for (int j = 0; j <= 100; ++j) {
        const double r = j / 100.0;
        const auto it = std::lower_bound(recall.begin(), recall.end(), r);
        if (it != recall.end()) {
            sum += precision[static_cast<std::size_t>(it - recall.begin())];
        }
    }
    return sum / 101.0;
}

} // namespace evaldetail

// Full evaluation across classes, IoU thresholds and size categories.
// Detections must be in original-image coordinates.
inline EvalReport evaluate(const DetectionsByImage& dets_by_image, const CocoDataset& ds,
                           const std::vector<double>& iou_thresholds = coco_iou_thresholds(),
                           const std::vector<SizeCategory>& size_bins = coco_size_categories()) {
    using namespace evaldetail;
    if (iou_thresholds.empty()) throw DomainError("evaluate: no IoU thresholds");

    for (const auto& [img_id, dets] : dets_by_image) {
        for (const auto& d : dets) {
            if (d.box.frame != Frame::Original) {
                throw DomainError("evaluate: detections for image " + std::to_string(img_id) +
                                  " are not in original-image coordinates");
            }
        }
    }

    // Per (image, class) views, in dataset image order for determinism.
    struct ImageClass {
        std::vector<GtBox> gts;
        std::vector<DtBox> dts; // sorted by score descending, stable
    };
    std::map<int, std::vector<ImageClass>> by_class;
    for (const auto& cat : ds.categories) by_class[cat.id] = {};

    EvalReport report;
    for (const auto& img : ds.images) {
        std::map<int, ImageClass> slot;
        if (auto it = ds.annotations_by_image.find(img.id); it != ds.annotations_by_image.end()) {
            for (std::size_t ai : it->second) {
                const CocoAnnotation& ann = ds.annotations[ai];
                if (!by_class.count(ann.category_id)) continue;
                slot[ann.category_id].gts.push_back({ann.box, ann.area_px2, ann.iscrowd});
                if (!ann.iscrowd) ++report.gt_count;
            }
        }
        if (auto it = dets_by_image.find(img.id); it != dets_by_image.end()) {
            for (const auto& d : it->second) {
                ++report.detection_count;
                if (!by_class.count(d.class_id)) continue;
                slot[d.class_id].dts.push_back({d.box, d.score});
            }
        }
        for (auto& [cid, ic] : slot) {
            std::stable_sort(ic.dts.begin(), ic.dts.end(),
                             [](const DtBox& a, const DtBox& b) { return a.score > b.score; });
            by_class[cid].push_back(std::move(ic));
        }
    }

    const SizeCategory everything = all_sizes();
    auto class_ap = [&](int cid, double threshold, const SizeCategory& range) -> std::optional<double> {
        std::vector<ScoredOutcome> outcomes;
        long long npig = 0;
        for (const auto& ic : by_class[cid]) {
            match_image(ic.dts, ic.gts, threshold, range, outcomes, npig);
        }
        std::stable_sort(outcomes.begin(), outcomes.end(),
                         [](const ScoredOutcome& a, const ScoredOutcome& b) { return a.score > b.score; });
        return ap_101(outcomes, npig);
    };

    auto mean_defined = [](const std::vector<std::optional<double>>& vals) -> std::optional<double> {
        double sum = 0.0;
        int n = 0;
        for (const auto& v : vals) {
            if (v) {
                sum += *v;
                ++n;
            }
        }
        if (n == 0) return std::nullopt;
        return sum / n;
    };

    std::vector<std::optional<double>> overall_cells, ap50_cells;
    for (const auto& cat : ds.categories) {
        ClassAp row;
        row.category_id = cat.id;
        row.name = cat.name;
        for (const auto& ic : by_class[cat.id]) {
            for (const auto& g : ic.gts) {
                if (!g.crowd) ++row.gt_count;
            }
        }
        std::vector<std::optional<double>> cells;
        for (double t : iou_thresholds) {
            auto ap = class_ap(cat.id, t, everything);
            cells.push_back(ap);
            overall_cells.push_back(ap);
            if (t == 0.5) {
                row.ap50 = ap;
                ap50_cells.push_back(ap);
            }
        }
        row.ap_5095 = mean_defined(cells);
        report.per_class.push_back(std::move(row));
    }
    report.map_5095 = mean_defined(overall_cells);
    report.map50 = mean_defined(ap50_cells);

    for (const auto& range : size_bins) {
        std::vector<std::optional<double>> cells;
        for (const auto& cat : ds.categories) {
            cells.push_back(class_ap(cat.id, 0.5, range));
        }
        report.map50_by_size[range.name] = mean_defined(cells);
    }
    return report;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    nlohmann::json j;
    j["map"] = opt(r.map_5095);
    j["map50"] = opt(r.map50);
    for (const auto& [name, v] : r.map50_by_size) j["map50_by_size"][name] = opt(v);
    j["per_class"] = nlohmann::json::array();
    for (const auto& c : r.per_class) {
        j["per_class"].push_back({{"category_id", c.category_id},
                                  {"name", c.name},
                                  {"ap", opt(c.ap_5095)},
                                  {"ap50", opt(c.ap50)},
                                  {"gt_count", c.gt_count}});
    }
    j["detection_count"] = r.detection_count;
    j["gt_count"] = r.gt_count;
    j["avg_fps"] = r.avg_fps;
    if (!r.per_image_ms.empty()) j["per_image_ms"] = r.per_image_ms;
    return j;
}

// One results-table row: setup,map,map50,map50_small,map50_medium,map50_large,fps
inline std::string report_csv_header() {
    return "setup,map,map50,map50_small,map50_medium,map50_large,fps";
}

inline std::string report_csv_row(const std::string& setup, const EvalReport& r) {
    auto cell = [](const std::optional<double>& v) {
        if (!v) return std::string{};
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", *v);
        return std::string(buf);
    };
    auto size_cell = [&](const char* name) -> std::string {
        auto it = r.map50_by_size.find(name);
        return it == r.map50_by_size.end() ? std::string{} : cell(it->second);
    };
    char fps[32];
    std::snprintf(fps, sizeof(fps), "%.3f", r.avg_fps);
    return setup + "," + cell(r.map_5095) + "," + cell(r.map50) + "," + size_cell("small") + "," +
           size_cell("medium") + "," + size_cell("large") + "," + fps;
}

} // namespace dss

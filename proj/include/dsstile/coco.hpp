#pragma once

// COCO-JSON dataset ingestion/emission and the detections results format.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "dsstile/errors.hpp"
#include "dsstile/fusion.hpp"
#include "dsstile/geometry.hpp"

namespace dss {

struct CocoImage {
    long long id = 0;
    std::string file_name;
    int width = 0;
    int height = 0;
    // Capture altitude from per-image metadata. Missing or zero means unknown.
    std::optional<double> altitude_m;
};

struct CocoAnnotation {
    long long id = 0;
    long long image_id = 0;
    int category_id = 0;
    BoxF box{0, 0, 0, 0, Frame::Original};
    double area_px2 = 0.0;
    bool iscrowd = false;
};

struct CocoCategory {
    int id = 0;
    std::string name;
};

struct CocoDataset {
    std::vector<CocoImage> images;
    std::vector<CocoAnnotation> annotations;
    std::vector<CocoCategory> categories;
    std::filesystem::path image_root; // directory file_name entries resolve against

    std::unordered_map<long long, std::size_t> image_index;
    std::unordered_map<long long, std::vector<std::size_t>> annotations_by_image;

    void build_index() {
        image_index.clear();
        annotations_by_image.clear();
        for (std::size_t i = 0; i < images.size(); ++i) {
            image_index[images[i].id] = i;
        }
        for (std::size_t a = 0; a < annotations.size(); ++a) {
            annotations_by_image[annotations[a].image_id].push_back(a);
        }
    }

    const CocoImage* find_image(long long id) const {
        auto it = image_index.find(id);
        return it == image_index.end() ? nullptr : &images[it->second];
    }

    std::filesystem::path image_path(const CocoImage& img) const {
        return image_root / img.file_name;
    }
};

namespace detail {

inline std::optional<double> parse_altitude(const nlohmann::json& image_record) {
    const nlohmann::json* v = nullptr;
    if (image_record.contains("meta") && image_record["meta"].is_object() &&
        image_record["meta"].contains("altitude")) {
        v = &image_record["meta"]["altitude"];
    } else if (image_record.contains("altitude")) {
        v = &image_record["altitude"];
    }
    if (!v || !v->is_number()) return std::nullopt;
    const double alt = v->get<double>();
    if (alt <= 0.0) return std::nullopt; // 0 encodes "missing" in the source data
    return alt;
}

} // namespace detail

inline CocoDataset load_coco(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("load_coco: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw LoadError("load_coco: " + path.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("images") || !j["images"].is_array()) {
        throw LoadError("load_coco: " + path.string() + ": missing 'images' array");
    }

    CocoDataset ds;
    ds.image_root = path.parent_path();
    for (const auto& ji : j["images"]) {
        CocoImage img;
        try {
            img.id = ji.at("id").get<long long>();
            img.file_name = ji.value("file_name", std::string{});
            img.width = ji.at("width").get<int>();
            img.height = ji.at("height").get<int>();
        } catch (const nlohmann::json::exception& e) {
            throw LoadError("load_coco: malformed image record " + ji.dump() + ": " + e.what());
        }
        if (img.width <= 0 || img.height <= 0) {
            throw LoadError("load_coco: image " + std::to_string(img.id) + " has non-positive dimensions");
        }
        img.altitude_m = detail::parse_altitude(ji);
        ds.images.push_back(std::move(img));
    }

    if (j.contains("categories") && j["categories"].is_array()) {
        for (const auto& jc : j["categories"]) {
            CocoCategory cat;
            try {
                cat.id = jc.at("id").get<int>();
                cat.name = jc.value("name", "category_" + std::to_string(cat.id));
            } catch (const nlohmann::json::exception& e) {
                throw LoadError("load_coco: malformed category record " + jc.dump() + ": " + e.what());
            }
            ds.categories.push_back(std::move(cat));
        }
    }

    ds.build_index();
    bool categories_given = !ds.categories.empty();
    std::map<int, bool> seen_categories;
    for (const auto& c : ds.categories) seen_categories[c.id] = true;

    if (j.contains("annotations") && j["annotations"].is_array()) {
        for (const auto& ja : j["annotations"]) {
            CocoAnnotation ann;
            try {
                ann.id = ja.at("id").get<long long>();
                ann.image_id = ja.at("image_id").get<long long>();
                ann.category_id = ja.at("category_id").get<int>();
                const auto& bb = ja.at("bbox");
                ann.box = BoxF{bb.at(0).get<double>(), bb.at(1).get<double>(),
                               bb.at(2).get<double>(), bb.at(3).get<double>(), Frame::Original};
                ann.iscrowd = ja.value("iscrowd", 0) != 0;
                ann.area_px2 = ja.contains("area") ? ja["area"].get<double>() : area(ann.box);
            } catch (const nlohmann::json::exception& e) {
                throw LoadError("load_coco: malformed annotation record " + ja.dump() + ": " + e.what());
            }
            if (!ds.find_image(ann.image_id)) {
                throw LoadError("load_coco: annotation " + std::to_string(ann.id) +
                                " references missing image " + std::to_string(ann.image_id));
            }
            if (!categories_given && !seen_categories[ann.category_id]) {
                seen_categories[ann.category_id] = true;
                ds.categories.push_back({ann.category_id, "category_" + std::to_string(ann.category_id)});
            }
            ds.annotations.push_back(std::move(ann));
        }
    }

    ds.build_index();
    return ds;
}

inline void save_coco(const CocoDataset& ds, const std::filesystem::path& path) {
    nlohmann::json j;
    j["images"] = nlohmann::json::array();
    for (const auto& img : ds.images) {
        nlohmann::json ji{{"id", img.id},
                          {"file_name", img.file_name},
                          {"width", img.width},
                          {"height", img.height}};
        if (img.altitude_m) ji["meta"] = {{"altitude", *img.altitude_m}};
        j["images"].push_back(std::move(ji));
    }
    j["annotations"] = nlohmann::json::array();
    for (const auto& ann : ds.annotations) {
        j["annotations"].push_back({{"id", ann.id},
                                    {"image_id", ann.image_id},
                                    {"category_id", ann.category_id},
                                    {"bbox", {ann.box.x, ann.box.y, ann.box.w, ann.box.h}},
                                    {"area", ann.area_px2},
                                    {"iscrowd", ann.iscrowd ? 1 : 0}});
    }
    j["categories"] = nlohmann::json::array();
    for (const auto& cat : ds.categories) {
        j["categories"].push_back({{"id", cat.id}, {"name", cat.name}});
    }
    std::ofstream out(path);
    if (!out) throw LoadError("save_coco: cannot open " + path.string() + " for writing");
    out << j.dump(1) << "\n";
}

// COCO results format: a flat array of {image_id, category_id, bbox, score}.
using DetectionsByImage = std::map<long long, std::vector<Detection>>;

inline void save_detections(const DetectionsByImage& dets, const std::filesystem::path& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [image_id, list] : dets) {
        for (const auto& d : list) {
            arr.push_back({{"image_id", image_id},
                           {"category_id", d.class_id},
                           {"bbox", {d.box.x, d.box.y, d.box.w, d.box.h}},
                           {"score", d.score}});
        }
    }
    std::ofstream out(path);
    if (!out) throw LoadError("save_detections: cannot open " + path.string() + " for writing");
    out << arr.dump(1) << "\n";
}

inline DetectionsByImage load_detections(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("load_detections: cannot open " + path.string());
    nlohmann::json arr;
    try {
        in >> arr;
    } catch (const nlohmann::json::exception& e) {
        throw LoadError("load_detections: " + path.string() + ": " + e.what());
    }
    if (!arr.is_array()) throw LoadError("load_detections: " + path.string() + ": expected a JSON array");
    DetectionsByImage out;
    for (const auto& je : arr) {
        try {
            Detection d;
            const auto& bb = je.at("bbox");
            d.box = BoxF{bb.at(0).get<double>(), bb.at(1).get<double>(),
                         bb.at(2).get<double>(), bb.at(3).get<double>(), Frame::Original};
            d.score = je.at("score").get<double>();
            d.class_id = je.at("category_id").get<int>();
            out[je.at("image_id").get<long long>()].push_back(std::move(d));
        } catch (const nlohmann::json::exception& e) {
            throw LoadError("load_detections: malformed record " + je.dump() + ": " + e.what());
        }
    }
    return out;
}

} // namespace dss

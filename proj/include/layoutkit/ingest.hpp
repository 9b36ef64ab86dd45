// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "layoutkit/dataset.hpp"
#include "layoutkit/errors.hpp"

namespace layoutkit {

namespace detail {

inline nlohmann::json parse_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what(), e.byte);
    }
}

// COCO file_name stem: strip directories and the last extension.
inline std::string page_id_from_file_name(const std::string& file_name) {
    std::size_t slash = file_name.find_last_of("/\\");
    std::string base =
        slash == std::string::npos ? file_name : file_name.substr(slash + 1);
    std::size_t dot = base.find_last_of('.');
    if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
    return base;
}

enum class ClampResult { Kept, Dropped };

// Boxes partially outside the page are clamped; boxes with no extent
// inside the page at all are dropped.
inline ClampResult clamp_to_page(BBox& b, double width, double height) {
    if (b.right < 0.0 || b.left > width || b.bottom < 0.0 || b.top > height) {
        return ClampResult::Dropped;
    }
    b.left = std::clamp(b.left, 0.0, width);
    b.right = std::clamp(b.right, 0.0, width);
    b.top = std::clamp(b.top, 0.0, height);
    b.bottom = std::clamp(b.bottom, 0.0, height);
    return ClampResult::Kept;
}

inline BBox bbox_from_xywh(const nlohmann::json& arr, const std::string& context) {
    if (!arr.is_array() || arr.size() != 4) {
        throw ValidationError(context + ": bbox must be [x, y, w, h]");
    }
    const double x = arr[0].get<double>();
    const double y = arr[1].get<double>();
    const double w = arr[2].get<double>();
    const double h = arr[3].get<double>();
    if (w < 0.0 || h < 0.0) {
        throw ValidationError(context + ": negative bbox extent");
    }
    return BBox{x, y, x + w, y + h};
}

}  // namespace detail

// COCO object-detection ground truth: images, annotations, categories.
inline Dataset load_ground_truth(const std::string& path) {
    const nlohmann::json j = detail::parse_json_file(path);
    Dataset ds;
    try {
        for (const auto& cat : j.at("categories")) {
            ds.category_labels[cat.at("id").get<std::int64_t>()] =
                parse_label(cat.at("name").get<std::string>());
        }
        for (const auto& img : j.at("images")) {
            PageSample page;
            const auto coco_id = img.at("id").get<std::int64_t>();
            page.page_id =
                detail::page_id_from_file_name(img.at("file_name").get<std::string>());
            page.width = img.at("width").get<double>();
            page.height = img.at("height").get<double>();
            if (page.width <= 0.0 || page.height <= 0.0) {
                throw ValidationError("image " + page.page_id +
                                      ": non-positive page dimensions");
            }
            if (ds.page_by_coco_id.count(coco_id)) {
                throw IntegrityError("duplicate image id " + std::to_string(coco_id));
            }
            if (ds.page_by_name.count(page.page_id)) {
                throw IntegrityError("duplicate page id " + page.page_id);
            }
            ds.page_by_coco_id[coco_id] = ds.pages.size();
            ds.page_by_name[page.page_id] = ds.pages.size();
            ds.pages.push_back(std::move(page));
        }
        for (const auto& ann : j.at("annotations")) {
            const auto image_id = ann.at("image_id").get<std::int64_t>();
            auto it = ds.page_by_coco_id.find(image_id);
            if (it == ds.page_by_coco_id.end()) {
                throw IntegrityError("annotation references missing image " +
                                     std::to_string(image_id));
            }
            PageSample& page = ds.pages[it->second];
            Annotation a;
            a.label = [&] {
                const auto cat_id = ann.at("category_id").get<std::int64_t>();
                auto cit = ds.category_labels.find(cat_id);
                if (cit == ds.category_labels.end()) {
                    throw IntegrityError("annotation references missing category " +
                                         std::to_string(cat_id));
                }
                return cit->second;
            }();
            a.bbox = detail::bbox_from_xywh(ann.at("bbox"),
                                            "annotation on page " + page.page_id);
            a.id = ann.contains("id")
                       ? ann.at("id").get<std::int64_t>()
                       : static_cast<std::int64_t>(page.ground_truth.size());
            for (const Annotation& existing : page.ground_truth) {
                if (existing.id == a.id) {
                    throw ValidationError("duplicate annotation id " +
                                          std::to_string(a.id) + " on page " +
                                          page.page_id);
                }
            }
            if (detail::clamp_to_page(a.bbox, page.width, page.height) ==
                detail::ClampResult::Dropped) {
                ++ds.dropped_ground_truth;
                continue;
            }
            page.ground_truth.push_back(std::move(a));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what(), 0);
    }
    return ds;
}

// COCO results array: {image_id, category_id, bbox, score}. Input order is
// preserved per page; downstream tie-breaking depends on it.
inline void load_predictions(const std::string& path, Dataset& ds) {
    const nlohmann::json j = detail::parse_json_file(path);
    if (!j.is_array()) {
        throw ValidationError(path + ": predictions file must be a JSON array");
    }
    try {
        for (const auto& det : j) {
            const auto image_id = det.at("image_id").get<std::int64_t>();
            auto it = ds.page_by_coco_id.find(image_id);
            if (it == ds.page_by_coco_id.end()) {
                throw IntegrityError("prediction references missing image " +
                                     std::to_string(image_id));
            }
            PageSample& page = ds.pages[it->second];
            Detection d;
            const auto cat_id = det.at("category_id").get<std::int64_t>();
            auto cit = ds.category_labels.find(cat_id);
            if (cit == ds.category_labels.end()) {
                throw IntegrityError("prediction references missing category " +
                                     std::to_string(cat_id));
            }
            d.label = cit->second;
            d.score = det.at("score").get<double>();
            if (d.score < 0.0 || d.score > 1.0) {
                throw ValidationError("prediction score " + std::to_string(d.score) +
                                      " outside [0,1] on page " + page.page_id);
            }
            d.bbox = detail::bbox_from_xywh(det.at("bbox"),
                                            "prediction on page " + page.page_id);
            if (detail::clamp_to_page(d.bbox, page.width, page.height) ==
                detail::ClampResult::Dropped) {
                ++ds.dropped_predictions;
                continue;
            }
            page.predictions.push_back(std::move(d));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what(), 0);
    }
}

// Cells file: {pages:[{page_id, cells:[{id, bbox:[l,t,r,b], text}]}]}.
// Pages absent from the file stay image-only (cells == nullopt).
inline void load_cells(const std::string& path, Dataset& ds) {
    const nlohmann::json j = detail::parse_json_file(path);
    try {
        for (const auto& entry : j.at("pages")) {
            const auto page_id = entry.at("page_id").get<std::string>();
            auto it = ds.page_by_name.find(page_id);
            if (it == ds.page_by_name.end()) continue;  // superset files are fine
            PageSample& page = ds.pages[it->second];
            std::vector<TextCell> cells;
            std::set<std::int64_t> seen;
            for (const auto& cj : entry.at("cells")) {
                TextCell cell;
                cell.id = cj.at("id").get<std::int64_t>();
                if (!seen.insert(cell.id).second) {
                    throw ValidationError("duplicate cell id " +
                                          std::to_string(cell.id) + " on page " +
                                          page_id);
                }
                const auto& arr = cj.at("bbox");
                if (!arr.is_array() || arr.size() != 4) {
                    throw ValidationError("cell bbox must be [l, t, r, b] on page " +
                                          page_id);
                }
                cell.bbox = BBox{arr[0].get<double>(), arr[1].get<double>(),
                                 arr[2].get<double>(), arr[3].get<double>()};
                if (!cell.bbox.valid()) {
                    throw ValidationError("cell bbox inverted on page " + page_id);
                }
                if (cj.contains("text")) cell.text = cj.at("text").get<std::string>();
                if (detail::clamp_to_page(cell.bbox, page.width, page.height) ==
                    detail::ClampResult::Dropped) {
                    continue;
                }
                cells.push_back(std::move(cell));
            }
            page.cells = std::move(cells);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what(), 0);
    }
}

// Serializes ground truth back to COCO JSON. Categories are always the
// full canonical table, ids 1..17 in table order.
inline nlohmann::json export_coco(const Dataset& ds) {
    nlohmann::json j;
    j["images"] = nlohmann::json::array();
    j["annotations"] = nlohmann::json::array();
    j["categories"] = nlohmann::json::array();
    for (Label l : all_labels()) {
        j["categories"].push_back(
            {{"id", static_cast<int>(l) + 1}, {"name", std::string(label_name(l))}});
    }
    for (std::size_t i = 0; i < ds.pages.size(); ++i) {
        const PageSample& page = ds.pages[i];
        j["images"].push_back({{"id", static_cast<std::int64_t>(i) + 1},
                               {"file_name", page.page_id + ".png"},
                               {"width", page.width},
                               {"height", page.height}});
        for (const Annotation& a : page.ground_truth) {
            j["annotations"].push_back(
                {{"id", a.id},
                 {"image_id", static_cast<std::int64_t>(i) + 1},
                 {"category_id", static_cast<int>(a.label) + 1},
                 {"bbox", {a.bbox.left, a.bbox.top, a.bbox.width(), a.bbox.height()}},
                 {"area", a.bbox.area()},
                 {"iscrowd", 0}});
        }
    }
    return j;
}

inline SplitCounts split_counts(const Dataset& train, const Dataset& val,
                                const Dataset& test) {
    SplitCounts counts;
    auto tally = [](const Dataset& ds, std::array<std::int64_t, kLabelCount>& out) {
        for (const PageSample& page : ds.pages) {
            for (const Annotation& a : page.ground_truth) {
                ++out[static_cast<std::size_t>(a.label)];
            }
        }
    };
    tally(train, counts.train);
    tally(val, counts.val);
    tally(test, counts.test);
    return counts;
}

}  // namespace layoutkit

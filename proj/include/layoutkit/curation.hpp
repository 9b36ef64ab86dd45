// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "layoutkit/dataset.hpp"
#include "layoutkit/errors.hpp"

namespace layoutkit {

struct CurationReport {
    double threshold = 0.0;
    std::size_t pages_total = 0;
    std::size_t pages_excluded = 0;
    double exclusion_fraction = 0.0;
    std::map<Label, std::size_t> delta_hits;  // pages hit, per delta label
};

// A page is flagged when any detection of a delta-class label reaches the
// confidence threshold. The detections come from an external filtering
// detector run, keyed by page id.
inline std::set<std::string> flag_delta_pages(
    const std::map<std::string, std::vector<Detection>>& page_detections,
    const std::set<Label>& delta, double threshold) {
    std::set<std::string> flagged;
    for (const auto& [page_id, dets] : page_detections) {
        for (const Detection& d : dets) {
            if (delta.count(d.label) && d.score >= threshold) {
                flagged.insert(page_id);
                break;
            }
        }
    }
    return flagged;
}

inline std::map<Label, std::size_t> count_delta_hits(
    const std::map<std::string, std::vector<Detection>>& page_detections,
    const std::set<Label>& delta, double threshold) {
    std::map<Label, std::size_t> hits;
    for (Label l : delta) hits[l] = 0;
    for (const auto& [page_id, dets] : page_detections) {
        std::set<Label> seen;
        for (const Detection& d : dets) {
            if (delta.count(d.label) && d.score >= threshold) seen.insert(d.label);
        }
        for (Label l : seen) ++hits[l];
    }
    return hits;
}

inline std::pair<Dataset, CurationReport> apply_exclusion(
    const Dataset& ds, const std::set<std::string>& flagged) {
    for (const std::string& page_id : flagged) {
        if (!ds.page_by_name.count(page_id)) {
            throw IntegrityError("flagged page not in dataset: " + page_id);
        }
    }
    Dataset curated;
    curated.category_labels = ds.category_labels;
    for (const PageSample& page : ds.pages) {
        if (flagged.count(page.page_id)) continue;
        curated.page_by_name[page.page_id] = curated.pages.size();
        curated.pages.push_back(page);
    }
    for (const auto& [coco_id, idx] : ds.page_by_coco_id) {
        auto it = curated.page_by_name.find(ds.pages[idx].page_id);
        if (it != curated.page_by_name.end()) {
            curated.page_by_coco_id[coco_id] = it->second;
        }
    }
    CurationReport report;
    report.pages_total = ds.pages.size();
    report.pages_excluded = flagged.size();
    report.exclusion_fraction =
        report.pages_total == 0
            ? 0.0
            : static_cast<double>(report.pages_excluded) /
                  static_cast<double>(report.pages_total);
    return {std::move(curated), report};
}

inline std::map<std::string, std::vector<Detection>> detections_by_page(
    const Dataset& ds) {
    std::map<std::string, std::vector<Detection>> out;
    for (const PageSample& page : ds.pages) out[page.page_id] = page.predictions;
    return out;
}

// Full flagging run: flag, exclude, and fill in the report bookkeeping.
inline std::pair<Dataset, CurationReport> curate_dataset(
    const Dataset& ds, const std::set<Label>& delta, double threshold) {
    const auto dets = detections_by_page(ds);
    const auto flagged = flag_delta_pages(dets, delta, threshold);
    auto [curated, report] = apply_exclusion(ds, flagged);
    report.threshold = threshold;
    report.delta_hits = count_delta_hits(dets, delta, threshold);
    return {std::move(curated), std::move(report)};
}

// Removes every page whose ground truth contains the trigger label.
inline Dataset excise_tabled_pages(const Dataset& ds, Label trigger = Label::Table) {
    Dataset out;
    out.category_labels = ds.category_labels;
    for (const PageSample& page : ds.pages) {
        bool has_trigger = false;
        for (const Annotation& a : page.ground_truth) {
            if (a.label == trigger) {
                has_trigger = true;
                break;
            }
        }
        if (has_trigger) continue;
        out.page_by_name[page.page_id] = out.pages.size();
        out.pages.push_back(page);
    }
    for (const auto& [coco_id, idx] : ds.page_by_coco_id) {
        auto it = out.page_by_name.find(ds.pages[idx].page_id);
        if (it != out.page_by_name.end()) {
            out.page_by_coco_id[coco_id] = it->second;
        }
    }
    return out;
}

}  // namespace layoutkit

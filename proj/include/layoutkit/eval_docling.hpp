// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <utility>

#include "layoutkit/dataset.hpp"
#include "layoutkit/errors.hpp"
#include "layoutkit/eval_coco.hpp"

namespace layoutkit {

struct DoclingEvalReport {
    double map_50_95 = -1.0;
    std::size_t samples_total = 0;
    std::size_t samples_skipped = 0;
    std::set<Label> label_intersection;
};

// Keep only detections scoring strictly above 0.50, then flatten every
// surviving score to exactly 1.0. Input order is preserved; it is the only
// ranking signal left afterwards.
inline Dataset prepare_predictions(Dataset ds) {
    for (PageSample& page : ds.pages) {
        std::vector<Detection> kept;
        kept.reserve(page.predictions.size());
        for (Detection d : page.predictions) {
            if (d.score > 0.50) {
                d.score = 1.0;
                kept.push_back(d);
            }
        }
        page.predictions = std::move(kept);
    }
    return ds;
}

// Labels occurring in at least one prediction and one ground-truth box,
// scanned across the whole dataset.
inline std::set<Label> label_intersection(const Dataset& ds) {
    std::set<Label> in_preds, in_gt, result;
    for (const PageSample& page : ds.pages) {
        for (const Detection& d : page.predictions) in_preds.insert(d.label);
        for (const Annotation& a : page.ground_truth) in_gt.insert(a.label);
    }
    for (Label l : in_preds) {
        if (in_gt.count(l)) result.insert(l);
    }
    return result;
}

// Drops boxes outside the label intersection on both sides, then skips any
// page whose filtered prediction count differs from its filtered ground-truth
// count. Filtering happens before counting.
inline std::pair<Dataset, std::size_t> filter_samples(
    const Dataset& ds, const std::set<Label>& intersection) {
    Dataset kept = ds;
    kept.pages.clear();
    kept.page_by_coco_id.clear();
    kept.page_by_name.clear();
    std::size_t skipped = 0;
    for (const PageSample& page : ds.pages) {
        PageSample filtered = page;
        std::erase_if(filtered.ground_truth, [&](const Annotation& a) {
            return intersection.count(a.label) == 0;
        });
        std::erase_if(filtered.predictions, [&](const Detection& d) {
            return intersection.count(d.label) == 0;
        });
        if (filtered.ground_truth.size() != filtered.predictions.size()) {
            ++skipped;
            continue;
        }
        kept.page_by_name[filtered.page_id] = kept.pages.size();
        kept.pages.push_back(std::move(filtered));
    }
    return {std::move(kept), skipped};
}

inline DoclingEvalReport evaluate_docling(const Dataset& ds) {
    DoclingEvalReport report;
    report.samples_total = ds.pages.size();
    const Dataset prepared = prepare_predictions(ds);
    report.label_intersection = label_intersection(prepared);
    auto [kept, skipped] = filter_samples(prepared, report.label_intersection);
    report.samples_skipped = skipped;
    std::size_t kept_boxes = 0;
    for (const PageSample& page : kept.pages) kept_boxes += page.ground_truth.size();
    if (kept.pages.empty() || kept_boxes == 0) {
        throw AllSamplesSkippedError(
            "docling-eval: nothing to evaluate; every sample was skipped or "
            "emptied by the label filter");
    }
    report.map_50_95 = evaluate_coco(kept).map_50_95;
    return report;
}

}  // namespace layoutkit

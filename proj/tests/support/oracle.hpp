// SPDX-License-Identifier: Apache-2.0
//
// Brute-force reference for the COCO-style metrics. Matching is restated
// from its definition and average precision is enumerated directly over the
// recall grid (max precision among all PR points at or beyond each grid
// recall), with none of the envelope/binary-search machinery the library
// uses. Only test code includes this header.
#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "layoutkit/dataset.hpp"
#include "layoutkit/taxonomy.hpp"

namespace oracle {

struct Result {
    double map = -1.0;
    double ap50 = -1.0;
    double ap75 = -1.0;
};

inline double box_iou(const layoutkit::BBox& a, const layoutkit::BBox& b) {
    const double iw = std::min(a.right, b.right) - std::max(a.left, b.left);
    const double ih = std::min(a.bottom, b.bottom) - std::max(a.top, b.top);
    const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

// Detections in score order each claim the free ground-truth box with the
// highest IoU >= thr; on exactly equal IoU the later box wins, as in the
// reference tooling. Returns per-detection hit flags.
inline std::vector<bool> match_page(const std::vector<layoutkit::Detection>& dets,
                                    const std::vector<layoutkit::Annotation>& gts,
                                    double thr) {
    std::vector<bool> hit(dets.size(), false);
    std::vector<bool> used(gts.size(), false);
    for (std::size_t d = 0; d < dets.size(); ++d) {
        double best = thr;
        std::size_t pick = gts.size();
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (used[g]) continue;
            const double v = box_iou(dets[d].bbox, gts[g].bbox);
            if (v >= best) {
                best = v;
                pick = g;
            }
        }
        if (pick < gts.size()) {
            used[pick] = true;
            hit[d] = true;
        }
    }
    return hit;
}

inline double ap_for_class(const layoutkit::Dataset& ds, layoutkit::Label label,
                           double thr, int max_dets = 100) {
    std::size_t total_gt = 0;
    struct Entry {
        double score;
        bool tp;
    };
    std::vector<Entry> ranked;  // page order, page-locally score-sorted
    for (const layoutkit::PageSample& page : ds.pages) {
        std::vector<layoutkit::Annotation> gts;
        for (const layoutkit::Annotation& a : page.ground_truth) {
            if (a.label == label) gts.push_back(a);
        }
        std::vector<layoutkit::Detection> dets;
        for (const layoutkit::Detection& d : page.predictions) {
            if (d.label == label) dets.push_back(d);
        }
        std::stable_sort(dets.begin(), dets.end(),
                         [](const auto& a, const auto& b) { return a.score > b.score; });
        if (dets.size() > static_cast<std::size_t>(max_dets)) {
            dets.resize(static_cast<std::size_t>(max_dets));
        }
        total_gt += gts.size();
        const std::vector<bool> hit = match_page(dets, gts, thr);
        for (std::size_t d = 0; d < dets.size(); ++d) {
            ranked.push_back({dets[d].score, hit[d]});
        }
    }
    if (total_gt == 0) return -1.0;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Entry& a, const Entry& b) { return a.score > b.score; });

    // PR points at every rank prefix.
    std::vector<double> recall(ranked.size()), precision(ranked.size());
    std::size_t tp = 0;
    for (std::size_t k = 0; k < ranked.size(); ++k) {
        if (ranked[k].tp) ++tp;
        recall[k] = static_cast<double>(tp) / static_cast<double>(total_gt);
        precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    }

    double sum = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double r = i / 100.0;
        double best = 0.0;
        for (std::size_t k = 0; k < ranked.size(); ++k) {
            if (recall[k] >= r) best = std::max(best, precision[k]);
        }
        sum += best;
    }
    return sum / 101.0;
}

inline Result evaluate(const layoutkit::Dataset& ds, int max_dets = 100) {
    Result result;
    double sum_map = 0.0, sum_50 = 0.0, sum_75 = 0.0;
    std::size_t classes = 0;
    for (layoutkit::Label label : layoutkit::all_labels()) {
        bool has_gt = false;
        for (const layoutkit::PageSample& page : ds.pages) {
            for (const layoutkit::Annotation& a : page.ground_truth) {
                if (a.label == label) {
                    has_gt = true;
                    break;
                }
            }
            if (has_gt) break;
        }
        if (!has_gt) continue;
        double thr_sum = 0.0;
        for (int t = 0; t < 10; ++t) {
            const double thr = (50 + 5 * t) / 100.0;
            const double ap = ap_for_class(ds, label, thr, max_dets);
            thr_sum += ap;
            if (t == 0) sum_50 += ap;
            if (t == 5) sum_75 += ap;
        }
        sum_map += thr_sum / 10.0;
        ++classes;
    }
    if (classes > 0) {
        result.map = sum_map / static_cast<double>(classes);
        result.ap50 = sum_50 / static_cast<double>(classes);
        result.ap75 = sum_75 / static_cast<double>(classes);
    }
    return result;
}

}  // namespace oracle

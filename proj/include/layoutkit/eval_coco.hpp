// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "layoutkit/dataset.hpp"
#include "layoutkit/errors.hpp"
#include "layoutkit/geometry.hpp"
#include "layoutkit/taxonomy.hpp"

namespace layoutkit {

// mAP averaged over IoU 0.50..0.95 in steps of 0.05.
inline constexpr std::array<double, 10> kIouThresholds = {
    0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};

// GT-area buckets, half-open: small < 32^2, medium in [32^2, 96^2), large >= 96^2.
enum class AreaBucket : std::uint8_t { All, Small, Medium, Large };
inline constexpr std::array<AreaBucket, 4> kAreaBuckets = {
    AreaBucket::All, AreaBucket::Small, AreaBucket::Medium, AreaBucket::Large};

inline bool in_area_bucket(double area, AreaBucket bucket) {
    constexpr double kSmallMax = 32.0 * 32.0;
    constexpr double kMediumMax = 96.0 * 96.0;
    switch (bucket) {
        case AreaBucket::Small: return area < kSmallMax;
        case AreaBucket::Medium: return area >= kSmallMax && area < kMediumMax;
        case AreaBucket::Large: return area >= kMediumMax;
        default: return true;
    }
}

// All values in [0,1], or -1 where the bucket has no ground truth.
struct ClassMetrics {
    double map_50_95 = -1.0;
    double ap_50 = -1.0;
    double ap_75 = -1.0;
    double ap_95 = -1.0;
    double ap_small = -1.0;
    double ap_medium = -1.0;
    double ap_large = -1.0;
    double ar_50_95 = -1.0;
};

struct CocoMetrics {
    double map_50_95 = -1.0;
    double ap_50 = -1.0;
    double ap_75 = -1.0;
    double ap_95 = -1.0;
    double ap_small = -1.0;
    double ap_medium = -1.0;
    double ap_large = -1.0;
    double ar_50_95 = -1.0;
    std::map<Label, ClassMetrics> per_class;
};

struct EvalOptions {
    std::optional<double> score_floor;  // drop detections scoring below this
    int max_dets = 100;                 // per page and class
};

// One-to-one greedy matching bookkeeping for a single page and class.
struct MatchResult {
    std::vector<std::int64_t> det_matches;  // matched gt id, or -1
    std::vector<bool> gt_covered;
};

namespace detail {

// IoU that treats a pair of zero-area boxes as non-overlapping instead of
// undefined; evaluation must tolerate degenerate data it cannot reject.
inline double match_iou(const BBox& a, const BBox& b) {
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace detail

// Greedy COCO matching: detections in score order each take the still-free
// ground-truth box of highest IoU at or above the threshold. On equal IoU the
// later ground-truth entry wins, mirroring the reference implementation.
inline MatchResult match_at_iou(std::span<const Detection> preds_sorted,
                                std::span<const Annotation> gts, double thr) {
    MatchResult result;
    result.det_matches.assign(preds_sorted.size(), -1);
    result.gt_covered.assign(gts.size(), false);
    for (std::size_t d = 0; d < preds_sorted.size(); ++d) {
        double best = thr;
        std::size_t match = gts.size();
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (result.gt_covered[g]) continue;
            const double v = detail::match_iou(preds_sorted[d].bbox, gts[g].bbox);
            if (v < best) continue;
            best = v;
            match = g;
        }
        if (match < gts.size()) {
            result.det_matches[d] = gts[match].id;
            result.gt_covered[match] = true;
        }
    }
    return result;
}

// 101-point interpolated AP over the recall grid {0, 0.01, .., 1.00} with a
// monotone precision envelope. Entries are (score, is_true_positive) over the
// whole dataset; ties keep their given order. Returns -1 when the class has
// no ground truth.
inline double average_precision(std::vector<std::pair<double, bool>> entries,
                                std::size_t total_gt) {
    if (total_gt == 0) return -1.0;
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> recall, precision;
    recall.reserve(entries.size());
    precision.reserve(entries.size());
    std::size_t tp = 0, fp = 0;
    for (const auto& [score, is_tp] : entries) {
        is_tp ? ++tp : ++fp;
        recall.push_back(static_cast<double>(tp) / static_cast<double>(total_gt));
        precision.push_back(static_cast<double>(tp) /
                            static_cast<double>(tp + fp));
    }
    for (std::size_t i = precision.size(); i-- > 1;) {
        precision[i - 1] = std::max(precision[i - 1], precision[i]);
    }
    double sum = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double r = i / 100.0;
        const auto it = std::lower_bound(recall.begin(), recall.end(), r);
        if (it != recall.end()) sum += precision[it - recall.begin()];
    }
    return sum / 101.0;
}

namespace detail {

struct PageClassData {
    std::vector<Detection> dets;  // score-sorted descending, capped
    std::vector<Annotation> gts;
    std::vector<std::vector<double>> ious;  // det x gt
};

struct DetOutcome {
    double score;
    bool tp;
    bool ignore;
};

struct BucketAccum {
    std::vector<DetOutcome> entries;  // page order, page-locally score-sorted
    std::size_t gt_count = 0;         // non-ignored ground truth
};

// Reference-style matching with area-bucket ignores: ground truth outside the
// bucket never counts, detections matched to it (or unmatched and themselves
// outside the bucket) are dropped from both TP and FP.
inline void accumulate_bucket(const PageClassData& page, double thr,
                              AreaBucket bucket, BucketAccum& accum) {
    const std::size_t n_gt = page.gts.size();
    std::vector<std::size_t> gt_order;
    std::vector<bool> gt_ignore(n_gt);
    gt_order.reserve(n_gt);
    for (std::size_t g = 0; g < n_gt; ++g) {
        if (in_area_bucket(page.gts[g].bbox.area(), bucket)) gt_order.push_back(g);
    }
    const std::size_t n_counted = gt_order.size();
    for (std::size_t g = 0; g < n_gt; ++g) {
        if (!in_area_bucket(page.gts[g].bbox.area(), bucket)) gt_order.push_back(g);
    }
    for (std::size_t pos = 0; pos < n_gt; ++pos) gt_ignore[pos] = pos >= n_counted;
    accum.gt_count += n_counted;

    std::vector<bool> taken(n_gt, false);
    for (std::size_t d = 0; d < page.dets.size(); ++d) {
        double best = thr;
        std::size_t match = n_gt;
        for (std::size_t pos = 0; pos < n_gt; ++pos) {
            if (taken[pos]) continue;
            if (match < n_gt && !gt_ignore[match] && gt_ignore[pos]) break;
            const double v = page.ious[d][gt_order[pos]];
            if (v < best) continue;
            best = v;
            match = pos;
        }
        DetOutcome out{page.dets[d].score, false, false};
        if (match < n_gt) {
            taken[match] = true;
            out.tp = !gt_ignore[match];
            out.ignore = gt_ignore[match];
        } else {
            out.ignore = !in_area_bucket(page.dets[d].bbox.area(), bucket);
        }
        accum.entries.push_back(out);
    }
}

struct ApAndRecall {
    double ap = -1.0;
    double recall = -1.0;
};

inline ApAndRecall ap_from_accum(BucketAccum accum) {
    if (accum.gt_count == 0) return {};
    std::stable_sort(
        accum.entries.begin(), accum.entries.end(),
        [](const DetOutcome& a, const DetOutcome& b) { return a.score > b.score; });
    std::vector<double> recall, precision;
    std::size_t tp = 0, fp = 0;
    for (const DetOutcome& e : accum.entries) {
        if (e.ignore) continue;
        e.tp ? ++tp : ++fp;
        recall.push_back(static_cast<double>(tp) /
                         static_cast<double>(accum.gt_count));
        precision.push_back(static_cast<double>(tp) /
                            static_cast<double>(tp + fp));
    }
    for (std::size_t i = precision.size(); i-- > 1;) {
        precision[i - 1] = std::max(precision[i - 1], precision[i]);
    }
    double sum = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double r = i / 100.0;
        const auto it = std::lower_bound(recall.begin(), recall.end(), r);
        if (it != recall.end()) sum += precision[it - recall.begin()];
    }
    return {sum / 101.0, recall.empty() ? 0.0 : recall.back()};
}

inline double mean_defined(std::span<const double> values) {
    double sum = 0.0;
    std::size_t count = 0;
    for (double v : values) {
        if (v > -1.0) {
            sum += v;
            ++count;
        }
    }
    return count == 0 ? -1.0 : sum / static_cast<double>(count);
}

}  // namespace detail

inline CocoMetrics evaluate_coco(const Dataset& ds, const EvalOptions& opt = {}) {
    if (ds.pages.empty()) {
        throw EmptyDatasetError("evaluate_coco: dataset has no pages");
    }

    // Per-class detection and ground-truth views, IoUs precomputed per page.
    std::array<std::vector<detail::PageClassData>, kLabelCount> per_class_pages;
    std::array<bool, kLabelCount> class_seen{};
    for (const PageSample& page : ds.pages) {
        std::array<detail::PageClassData, kLabelCount> buckets;
        for (const Annotation& a : page.ground_truth) {
            buckets[static_cast<std::size_t>(a.label)].gts.push_back(a);
            class_seen[static_cast<std::size_t>(a.label)] = true;
        }
        for (const Detection& d : page.predictions) {
            if (opt.score_floor && d.score < *opt.score_floor) continue;
            buckets[static_cast<std::size_t>(d.label)].dets.push_back(d);
            class_seen[static_cast<std::size_t>(d.label)] = true;
        }
        for (std::size_t c = 0; c < kLabelCount; ++c) {
            auto& data = buckets[c];
            if (data.dets.empty() && data.gts.empty()) continue;
            std::stable_sort(
                data.dets.begin(), data.dets.end(),
                [](const Detection& a, const Detection& b) { return a.score > b.score; });
            if (data.dets.size() > static_cast<std::size_t>(opt.max_dets)) {
                data.dets.resize(static_cast<std::size_t>(opt.max_dets));
            }
            data.ious.assign(data.dets.size(),
                             std::vector<double>(data.gts.size(), 0.0));
            for (std::size_t d = 0; d < data.dets.size(); ++d) {
                for (std::size_t g = 0; g < data.gts.size(); ++g) {
                    data.ious[d][g] =
                        detail::match_iou(data.dets[d].bbox, data.gts[g].bbox);
                }
            }
            per_class_pages[c].push_back(std::move(data));
        }
    }

    CocoMetrics metrics;
    std::vector<double> class_map, class_ap50, class_ap75, class_ap95;
    std::vector<double> class_small, class_medium, class_large, class_ar;
    for (std::size_t c = 0; c < kLabelCount; ++c) {
        if (!class_seen[c]) continue;
        ClassMetrics cm;
        std::vector<double> ap_all, ap_small, ap_medium, ap_large, recalls;
        for (double thr : kIouThresholds) {
            for (AreaBucket bucket : kAreaBuckets) {
                detail::BucketAccum accum;
                for (const auto& page : per_class_pages[c]) {
                    detail::accumulate_bucket(page, thr, bucket, accum);
                }
                const auto result = detail::ap_from_accum(std::move(accum));
                switch (bucket) {
                    case AreaBucket::All:
                        ap_all.push_back(result.ap);
                        recalls.push_back(result.recall);
                        break;
                    case AreaBucket::Small: ap_small.push_back(result.ap); break;
                    case AreaBucket::Medium: ap_medium.push_back(result.ap); break;
                    case AreaBucket::Large: ap_large.push_back(result.ap); break;
                }
            }
        }
        cm.map_50_95 = detail::mean_defined(ap_all);
        cm.ap_50 = ap_all[0];
        cm.ap_75 = ap_all[5];
        cm.ap_95 = ap_all[9];
        cm.ap_small = detail::mean_defined(ap_small);
        cm.ap_medium = detail::mean_defined(ap_medium);
        cm.ap_large = detail::mean_defined(ap_large);
        cm.ar_50_95 = detail::mean_defined(recalls);
        metrics.per_class[static_cast<Label>(c)] = cm;
        class_map.push_back(cm.map_50_95);
        class_ap50.push_back(cm.ap_50);
        class_ap75.push_back(cm.ap_75);
        class_ap95.push_back(cm.ap_95);
        class_small.push_back(cm.ap_small);
        class_medium.push_back(cm.ap_medium);
        class_large.push_back(cm.ap_large);
        class_ar.push_back(cm.ar_50_95);
    }
    metrics.map_50_95 = detail::mean_defined(class_map);
    metrics.ap_50 = detail::mean_defined(class_ap50);
    metrics.ap_75 = detail::mean_defined(class_ap75);
    metrics.ap_95 = detail::mean_defined(class_ap95);
    metrics.ap_small = detail::mean_defined(class_small);
    metrics.ap_medium = detail::mean_defined(class_medium);
    metrics.ap_large = detail::mean_defined(class_large);
    metrics.ar_50_95 = detail::mean_defined(class_ar);
    return metrics;
}

}  // namespace layoutkit

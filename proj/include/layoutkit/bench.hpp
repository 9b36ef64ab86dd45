// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "layoutkit/dataset.hpp"
#include "layoutkit/errors.hpp"
#include "layoutkit/postprocess.hpp"

namespace layoutkit {

// A runner processes one batch of pre-loaded pages; the harness never times
// anything else. Output must be deterministic even though timing is not.
template <typename R>
concept PageRunner = std::invocable<R&, std::span<const PageSample>>;

struct RuntimeStats {
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    int batch_size = 1;
    std::string device;
    std::size_t n_images = 0;
};

// Amortized per-image wall time: pages are chunked into batches, each batch
// is timed with a monotonic clock and divided by its occupancy (the last
// batch may be partial). Stats run over the per-batch series after the
// warmup entries are dropped.
template <PageRunner Runner>
RuntimeStats run_benchmark(Runner&& runner, std::span<const PageSample> pages,
                           int batch_size, int warmup_batches = 1,
                           std::string_view device_tag = "cpu") {
    if (pages.empty()) {
        throw EmptyDatasetError("run_benchmark: no pages to process");
    }
    if (batch_size < 1) {
        throw ValidationError("run_benchmark: batch_size must be >= 1");
    }
    RuntimeStats stats;
    stats.batch_size = batch_size;
    stats.device = std::string(device_tag);
    stats.n_images = pages.size();

    const std::size_t n = pages.size();
    const std::size_t bs = static_cast<std::size_t>(batch_size);
    std::vector<double> per_image;  // one entry per batch
    using clock = std::chrono::steady_clock;
    for (std::size_t start = 0; start < n; start += bs) {
        const std::size_t occupancy = std::min(bs, n - start);
        const auto t0 = clock::now();
        runner(pages.subspan(start, occupancy));
        const auto t1 = clock::now();
        const double seconds = std::chrono::duration<double>(t1 - t0).count();
        per_image.push_back(seconds / static_cast<double>(occupancy));
    }

    // Warmup entries are discarded unless that would leave nothing to report.
    std::size_t skip = static_cast<std::size_t>(std::max(warmup_batches, 0));
    if (skip >= per_image.size()) skip = 0;
    std::vector<double> series(per_image.begin() + skip, per_image.end());

    std::sort(series.begin(), series.end());
    stats.min = series.front();
    stats.max = series.back();
    const std::size_t mid = series.size() / 2;
    stats.median = series.size() % 2 == 1
                       ? series[mid]
                       : 0.5 * (series[mid - 1] + series[mid]);
    double sum = 0.0;
    for (double v : series) sum += v;
    stats.mean = sum / static_cast<double>(series.size());
    return stats;
}

// The one runner this toolkit ships: its own post-processing pipeline.
inline RuntimeStats benchmark_postprocess(const Dataset& ds,
                                          const PipelineConfig& cfg,
                                          int batch_size, int warmup_batches = 1,
                                          std::string_view device_tag = "cpu") {
    std::size_t sink = 0;
    auto runner = [&](std::span<const PageSample> batch) {
        for (const PageSample& page : batch) {
            sink += postprocess_page(page, cfg).clusters.size();
        }
    };
    RuntimeStats stats =
        run_benchmark(runner, ds.pages, batch_size, warmup_batches, device_tag);
    if (sink == static_cast<std::size_t>(-1)) stats.n_images = 0;  // keep sink live
    return stats;
}

}  // namespace layoutkit

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "layoutkit/geometry.hpp"
#include "layoutkit/taxonomy.hpp"

namespace layoutkit {

struct Annotation {
    Label label = Label::Text;
    BBox bbox;
    std::int64_t id = 0;  // unique within its page
};

struct Detection {
    Label label = Label::Text;
    BBox bbox;
    double score = 0.0;
};

// Programmatic text fragment from the native PDF; the snapping substrate.
struct TextCell {
    std::int64_t id = 0;  // unique within its page
    BBox bbox;
    std::string text;
};

struct PageSample {
    std::string page_id;
    double width = 0.0;
    double height = 0.0;
    std::vector<Annotation> ground_truth;
    std::vector<Detection> predictions;
    std::optional<std::vector<TextCell>> cells;
};

// An ingested corpus. Pages keep the ground-truth file's image order;
// lookup tables join predictions and cells files onto pages.
struct Dataset {
    std::vector<PageSample> pages;
    std::map<std::int64_t, std::size_t> page_by_coco_id;
    std::map<std::string, std::size_t> page_by_name;
    std::map<std::int64_t, Label> category_labels;  // COCO category id -> label
    std::size_t dropped_ground_truth = 0;  // boxes fully outside their page
    std::size_t dropped_predictions = 0;

    const PageSample* find(const std::string& page_id) const {
        auto it = page_by_name.find(page_id);
        return it == page_by_name.end() ? nullptr : &pages[it->second];
    }
};

// Per-label annotation counts for train/val/test plus cross-footed totals.
struct SplitCounts {
    std::array<std::int64_t, kLabelCount> train{};
    std::array<std::int64_t, kLabelCount> val{};
    std::array<std::int64_t, kLabelCount> test{};

    std::int64_t label_total(Label l) const {
        const auto i = static_cast<std::size_t>(l);
        return train[i] + val[i] + test[i];
    }
    std::int64_t split_total(const std::array<std::int64_t, kLabelCount>& s) const {
        std::int64_t sum = 0;
        for (auto v : s) sum += v;
        return sum;
    }
    std::int64_t grand_total() const {
        return split_total(train) + split_total(val) + split_total(test);
    }
    // Row sums and column sums must agree.
    bool cross_foots() const {
        std::int64_t rows = 0;
        for (Label l : all_labels()) rows += label_total(l);
        return rows == grand_total();
    }
};

}  // namespace layoutkit

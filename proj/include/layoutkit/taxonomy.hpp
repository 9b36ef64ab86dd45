// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "layoutkit/errors.hpp"

namespace layoutkit {

// The 17 canonical document element categories, in table order.
enum class Label : std::uint8_t {
    Caption,
    CheckboxSelected,
    CheckboxUnselected,
    Code,
    DocumentIndex,
    Footnote,
    Form,
    Formula,
    KeyValueRegion,
    ListItem,
    PageFooter,
    PageHeader,
    Picture,
    SectionHeader,
    Table,
    Text,
    Title,
};

inline constexpr std::size_t kLabelCount = 17;

inline constexpr std::array<Label, kLabelCount> all_labels() {
    std::array<Label, kLabelCount> out{};
    for (std::size_t i = 0; i < kLabelCount; ++i) out[i] = static_cast<Label>(i);
    return out;
}

inline constexpr std::array<std::string_view, kLabelCount> kLabelNames = {
    "Caption",        "Checkbox-Selected", "Checkbox-Unselected",
    "Code",           "Document Index",    "Footnote",
    "Form",           "Formula",           "Key-Value Region",
    "List-item",      "Page-footer",       "Page-header",
    "Picture",        "Section-header",    "Table",
    "Text",           "Title",
};

inline std::string_view label_name(Label l) {
    return kLabelNames[static_cast<std::size_t>(l)];
}

namespace detail {

// Lowercase, '-'/'_' treated as spaces, runs of whitespace collapsed.
inline std::string normalize_label_name(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    bool pending_space = false;
    for (char c : name) {
        if (c == '-' || c == '_' || std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace detail

inline Label parse_label(std::string_view name) {
    const std::string key = detail::normalize_label_name(name);
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        if (key == detail::normalize_label_name(kLabelNames[i])) {
            return static_cast<Label>(i);
        }
    }
    std::string msg = "unknown label \"" + std::string(name) + "\"; valid labels:";
    for (auto n : kLabelNames) {
        msg += ' ';
        msg += n;
        msg += ',';
    }
    msg.pop_back();
    throw UnknownLabelError(msg);
}

// Processing category: regular elements snap to PDF cells, pictures and
// wrappers may hold child elements.
enum class LabelRole : std::uint8_t { Regular, Picture, Wrapper };

inline LabelRole role_of(Label l) {
    switch (l) {
        case Label::Picture:
            return LabelRole::Picture;
        case Label::Form:
        case Label::KeyValueRegion:
        case Label::Table:
        case Label::DocumentIndex:
            return LabelRole::Wrapper;
        default:
            return LabelRole::Regular;
    }
}

inline const std::set<Label>& default_delta_labels() {
    static const std::set<Label> delta = {
        Label::DocumentIndex,    Label::Code, Label::CheckboxSelected,
        Label::CheckboxUnselected, Label::Form, Label::KeyValueRegion,
    };
    return delta;
}

// Default best-proposal preference: wrappers first, then Picture, then
// regular labels in table order.
inline std::vector<Label> default_priority() {
    std::vector<Label> order = {Label::Form, Label::KeyValueRegion, Label::Table,
                                Label::DocumentIndex, Label::Picture};
    for (Label l : all_labels()) {
        if (role_of(l) == LabelRole::Regular) order.push_back(l);
    }
    return order;
}

struct TaxonomyConfig {
    std::array<double, kLabelCount> min_score;  // per-label confidence gate
    std::vector<Label> priority = default_priority();
    double overlap_threshold = 0.5;
    double picture_page_coverage_limit = 0.90;
    std::set<Label> delta_labels = default_delta_labels();

    TaxonomyConfig() { min_score.fill(0.5); }

    double min_score_for(Label l) const {
        return min_score[static_cast<std::size_t>(l)];
    }

    // Lower rank wins. Labels missing from a custom priority list rank
    // after the listed ones, in table order.
    int priority_rank(Label l) const {
        for (std::size_t i = 0; i < priority.size(); ++i) {
            if (priority[i] == l) return static_cast<int>(i);
        }
        int rank = static_cast<int>(priority.size());
        for (Label other : all_labels()) {
            bool listed = false;
            for (Label p : priority) {
                if (p == other) { listed = true; break; }
            }
            if (listed) continue;
            if (other == l) return rank;
            ++rank;
        }
        return rank;
    }

    static TaxonomyConfig from_json(const nlohmann::json& j) {
        TaxonomyConfig cfg;
        if (j.contains("min_score")) {
            for (const auto& [name, value] : j.at("min_score").items()) {
                cfg.min_score[static_cast<std::size_t>(parse_label(name))] =
                    value.get<double>();
            }
        }
        if (j.contains("priority")) {
            cfg.priority.clear();
            for (const auto& name : j.at("priority")) {
                Label l = parse_label(name.get<std::string>());
                for (Label seen : cfg.priority) {
                    if (seen == l) {
                        throw ValidationError("priority lists label twice: " +
                                              std::string(label_name(l)));
                    }
                }
                cfg.priority.push_back(l);
            }
        }
        if (j.contains("overlap_threshold")) {
            cfg.overlap_threshold = j.at("overlap_threshold").get<double>();
        }
        if (j.contains("picture_page_coverage_limit")) {
            cfg.picture_page_coverage_limit =
                j.at("picture_page_coverage_limit").get<double>();
        }
        if (j.contains("delta_labels")) {
            cfg.delta_labels.clear();
            for (const auto& name : j.at("delta_labels")) {
                cfg.delta_labels.insert(parse_label(name.get<std::string>()));
            }
        }
        return cfg;
    }

    static TaxonomyConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open config file: " + path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("config: ") + e.what(), e.byte);
        }
        return from_json(j);
    }
};

}  // namespace layoutkit

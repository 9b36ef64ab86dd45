// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <fmt/core.h>
#include <json.hpp>

#include "layoutkit/bench.hpp"
#include "layoutkit/curation.hpp"
#include "layoutkit/eval_coco.hpp"
#include "layoutkit/eval_docling.hpp"

namespace layoutkit {

enum class ReportFormat { Markdown, Csv, Json };

inline ReportFormat report_format_from_path(const std::string& path) {
    auto ends_with = [&](const char* suffix) {
        const std::string s(suffix);
        return path.size() >= s.size() &&
               path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".md")) return ReportFormat::Markdown;
    if (ends_with(".csv")) return ReportFormat::Csv;
    if (ends_with(".json")) return ReportFormat::Json;
    throw ValidationError("report path must end in .md, .csv or .json: " + path);
}

namespace detail {

// Markdown rounds to the tabulated precision; CSV/JSON stay lossless.
inline std::string md_num(double v) { return fmt::format("{:.3f}", v); }
inline std::string full_num(double v) { return fmt::format("{}", v); }

}  // namespace detail

inline nlohmann::json to_json(const ClassMetrics& m) {
    return {{"mAP_50_95", m.map_50_95}, {"AP_50", m.ap_50},
            {"AP_75", m.ap_75},         {"AP_95", m.ap_95},
            {"AP_small", m.ap_small},   {"AP_medium", m.ap_medium},
            {"AP_large", m.ap_large},   {"AR_50_95", m.ar_50_95}};
}

inline nlohmann::json to_json(const CocoMetrics& m) {
    nlohmann::json j = {{"mAP_50_95", m.map_50_95}, {"AP_50", m.ap_50},
                        {"AP_75", m.ap_75},         {"AP_95", m.ap_95},
                        {"AP_small", m.ap_small},   {"AP_medium", m.ap_medium},
                        {"AP_large", m.ap_large},   {"AR_50_95", m.ar_50_95}};
    j["per_class"] = nlohmann::json::object();
    for (const auto& [label, cm] : m.per_class) {
        j["per_class"][std::string(label_name(label))] = to_json(cm);
    }
    return j;
}

inline nlohmann::json to_json(const DoclingEvalReport& r) {
    nlohmann::json labels = nlohmann::json::array();
    for (Label l : r.label_intersection) labels.push_back(std::string(label_name(l)));
    return {{"mAP_50_95", r.map_50_95},
            {"samples_total", r.samples_total},
            {"samples_skipped", r.samples_skipped},
            {"label_intersection", labels}};
}

inline nlohmann::json to_json(const RuntimeStats& s) {
    return {{"device", s.device}, {"batch_size", s.batch_size},
            {"model", "postprocess"}, {"mean", s.mean},
            {"median", s.median},     {"min", s.min},
            {"max", s.max}};
}

inline nlohmann::json to_json(const CurationReport& r) {
    nlohmann::json hits = nlohmann::json::object();
    for (const auto& [label, count] : r.delta_hits) {
        hits[std::string(label_name(label))] = count;
    }
    return {{"threshold", r.threshold},
            {"pages_total", r.pages_total},
            {"pages_excluded", r.pages_excluded},
            {"exclusion_fraction", r.exclusion_fraction},
            {"delta_hits", hits}};
}

inline void from_json(const nlohmann::json& j, ClassMetrics& m) {
    m.map_50_95 = j.at("mAP_50_95").get<double>();
    m.ap_50 = j.at("AP_50").get<double>();
    m.ap_75 = j.at("AP_75").get<double>();
    m.ap_95 = j.at("AP_95").get<double>();
    m.ap_small = j.at("AP_small").get<double>();
    m.ap_medium = j.at("AP_medium").get<double>();
    m.ap_large = j.at("AP_large").get<double>();
    m.ar_50_95 = j.at("AR_50_95").get<double>();
}

inline void from_json(const nlohmann::json& j, CocoMetrics& m) {
    ClassMetrics top;
    from_json(j, top);
    m.map_50_95 = top.map_50_95;
    m.ap_50 = top.ap_50;
    m.ap_75 = top.ap_75;
    m.ap_95 = top.ap_95;
    m.ap_small = top.ap_small;
    m.ap_medium = top.ap_medium;
    m.ap_large = top.ap_large;
    m.ar_50_95 = top.ar_50_95;
    m.per_class.clear();
    for (const auto& [name, cj] : j.at("per_class").items()) {
        ClassMetrics cm;
        from_json(cj, cm);
        m.per_class[parse_label(name)] = cm;
    }
}

namespace detail {

// Column order follows the published table: mAP-50:95, AP-50, AP-75,
// AP-large, AP-medium, AP-small.
inline void coco_row(std::string& out, const std::string& name,
                     const ClassMetrics& m, bool markdown, bool with_ap95) {
    const char* sep = markdown ? " | " : ",";
    auto num = [&](double v) { return markdown ? md_num(v) : full_num(v); };
    if (markdown) out += "| ";
    out += name;
    out += sep;
    out += num(m.map_50_95) + sep + num(m.ap_50) + sep + num(m.ap_75) + sep +
           num(m.ap_large) + sep + num(m.ap_medium) + sep + num(m.ap_small);
    if (with_ap95) out += sep + num(m.ap_95);
    out += markdown ? " |\n" : "\n";
}

inline ClassMetrics aggregate_of(const CocoMetrics& m) {
    ClassMetrics agg;
    agg.map_50_95 = m.map_50_95;
    agg.ap_50 = m.ap_50;
    agg.ap_75 = m.ap_75;
    agg.ap_95 = m.ap_95;
    agg.ap_small = m.ap_small;
    agg.ap_medium = m.ap_medium;
    agg.ap_large = m.ap_large;
    agg.ar_50_95 = m.ar_50_95;
    return agg;
}

}  // namespace detail

inline std::string emit_report(const CocoMetrics& m, ReportFormat format,
                               bool with_ap95 = false) {
    if (format == ReportFormat::Json) return to_json(m).dump(2) + "\n";
    std::string out;
    const bool markdown = format == ReportFormat::Markdown;
    if (markdown) {
        out += "| Class | mAP-50:95 | AP-50 | AP-75 | AP-large | AP-medium | AP-small |";
        if (with_ap95) out += " AP-95 |";
        out += "\n|---|---|---|---|---|---|---|";
        if (with_ap95) out += "---|";
        out += "\n";
    } else {
        out += "class,mAP-50:95,AP-50,AP-75,AP-large,AP-medium,AP-small";
        if (with_ap95) out += ",AP-95";
        out += "\n";
    }
    detail::coco_row(out, "(all)", detail::aggregate_of(m), markdown, with_ap95);
    for (const auto& [label, cm] : m.per_class) {
        detail::coco_row(out, std::string(label_name(label)), cm, markdown,
                         with_ap95);
    }
    if (markdown) {
        out += fmt::format("\nAR-50:95: {}\n", detail::md_num(m.ar_50_95));
    }
    return out;
}

inline std::string emit_report(const DoclingEvalReport& r, ReportFormat format) {
    if (format == ReportFormat::Json) return to_json(r).dump(2) + "\n";
    std::string labels;
    for (Label l : r.label_intersection) {
        if (!labels.empty()) labels += "; ";
        labels += std::string(label_name(l));
    }
    if (format == ReportFormat::Markdown) {
        std::string out = "| mAP-50:95 | samples | skipped |\n|---|---|---|\n";
        out += fmt::format("| {} | {} | {} |\n", detail::md_num(r.map_50_95),
                           r.samples_total, r.samples_skipped);
        out += fmt::format("\nLabel intersection: {}\n", labels);
        return out;
    }
    return fmt::format("mAP-50:95,samples,skipped,label_intersection\n{},{},{},{}\n",
                       detail::full_num(r.map_50_95), r.samples_total,
                       r.samples_skipped, labels);
}

inline std::string emit_report(const RuntimeStats& s, ReportFormat format) {
    if (format == ReportFormat::Json) return to_json(s).dump(2) + "\n";
    if (format == ReportFormat::Markdown) {
        std::string out =
            "| Device | Batch-Size | Model | mean | median | min | max |\n"
            "|---|---|---|---|---|---|---|\n";
        out += fmt::format("| {} | {} | postprocess | {} | {} | {} | {} |\n",
                           s.device, s.batch_size, detail::md_num(s.mean),
                           detail::md_num(s.median), detail::md_num(s.min),
                           detail::md_num(s.max));
        return out;
    }
    return fmt::format(
        "device,batch_size,model,mean,median,min,max\n{},{},postprocess,{},{},{},{}\n",
        s.device, s.batch_size, detail::full_num(s.mean),
        detail::full_num(s.median), detail::full_num(s.min),
        detail::full_num(s.max));
}

inline std::string emit_report(const CurationReport& r, ReportFormat format) {
    if (format == ReportFormat::Json) return to_json(r).dump(2) + "\n";
    if (format == ReportFormat::Markdown) {
        std::string out =
            "| Threshold | Pages | Excluded | Fraction |\n|---|---|---|---|\n";
        out += fmt::format("| {} | {} | {} | {} |\n", detail::full_num(r.threshold),
                           r.pages_total, r.pages_excluded,
                           detail::md_num(r.exclusion_fraction));
        out += "\n| Delta label | Pages hit |\n|---|---|\n";
        for (const auto& [label, count] : r.delta_hits) {
            out += fmt::format("| {} | {} |\n", label_name(label), count);
        }
        return out;
    }
    std::string out = "threshold,pages_total,pages_excluded,exclusion_fraction\n";
    out += fmt::format("{},{},{},{}\n", detail::full_num(r.threshold),
                       r.pages_total, r.pages_excluded,
                       detail::full_num(r.exclusion_fraction));
    return out;
}

}  // namespace layoutkit

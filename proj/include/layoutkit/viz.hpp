// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "layoutkit/dataset.hpp"
#include "layoutkit/errors.hpp"
#include "layoutkit/postprocess.hpp"

namespace layoutkit {

enum class PanelSource { GroundTruth, RawPredictions, GatedPredictions, Clusters };

struct PanelSpec {
    std::string title;
    PanelSource source = PanelSource::GroundTruth;
};

// Self-contained SVG document, 1-3 page panels side by side.
struct OverlayDoc {
    int panel_count = 0;
    double width = 0.0;
    double height = 0.0;
    std::string svg;
};

// Fixed per-label palette keyed by table order, so renders are stable.
inline constexpr std::array<std::string_view, kLabelCount> kLabelColors = {
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4",
    "#46f0f0", "#f032e6", "#bcf60c", "#fabebe", "#008080", "#e6beff",
    "#9a6324", "#fffac8", "#800000", "#aaffc3", "#808000",
};

inline std::string_view label_color(Label l) {
    return kLabelColors[static_cast<std::size_t>(l)];
}

namespace detail {

inline std::string svg_num(double v) { return fmt::format("{}", v); }

struct OverlayBox {
    Label label;
    BBox bbox;
    double score = -1.0;  // negative: no score badge
};

inline void draw_boxes(std::string& svg, const std::vector<OverlayBox>& boxes,
                       double dx) {
    for (const OverlayBox& b : boxes) {
        const auto color = label_color(b.label);
        svg += fmt::format(
            "    <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
            "fill=\"{}\" fill-opacity=\"0.3\" stroke=\"{}\" stroke-width=\"1\"/>\n",
            svg_num(b.bbox.left + dx), svg_num(b.bbox.top), svg_num(b.bbox.width()),
            svg_num(b.bbox.height()), color, color);
        std::string badge(label_name(b.label));
        if (b.score >= 0.0) badge += fmt::format(" {:.2f}", b.score);
        svg += fmt::format(
            "    <text x=\"{}\" y=\"{}\" font-size=\"9\" "
            "font-family=\"sans-serif\" fill=\"{}\">{}</text>\n",
            svg_num(b.bbox.left + dx + 2.0), svg_num(b.bbox.top + 10.0), color,
            badge);
    }
}

}  // namespace detail

// Side-by-side overlay panels in the style of the qualitative figures:
// one page rectangle per panel, translucent label-colored boxes on top.
// `clusters` is required only when a panel asks for the Clusters source.
inline OverlayDoc render_overlay(const PageSample& page,
                                 const std::vector<PanelSpec>& panels,
                                 const PipelineConfig& cfg = {},
                                 const PageClusters* clusters = nullptr) {
    if (panels.empty() || panels.size() > 3) {
        throw ValidationError("render_overlay: panel count must be 1..3");
    }
    constexpr double kGap = 24.0;
    constexpr double kTitleBand = 18.0;
    OverlayDoc doc;
    doc.panel_count = static_cast<int>(panels.size());
    doc.width = page.width * panels.size() + kGap * (panels.size() - 1);
    doc.height = page.height + kTitleBand;

    std::string& svg = doc.svg;
    svg += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
        "viewBox=\"0 0 {} {}\">\n",
        detail::svg_num(doc.width), detail::svg_num(doc.height),
        detail::svg_num(doc.width), detail::svg_num(doc.height));
    svg += "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const double dx = p * (page.width + kGap);
        std::vector<detail::OverlayBox> boxes;
        switch (panels[p].source) {
            case PanelSource::GroundTruth:
                for (const Annotation& a : page.ground_truth) {
                    boxes.push_back({a.label, a.bbox, -1.0});
                }
                break;
            case PanelSource::RawPredictions:
                for (const Detection& d : page.predictions) {
                    boxes.push_back({d.label, d.bbox, d.score});
                }
                break;
            case PanelSource::GatedPredictions:
                for (const Detection& d : gate_by_confidence(page.predictions, cfg)) {
                    boxes.push_back({d.label, d.bbox, d.score});
                }
                break;
            case PanelSource::Clusters:
                if (clusters == nullptr) {
                    throw MissingSourceError(
                        "render_overlay: clusters panel requested but no clusters "
                        "were provided");
                }
                for (const Cluster& c : clusters->clusters) {
                    boxes.push_back({c.label, c.bbox, c.score});
                }
                break;
        }
        svg += fmt::format("  <g id=\"panel{}\">\n", p);
        svg += fmt::format(
            "    <text x=\"{}\" y=\"12\" font-size=\"11\" "
            "font-family=\"sans-serif\" fill=\"#000000\">{}</text>\n",
            detail::svg_num(dx), panels[p].title);
        svg += fmt::format(
            "    <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" "
            "fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n",
            detail::svg_num(dx), detail::svg_num(kTitleBand),
            detail::svg_num(page.width), detail::svg_num(page.height));
        svg += fmt::format("    <g transform=\"translate(0 {})\">\n",
                           detail::svg_num(kTitleBand));
        detail::draw_boxes(svg, boxes, dx);
        svg += "    </g>\n";
        svg += "  </g>\n";
    }
    svg += "</svg>\n";
    return doc;
}

inline PanelSource panel_source_from_name(const std::string& name) {
    if (name == "gt") return PanelSource::GroundTruth;
    if (name == "raw") return PanelSource::RawPredictions;
    if (name == "gated") return PanelSource::GatedPredictions;
    if (name == "clusters") return PanelSource::Clusters;
    throw ValidationError("unknown panel source: " + name +
                          " (expected gt, raw, gated or clusters)");
}

}  // namespace layoutkit

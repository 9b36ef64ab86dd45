// SPDX-License-Identifier: Apache-2.0
//
// layoutkit command line: post-process detector output, score it under the
// COCO and docling-eval protocols, curate corpora, benchmark the pipeline,
// and render overlay visualizations.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "layoutkit/layoutkit.hpp"

namespace {

using namespace layoutkit;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

PipelineConfig load_config(const std::string& path) {
    if (path.empty()) return PipelineConfig{};
    return PipelineConfig::load(path);
}

Dataset load_inputs(const std::string& gt_path, const std::string& pred_path,
                    const std::string& cells_path) {
    Dataset ds = load_ground_truth(gt_path);
    if (!pred_path.empty()) load_predictions(pred_path, ds);
    if (!cells_path.empty()) load_cells(cells_path, ds);
    return ds;
}

// Swaps raw predictions for post-processed clusters, flattened back to
// detections; this is the "docling" evaluation mode.
void apply_postprocess(Dataset& ds, const PipelineConfig& cfg, unsigned threads) {
    const auto results = postprocess_dataset(ds, cfg, threads);
    for (std::size_t i = 0; i < ds.pages.size(); ++i) {
        ds.pages[i].predictions = detections_from_clusters(results[i]);
    }
}

std::vector<std::string> split_csv_list(const std::string& value) {
    std::vector<std::string> out;
    std::string current;
    for (char c : value) {
        if (c == ',') {
            out.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    out.push_back(current);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Document layout post-processing and evaluation toolkit"};
    app.require_subcommand(1);

    // ---- postprocess ----
    std::string pp_gt, pp_pred, pp_cells, pp_config, pp_out;
    unsigned pp_threads = 1;
    auto* pp = app.add_subcommand(
        "postprocess", "Convert raw detections into clean layout clusters");
    pp->add_option("--gt", pp_gt, "COCO ground-truth JSON")->required();
    pp->add_option("--pred", pp_pred, "COCO results JSON")->required();
    pp->add_option("--cells", pp_cells, "PDF text cells JSON");
    pp->add_option("--config", pp_config, "pipeline config JSON");
    pp->add_option("--out", pp_out, "output clusters JSON")->required();
    pp->add_option("--threads", pp_threads, "worker threads");

    // ---- eval-coco ----
    std::string ec_gt, ec_pred, ec_cells, ec_config, ec_report;
    std::optional<double> ec_floor;
    bool ec_post = false, ec_ap95 = false;
    int ec_max_dets = 100;
    unsigned ec_threads = 1;
    auto* ec = app.add_subcommand("eval-coco",
                                  "COCO-style detection metrics (mAP 50:95)");
    ec->add_option("--gt", ec_gt)->required();
    ec->add_option("--pred", ec_pred)->required();
    ec->add_option("--score-floor", ec_floor,
                   "drop detections scoring below this before evaluating");
    ec->add_flag("--postprocess", ec_post,
                 "run the post-processing pipeline before evaluating");
    ec->add_option("--cells", ec_cells, "PDF text cells JSON (with --postprocess)");
    ec->add_option("--config", ec_config, "pipeline config JSON (with --postprocess)");
    ec->add_option("--max-dets", ec_max_dets, "per-page, per-class detection cap");
    ec->add_flag("--ap95", ec_ap95, "include the AP-95 column in reports");
    ec->add_option("--threads", ec_threads, "worker threads for --postprocess");
    ec->add_option("--report", ec_report, "output report (.md, .csv or .json)")
        ->required();

    // ---- eval-docling ----
    std::string ed_gt, ed_pred, ed_cells, ed_config, ed_report;
    bool ed_post = false;
    unsigned ed_threads = 1;
    auto* ed = app.add_subcommand("eval-docling",
                                  "document-targeted evaluation protocol");
    ed->add_option("--gt", ed_gt)->required();
    ed->add_option("--pred", ed_pred)->required();
    ed->add_flag("--postprocess", ed_post);
    ed->add_option("--cells", ed_cells);
    ed->add_option("--config", ed_config);
    ed->add_option("--threads", ed_threads);
    ed->add_option("--report", ed_report)->required();

    // ---- curate ----
    std::string cu_gt, cu_dets, cu_out, cu_report, cu_config;
    double cu_threshold = 0.3;
    auto* cu = app.add_subcommand(
        "curate", "exclude pages flagged for delta-class content");
    cu->add_option("--gt", cu_gt);
    cu->add_option("--filter-dets", cu_dets,
                   "filtering-detector results JSON (COCO results format)");
    cu->add_option("--threshold", cu_threshold, "flagging confidence threshold");
    cu->add_option("--config", cu_config, "config JSON (overrides delta labels)");
    cu->add_option("--out", cu_out, "curated COCO ground-truth JSON");
    cu->add_option("--report", cu_report, "curation report (.md, .csv or .json)");

    std::string ex_gt, ex_out;
    auto* ex = cu->add_subcommand("excise-tables",
                                  "drop pages containing any table annotation");
    ex->add_option("--gt", ex_gt)->required();
    ex->add_option("--out", ex_out)->required();

    // ---- bench ----
    std::string be_gt, be_pred, be_cells, be_config, be_report, be_device = "cpu";
    int be_batch = 32, be_warmup = 1;
    auto* be = app.add_subcommand(
        "bench", "time the post-processing pipeline, amortized per image");
    be->add_option("--gt", be_gt)->required();
    be->add_option("--pred", be_pred)->required();
    be->add_option("--cells", be_cells);
    be->add_option("--config", be_config);
    be->add_option("--batch-size", be_batch);
    be->add_option("--warmup", be_warmup, "warmup batches dropped from stats");
    be->add_option("--device-tag", be_device, "free-form device label");
    be->add_option("--report", be_report)->required();

    // ---- viz ----
    std::string vz_gt, vz_pred, vz_cells, vz_config, vz_page, vz_out;
    std::string vz_panels = "gt,raw,gated";
    auto* vz = app.add_subcommand("viz", "render side-by-side overlay panels");
    vz->add_option("--gt", vz_gt)->required();
    vz->add_option("--pred", vz_pred)->required();
    vz->add_option("--cells", vz_cells);
    vz->add_option("--config", vz_config);
    vz->add_option("--page", vz_page, "page id to render")->required();
    vz->add_option("--panels", vz_panels,
                   "comma list drawn left to right: gt, raw, gated, clusters");
    vz->add_option("--out", vz_out, "output SVG")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (pp->parsed()) {
            const PipelineConfig cfg = load_config(pp_config);
            Dataset ds = load_inputs(pp_gt, pp_pred, pp_cells);
            const auto results = postprocess_dataset(ds, cfg, pp_threads);
            write_file(pp_out, clusters_to_json(results).dump(2) + "\n");
        } else if (ec->parsed()) {
            const PipelineConfig cfg = load_config(ec_config);
            Dataset ds = load_inputs(ec_gt, ec_pred, ec_cells);
            if (ec_post) apply_postprocess(ds, cfg, ec_threads);
            EvalOptions opt;
            opt.score_floor = ec_floor;
            opt.max_dets = ec_max_dets;
            const CocoMetrics metrics = evaluate_coco(ds, opt);
            write_file(ec_report, emit_report(metrics,
                                              report_format_from_path(ec_report),
                                              ec_ap95));
        } else if (ed->parsed()) {
            const PipelineConfig cfg = load_config(ed_config);
            Dataset ds = load_inputs(ed_gt, ed_pred, ed_cells);
            if (ed_post) apply_postprocess(ds, cfg, ed_threads);
            const DoclingEvalReport report = evaluate_docling(ds);
            write_file(ed_report,
                       emit_report(report, report_format_from_path(ed_report)));
        } else if (ex->parsed()) {
            const Dataset ds = load_ground_truth(ex_gt);
            const Dataset curated = excise_tabled_pages(ds);
            write_file(ex_out, export_coco(curated).dump(2) + "\n");
        } else if (cu->parsed()) {
            if (cu_gt.empty() || cu_dets.empty()) {
                std::cerr << "curate requires --gt and --filter-dets\n";
                return 1;
            }
            Dataset ds = load_ground_truth(cu_gt);
            load_predictions(cu_dets, ds);
            std::set<Label> delta = default_delta_labels();
            if (!cu_config.empty()) {
                delta = TaxonomyConfig::load(cu_config).delta_labels;
            }
            auto [curated, report] = curate_dataset(ds, delta, cu_threshold);
            if (!cu_out.empty()) {
                write_file(cu_out, export_coco(curated).dump(2) + "\n");
            }
            if (!cu_report.empty()) {
                write_file(cu_report,
                           emit_report(report, report_format_from_path(cu_report)));
            }
        } else if (be->parsed()) {
            const PipelineConfig cfg = load_config(be_config);
            const Dataset ds = load_inputs(be_gt, be_pred, be_cells);
            if (static_cast<std::size_t>(be_batch) > ds.pages.size()) {
                std::cerr << "warning: batch size exceeds page count; "
                             "running a single partial batch\n";
            }
            const RuntimeStats stats =
                benchmark_postprocess(ds, cfg, be_batch, be_warmup, be_device);
            write_file(be_report,
                       emit_report(stats, report_format_from_path(be_report)));
        } else if (vz->parsed()) {
            const PipelineConfig cfg = load_config(vz_config);
            Dataset ds = load_inputs(vz_gt, vz_pred, vz_cells);
            const PageSample* page = ds.find(vz_page);
            if (page == nullptr) {
                std::cerr << "page not found: " << vz_page << "\n";
                return 1;
            }
            std::vector<PanelSpec> panels;
            bool needs_clusters = false;
            for (const std::string& name : split_csv_list(vz_panels)) {
                const PanelSource source = panel_source_from_name(name);
                needs_clusters = needs_clusters || source == PanelSource::Clusters;
                panels.push_back({name, source});
            }
            PageClusters clusters;
            if (needs_clusters) clusters = postprocess_page(*page, cfg);
            const OverlayDoc doc = render_overlay(
                *page, panels, cfg, needs_clusters ? &clusters : nullptr);
            write_file(vz_out, doc.svg);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

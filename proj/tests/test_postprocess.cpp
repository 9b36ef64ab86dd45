// SPDX-License-Identifier: Apache-2.0
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "layoutkit/ingest.hpp"
#include "layoutkit/postprocess.hpp"

using namespace layoutkit;

namespace {

Cluster make_cluster(std::int64_t id, Label label, BBox bbox, double score) {
    Cluster c;
    c.id = id;
    c.label = label;
    c.bbox = bbox;
    c.score = score;
    return c;
}

Detection det(Label label, BBox bbox, double score) {
    return Detection{label, bbox, score};
}

const std::string kFixtureDir = LAYOUTKIT_FIXTURE_DIR;

}  // namespace

TEST_CASE("gate_by_confidence", "[postprocess]") {
    const PipelineConfig cfg;
    SECTION("default 0.5 gate") {
        const auto kept = gate_by_confidence(
            {det(Label::Text, {0, 0, 1, 1}, 0.7), det(Label::Table, {0, 0, 1, 1}, 0.3)},
            cfg);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].label == Label::Text);
    }
    SECTION("all-zero map keeps everything in order") {
        PipelineConfig zero;
        zero.taxonomy.min_score.fill(0.0);
        const auto kept = gate_by_confidence(
            {det(Label::Text, {0, 0, 1, 1}, 0.1), det(Label::Table, {0, 0, 1, 1}, 0.0)},
            zero);
        REQUIRE(kept.size() == 2);
        CHECK(kept[0].label == Label::Text);
        CHECK(kept[1].label == Label::Table);
    }
    SECTION("per-label gate") {
        PipelineConfig text08;
        text08.taxonomy.min_score[static_cast<std::size_t>(Label::Text)] = 0.8;
        const auto kept = gate_by_confidence(
            {det(Label::Text, {0, 0, 1, 1}, 0.7), det(Label::Table, {0, 0, 1, 1}, 0.7)},
            text08);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].label == Label::Table);
    }
    SECTION("boundary score is kept") {
        const auto kept =
            gate_by_confidence({det(Label::Text, {0, 0, 1, 1}, 0.5)}, cfg);
        CHECK(kept.size() == 1);
    }
}

TEST_CASE("assign_cells picks the best-covering regular cluster", "[postprocess]") {
    const PipelineConfig cfg;
    SECTION("max fraction wins") {
        std::vector<Cluster> clusters = {
            make_cluster(0, Label::Text, {0, 0, 80, 10}, 0.9),
            make_cluster(1, Label::Text, {90, 0, 200, 10}, 0.9),
        };
        // 80% inside cluster 0, 10% inside cluster 1
        const std::vector<TextCell> cells = {{7, {0, 0, 100, 10}, "x"}};
        assign_cells(clusters, cells, cfg);
        CHECK(clusters[0].cell_ids == std::vector<std::int64_t>{7});
        CHECK(clusters[1].cell_ids.empty());
    }
    SECTION("below-threshold overlap leaves the cell orphaned") {
        std::vector<Cluster> clusters = {
            make_cluster(0, Label::Text, {0, 0, 10, 10}, 0.9)};
        const std::vector<TextCell> cells = {{1, {8, 0, 28, 10}, "x"}};  // 10% inside
        assign_cells(clusters, cells, cfg);
        CHECK(clusters[0].cell_ids.empty());
    }
    SECTION("exact 50/50 tie goes to the lower id") {
        std::vector<Cluster> clusters = {
            make_cluster(0, Label::Text, {0, 0, 10, 10}, 0.7),
            make_cluster(1, Label::Text, {10, 0, 20, 10}, 0.7),
        };
        const std::vector<TextCell> cells = {{5, {5, 0, 15, 10}, "x"}};
        assign_cells(clusters, cells, cfg);
        CHECK(clusters[0].cell_ids == std::vector<std::int64_t>{5});
        CHECK(clusters[1].cell_ids.empty());
    }
    SECTION("wrappers and pictures never take cells") {
        std::vector<Cluster> clusters = {
            make_cluster(0, Label::Table, {0, 0, 100, 100}, 0.9)};
        const std::vector<TextCell> cells = {{1, {10, 10, 20, 20}, "x"}};
        assign_cells(clusters, cells, cfg);
        CHECK(clusters[0].cell_ids.empty());
    }
}

TEST_CASE("snap_to_cells", "[postprocess]") {
    const std::vector<TextCell> cells = {
        {1, {10, 10, 50, 20}, "a"},
        {2, {10, 25, 60, 35}, "b"},
        {3, {0, 0, 200, 15}, "wide"},
    };
    SECTION("union of assigned cells") {
        Cluster c = make_cluster(0, Label::Text, {0, 0, 100, 100}, 0.9);
        c.cell_ids = {1, 2};
        snap_to_cells(c, cells);
        CHECK(c.bbox == BBox{10, 10, 60, 35});
    }
    SECTION("no cells leaves the box alone") {
        Cluster c = make_cluster(0, Label::Text, {3, 4, 5, 6}, 0.9);
        snap_to_cells(c, cells);
        CHECK(c.bbox == BBox{3, 4, 5, 6});
    }
    SECTION("a larger cell grows the box") {
        Cluster c = make_cluster(0, Label::Text, {10, 2, 30, 12}, 0.9);
        c.cell_ids = {3};
        snap_to_cells(c, cells);
        CHECK(c.bbox == BBox{0, 0, 200, 15});
    }
}

TEST_CASE("discard_oversized_pictures", "[postprocess]") {
    const PipelineConfig cfg;
    const double w = 100, h = 100;
    std::vector<Cluster> clusters = {
        make_cluster(0, Label::Picture, {0, 0, 100, 95}, 0.9),   // 95%
        make_cluster(1, Label::Picture, {0, 0, 100, 50}, 0.9),   // 50%
        make_cluster(2, Label::Picture, {0, 0, 100, 90}, 0.9),   // exactly 90%
        make_cluster(3, Label::Table, {0, 0, 100, 100}, 0.9),    // not a picture
    };
    discard_oversized_pictures(clusters, w, h, cfg);
    REQUIRE(clusters.size() == 3);
    CHECK(clusters[0].id == 1);
    CHECK(clusters[1].id == 2);
    CHECK(clusters[2].id == 3);
}

TEST_CASE("attach_children", "[postprocess]") {
    const PipelineConfig cfg;
    SECTION("text fully inside a form becomes its child") {
        ClusterSet set = ClusterSet::from_clusters({
            make_cluster(0, Label::Form, {0, 0, 100, 100}, 0.8),
            make_cluster(1, Label::Text, {10, 10, 40, 20}, 0.9),
        });
        attach_children(set, cfg);
        CHECK(set.top == std::vector<std::int64_t>{0});
        CHECK(set.by_id(0).children == std::vector<std::int64_t>{1});
    }
    SECTION("disjoint text stays top-level") {
        ClusterSet set = ClusterSet::from_clusters({
            make_cluster(0, Label::Form, {0, 0, 50, 50}, 0.8),
            make_cluster(1, Label::Text, {60, 60, 90, 90}, 0.9),
        });
        attach_children(set, cfg);
        CHECK(set.top == std::vector<std::int64_t>{0, 1});
        CHECK(set.by_id(0).children.empty());
    }
    SECTION("highest containment wins") {
        // text is 0.9-contained in the form, 0.6 in the table
        ClusterSet set = ClusterSet::from_clusters({
            make_cluster(0, Label::Form, {0, 0, 90, 100}, 0.7),
            make_cluster(1, Label::Table, {0, 0, 60, 100}, 0.7),
            make_cluster(2, Label::Text, {0, 0, 100, 100}, 0.9),
        });
        // containment of text: form 0.9, table 0.6
        attach_children(set, cfg);
        CHECK(set.by_id(0).children == std::vector<std::int64_t>{2});
        CHECK(set.by_id(1).children.empty());
        CHECK(set.top == std::vector<std::int64_t>{0, 1});
    }
}

TEST_CASE("expand_wrappers", "[postprocess]") {
    SECTION("form grows to enclose children") {
        ClusterSet set = ClusterSet::from_clusters({
            make_cluster(0, Label::Form, {0, 0, 100, 100}, 0.8),
            make_cluster(1, Label::Text, {90, 90, 120, 110}, 0.9),
        });
        set.by_id(0).children = {1};
        set.top = {0};
        expand_wrappers(set);
        CHECK(set.by_id(0).bbox == BBox{0, 0, 120, 110});
    }
    SECTION("form without children is unchanged") {
        ClusterSet set = ClusterSet::from_clusters(
            {make_cluster(0, Label::Form, {0, 0, 100, 100}, 0.8)});
        expand_wrappers(set);
        CHECK(set.by_id(0).bbox == BBox{0, 0, 100, 100});
    }
    SECTION("only Form and Key-Value Region expand") {
        ClusterSet set = ClusterSet::from_clusters({
            make_cluster(0, Label::Table, {0, 0, 100, 100}, 0.8),
            make_cluster(1, Label::Text, {90, 90, 120, 110}, 0.9),
        });
        set.by_id(0).children = {1};
        set.top = {0};
        expand_wrappers(set);
        CHECK(set.by_id(0).bbox == BBox{0, 0, 100, 100});
    }
}

TEST_CASE("select_best_proposal", "[postprocess]") {
    const PipelineConfig cfg;
    SECTION("wrapper outranks a higher-scoring regular") {
        const std::vector<Cluster> group = {
            make_cluster(0, Label::Table, {0, 0, 10, 10}, 0.8),
            make_cluster(1, Label::Text, {0, 0, 10, 10}, 0.95),
        };
        CHECK(select_best_proposal(group, cfg).label == Label::Table);
    }
    SECTION("singleton group returns its only member") {
        const std::vector<Cluster> group = {
            make_cluster(3, Label::Caption, {0, 0, 10, 10}, 0.5)};
        CHECK(select_best_proposal(group, cfg).id == 3);
    }
    SECTION("gamma=1 prefers the larger of equal-score same-label boxes") {
        PipelineConfig sized;
        sized.size_weight_exponent = 1.0;
        const std::vector<Cluster> group = {
            make_cluster(0, Label::Text, {0, 0, 10, 10}, 0.9),
            make_cluster(1, Label::Text, {0, 0, 20, 20}, 0.9),
        };
        CHECK(select_best_proposal(group, sized).id == 1);
    }
    SECTION("disqualification strikes low scorers unless all are struck") {
        PipelineConfig strict;
        strict.regular_thresholds.min_score = 0.9;
        const std::vector<Cluster> group = {
            make_cluster(0, Label::Text, {0, 0, 10, 10}, 0.95),
            make_cluster(1, Label::Text, {0, 0, 10, 10}, 0.6),
        };
        CHECK(select_best_proposal(group, strict).id == 0);
        const std::vector<Cluster> all_low = {
            make_cluster(0, Label::Text, {0, 0, 10, 10}, 0.6),
            make_cluster(1, Label::Text, {0, 0, 10, 10}, 0.7),
        };
        CHECK(select_best_proposal(all_low, strict).id == 1);
    }
    SECTION("empty group errors") {
        CHECK_THROWS_AS(select_best_proposal(std::vector<Cluster>{}, cfg),
                        EmptyInputError);
    }
}

TEST_CASE("resolve_overlaps", "[postprocess]") {
    const PipelineConfig cfg;
    SECTION("identical boxes keep the higher score") {
        ClusterSet set = ClusterSet::from_clusters({
            make_cluster(0, Label::Text, {0, 0, 10, 10}, 0.9),
            make_cluster(1, Label::Text, {0, 0, 10, 10}, 0.6),
        });
        resolve_overlaps(set, cfg);
        REQUIRE(set.top.size() == 1);
        CHECK(set.by_id(set.top[0]).score == 0.9);
    }
    SECTION("disjoint clusters all survive") {
        ClusterSet set = ClusterSet::from_clusters({
            make_cluster(0, Label::Text, {0, 0, 10, 10}, 0.9),
            make_cluster(1, Label::Text, {50, 50, 60, 60}, 0.6),
        });
        resolve_overlaps(set, cfg);
        CHECK(set.top.size() == 2);
    }
    SECTION("overlap chain forms one component; winner takes all cells") {
        ClusterSet set = ClusterSet::from_clusters({
            make_cluster(0, Label::Text, {0, 0, 10, 10}, 0.9),
            make_cluster(1, Label::Text, {5, 0, 15, 10}, 0.7),
            make_cluster(2, Label::Text, {10, 0, 20, 10}, 0.5),
        });
        set.by_id(0).cell_ids = {1};
        set.by_id(1).cell_ids = {2};
        set.by_id(2).cell_ids = {3};
        resolve_overlaps(set, cfg);
        REQUIRE(set.top.size() == 1);
        const Cluster& winner = set.by_id(set.top[0]);
        CHECK(winner.id == 0);
        CHECK(winner.cell_ids == std::vector<std::int64_t>{1, 2, 3});
    }
}

TEST_CASE("postprocess_page trivial paths", "[postprocess]") {
    const PipelineConfig cfg;
    SECTION("no detections, empty output") {
        PageSample page;
        page.page_id = "empty";
        page.width = page.height = 100;
        const PageClusters result = postprocess_page(page, cfg);
        CHECK(result.clusters.empty());
        CHECK(result.top_level.empty());
    }
    SECTION("no cells file runs the geometry-only pipeline") {
        PageSample page;
        page.page_id = "nocells";
        page.width = page.height = 100;
        page.predictions = {det(Label::Text, {0, 0, 10, 10}, 0.9),
                            det(Label::Text, {0, 0, 10, 10}, 0.7)};
        const PageClusters result = postprocess_page(page, cfg);
        REQUIRE(result.top_level.size() == 1);
        const Cluster& c = result.clusters[result.top_level[0]];
        CHECK(c.score == 0.9);
        CHECK(c.bbox == BBox{0, 0, 10, 10});
        CHECK(c.cell_ids.empty());
    }
    SECTION("output sorted by reading order") {
        PageSample page;
        page.page_id = "order";
        page.width = page.height = 100;
        page.predictions = {det(Label::Text, {50, 80, 60, 90}, 0.9),
                            det(Label::Text, {10, 10, 20, 20}, 0.9),
                            det(Label::Text, {40, 10, 50, 20}, 0.9)};
        const PageClusters result = postprocess_page(page, cfg);
        REQUIRE(result.top_level.size() == 3);
        CHECK(result.clusters[result.top_level[0]].bbox.left == 10);
        CHECK(result.clusters[result.top_level[1]].bbox.left == 40);
        CHECK(result.clusters[result.top_level[2]].bbox.left == 50);
    }
}

TEST_CASE("fragmented table fixture collapses to one table", "[postprocess]") {
    Dataset ds = load_ground_truth(kFixtureDir + "/fragmented_table/gt.json");
    load_predictions(kFixtureDir + "/fragmented_table/pred.json", ds);
    load_cells(kFixtureDir + "/fragmented_table/cells.json", ds);
    REQUIRE(ds.pages.size() == 1);

    const PipelineConfig cfg;
    const PageClusters result = postprocess_page(ds.pages[0], cfg);

    REQUIRE(result.top_level.size() == 2);
    const Cluster& table = result.clusters[result.top_level[0]];
    const Cluster& text = result.clusters[result.top_level[1]];

    // five fragments and the spanning box collapse to the best proposal
    CHECK(table.label == Label::Table);
    CHECK(table.score == 0.80);
    CHECK(table.bbox == BBox{100, 200, 800, 700});
    CHECK(table.cell_ids.empty());  // wrappers hold no assigned cells

    // the winning text fragment inherits the loser's cell and re-snaps
    CHECK(text.label == Label::Text);
    CHECK(text.score == 0.90);
    CHECK(text.cell_ids == std::vector<std::int64_t>{10, 11, 12});
    CHECK(text.bbox == BBox{130, 810, 710, 840});

    SECTION("orphan policy leaves in-table cells alone") {
        PipelineConfig emit_cfg = cfg;
        emit_cfg.orphan_policy = OrphanPolicy::EmitTextClusters;
        const PageClusters with_orphans = postprocess_page(ds.pages[0], emit_cfg);
        // cells 20..22 sit inside the surviving table, so nothing is emitted
        CHECK(with_orphans.top_level.size() == 2);
    }
}

TEST_CASE("orphan cells outside every cluster become text clusters",
          "[postprocess]") {
    PageSample page;
    page.page_id = "orphans";
    page.width = page.height = 200;
    page.predictions = {det(Label::Text, {0, 0, 50, 20}, 0.9)};
    page.cells = std::vector<TextCell>{
        {1, {5, 5, 45, 15}, "assigned"},
        {2, {100, 100, 160, 112}, "orphan"},
    };
    PipelineConfig cfg;
    cfg.orphan_policy = OrphanPolicy::EmitTextClusters;
    const PageClusters result = postprocess_page(page, cfg);
    REQUIRE(result.top_level.size() == 2);
    const Cluster& orphan = result.clusters[result.top_level[1]];
    CHECK(orphan.label == Label::Text);
    CHECK(orphan.bbox == BBox{100, 100, 160, 112});
    CHECK(orphan.score == cfg.taxonomy.min_score_for(Label::Text));
    CHECK(orphan.cell_ids == std::vector<std::int64_t>{2});
}

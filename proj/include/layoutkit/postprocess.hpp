// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <vector>

#include <json.hpp>

#include "layoutkit/dataset.hpp"
#include "layoutkit/errors.hpp"
#include "layoutkit/geometry.hpp"
#include "layoutkit/parallel.hpp"
#include "layoutkit/taxonomy.hpp"

namespace layoutkit {

// A post-processed layout element. Children reference other clusters by id;
// only Picture/Wrapper clusters hold children. cell_ids stay sorted.
struct Cluster {
    std::int64_t id = 0;
    Label label = Label::Text;
    BBox bbox;
    double score = 0.0;
    std::vector<std::int64_t> children;
    std::vector<std::int64_t> cell_ids;

    LabelRole role() const { return role_of(label); }
};

enum class OrphanPolicy { Ignore, EmitTextClusters };

// Disqualification floor used by best-proposal selection, per role.
struct RoleThresholds {
    double min_score = 0.5;
    double min_area = 0.0;
};

struct PipelineConfig {
    TaxonomyConfig taxonomy;
    double cell_assignment_threshold = 0.5;
    OrphanPolicy orphan_policy = OrphanPolicy::Ignore;
    double size_weight_exponent = 0.0;  // gamma in score * area^gamma ranking
    RoleThresholds regular_thresholds;
    RoleThresholds picture_thresholds;
    RoleThresholds wrapper_thresholds;

    const RoleThresholds& thresholds_for(LabelRole role) const {
        switch (role) {
            case LabelRole::Picture: return picture_thresholds;
            case LabelRole::Wrapper: return wrapper_thresholds;
            default: return regular_thresholds;
        }
    }

    static PipelineConfig from_json(const nlohmann::json& j) {
        PipelineConfig cfg;
        cfg.taxonomy = TaxonomyConfig::from_json(j);
        if (j.contains("cell_assignment_threshold")) {
            cfg.cell_assignment_threshold =
                j.at("cell_assignment_threshold").get<double>();
        }
        if (j.contains("orphan_policy")) {
            const auto name = j.at("orphan_policy").get<std::string>();
            if (name == "ignore") {
                cfg.orphan_policy = OrphanPolicy::Ignore;
            } else if (name == "emit_text_clusters" || name == "emit-text-clusters") {
                cfg.orphan_policy = OrphanPolicy::EmitTextClusters;
            } else {
                throw ValidationError("unknown orphan_policy: " + name);
            }
        }
        if (j.contains("size_weight_exponent")) {
            cfg.size_weight_exponent = j.at("size_weight_exponent").get<double>();
        }
        if (j.contains("proposal_thresholds")) {
            const auto& pt = j.at("proposal_thresholds");
            auto read = [&](const char* key, RoleThresholds& out) {
                if (!pt.contains(key)) return;
                const auto& r = pt.at(key);
                if (r.contains("min_score")) out.min_score = r.at("min_score").get<double>();
                if (r.contains("min_area")) out.min_area = r.at("min_area").get<double>();
            };
            read("regular", cfg.regular_thresholds);
            read("picture", cfg.picture_thresholds);
            read("wrapper", cfg.wrapper_thresholds);
        }
        return cfg;
    }

    static PipelineConfig load(const std::string& path) {
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

// Working set for the pipeline stages: every cluster ever created lives in
// the pool at index == id; `top` lists the ids still at top level.
struct ClusterSet {
    std::vector<Cluster> pool;
    std::vector<std::int64_t> top;

    Cluster& by_id(std::int64_t id) { return pool[static_cast<std::size_t>(id)]; }
    const Cluster& by_id(std::int64_t id) const {
        return pool[static_cast<std::size_t>(id)];
    }

    static ClusterSet from_clusters(std::vector<Cluster> clusters) {
        ClusterSet set;
        set.pool = std::move(clusters);
        for (const Cluster& c : set.pool) set.top.push_back(c.id);
        return set;
    }
};

inline std::vector<Detection> gate_by_confidence(
    const std::vector<Detection>& dets, const PipelineConfig& cfg) {
    std::vector<Detection> kept;
    kept.reserve(dets.size());
    for (const Detection& d : dets) {
        if (d.score >= cfg.taxonomy.min_score_for(d.label)) kept.push_back(d);
    }
    return kept;
}

// Clusters take ids in detection input order; ties downstream break on id.
inline std::vector<Cluster> build_clusters(const std::vector<Detection>& dets) {
    std::vector<Cluster> out;
    out.reserve(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        Cluster c;
        c.id = static_cast<std::int64_t>(i);
        c.label = dets[i].label;
        c.bbox = dets[i].bbox;
        c.score = dets[i].score;
        out.push_back(std::move(c));
    }
    return out;
}

namespace detail {

// Best regular cluster for a cell: highest covered fraction at or above the
// threshold, ties to the higher score, then the lower id.
inline Cluster* best_cell_owner(const TextCell& cell,
                                std::span<Cluster* const> regulars,
                                double threshold) {
    if (cell.bbox.area() <= 0.0) return nullptr;
    Cluster* best = nullptr;
    double best_fraction = 0.0;
    for (Cluster* c : regulars) {
        const double f = containment_fraction(cell.bbox, c->bbox);
        if (f < threshold) continue;
        if (best == nullptr || f > best_fraction ||
            (f == best_fraction &&
             (c->score > best->score ||
              (c->score == best->score && c->id < best->id)))) {
            best = c;
            best_fraction = f;
        }
    }
    return best;
}

}  // namespace detail

// Assigns each cell to the best-overlapping Regular cluster (fraction of the
// cell covered), if that fraction clears the threshold. Ties go to the higher
// score, then the lower cluster id. Zero-area cells stay unassigned.
inline void assign_cells(std::vector<Cluster>& clusters,
                         const std::vector<TextCell>& cells,
                         const PipelineConfig& cfg) {
    std::vector<Cluster*> regulars;
    for (Cluster& c : clusters) {
        if (c.role() == LabelRole::Regular) regulars.push_back(&c);
    }
    for (const TextCell& cell : cells) {
        Cluster* best =
            detail::best_cell_owner(cell, regulars, cfg.cell_assignment_threshold);
        if (best != nullptr) best->cell_ids.push_back(cell.id);
    }
    for (Cluster& c : clusters) {
        std::sort(c.cell_ids.begin(), c.cell_ids.end());
    }
}

inline std::map<std::int64_t, BBox> cell_box_index(const std::vector<TextCell>& cells) {
    std::map<std::int64_t, BBox> index;
    for (const TextCell& cell : cells) index[cell.id] = cell.bbox;
    return index;
}

// Box becomes the exact union of the assigned cells; growth and shrink alike.
inline void snap_to_cells(Cluster& cluster,
                          const std::map<std::int64_t, BBox>& cell_boxes) {
    if (cluster.cell_ids.empty()) return;
    std::vector<BBox> boxes;
    boxes.reserve(cluster.cell_ids.size());
    for (std::int64_t id : cluster.cell_ids) boxes.push_back(cell_boxes.at(id));
    cluster.bbox = union_bbox(boxes);
}

inline void snap_to_cells(Cluster& cluster, const std::vector<TextCell>& cells) {
    snap_to_cells(cluster, cell_box_index(cells));
}

// Pictures covering strictly more than the configured page fraction go away.
inline void discard_oversized_pictures(std::vector<Cluster>& clusters,
                                       double page_width, double page_height,
                                       const PipelineConfig& cfg) {
    const double page_area = page_width * page_height;
    std::erase_if(clusters, [&](const Cluster& c) {
        return c.role() == LabelRole::Picture && page_area > 0.0 &&
               c.bbox.area() / page_area > cfg.taxonomy.picture_page_coverage_limit;
    });
}

// A regular cluster contained (by the overlap threshold) in a special cluster
// becomes a child of the special with the highest containment fraction and
// leaves the top level.
inline void attach_children(ClusterSet& set, const PipelineConfig& cfg) {
    std::vector<std::int64_t> specials;
    for (std::int64_t id : set.top) {
        if (set.by_id(id).role() != LabelRole::Regular) specials.push_back(id);
    }
    if (specials.empty()) return;

    std::vector<std::int64_t> remaining;
    remaining.reserve(set.top.size());
    for (std::int64_t id : set.top) {
        const Cluster& c = set.by_id(id);
        if (c.role() != LabelRole::Regular || c.bbox.area() <= 0.0) {
            remaining.push_back(id);
            continue;
        }
        std::int64_t parent = -1;
        double best_fraction = 0.0;
        for (std::int64_t sid : specials) {
            const Cluster& s = set.by_id(sid);
            const double f = containment_fraction(c.bbox, s.bbox);
            if (f < cfg.taxonomy.overlap_threshold) continue;
            if (parent < 0 || f > best_fraction ||
                (f == best_fraction &&
                 (s.score > set.by_id(parent).score ||
                  (s.score == set.by_id(parent).score && sid < parent)))) {
                parent = sid;
                best_fraction = f;
            }
        }
        if (parent < 0) {
            remaining.push_back(id);
        } else {
            set.by_id(parent).children.push_back(id);
        }
    }
    set.top = std::move(remaining);
}

// Form and Key-Value Region boxes grow to enclose all their children.
inline void expand_wrappers(ClusterSet& set) {
    for (std::int64_t id : set.top) {
        Cluster& c = set.by_id(id);
        if (c.label != Label::Form && c.label != Label::KeyValueRegion) continue;
        if (c.children.empty()) continue;
        std::vector<BBox> boxes{c.bbox};
        for (std::int64_t child : c.children) boxes.push_back(set.by_id(child).bbox);
        c.bbox = union_bbox(boxes);
    }
}

// Lexicographic winner: role-based disqualification, then label priority,
// then score * area^gamma, then lower id.
inline std::size_t select_best_proposal_index(
    std::span<const Cluster* const> group, const PipelineConfig& cfg) {
    if (group.empty()) {
        throw EmptyInputError("select_best_proposal requires a nonempty group");
    }
    std::vector<bool> struck(group.size(), false);
    bool any_eligible = false;
    for (std::size_t i = 0; i < group.size(); ++i) {
        const Cluster& c = *group[i];
        const RoleThresholds& thr = cfg.thresholds_for(c.role());
        struck[i] = c.score < thr.min_score || c.bbox.area() < thr.min_area;
        any_eligible = any_eligible || !struck[i];
    }
    if (!any_eligible) struck.assign(group.size(), false);

    auto rank_key = [&](std::size_t i) {
        const Cluster& c = *group[i];
        const double weight =
            c.score * std::pow(c.bbox.area(), cfg.size_weight_exponent);
        return std::tuple<int, double, std::int64_t>(
            cfg.taxonomy.priority_rank(c.label), -weight, c.id);
    };
    std::size_t best = group.size();
    for (std::size_t i = 0; i < group.size(); ++i) {
        if (struck[i]) continue;
        if (best == group.size() || rank_key(i) < rank_key(best)) best = i;
    }
    return best;
}

inline const Cluster& select_best_proposal(std::span<const Cluster> group,
                                           const PipelineConfig& cfg) {
    std::vector<const Cluster*> ptrs;
    ptrs.reserve(group.size());
    for (const Cluster& c : group) ptrs.push_back(&c);
    return *ptrs[select_best_proposal_index(ptrs, cfg)];
}

namespace detail {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Overlap predicate for resolution: the smaller box is contained in the
// larger by at least the threshold. Undefined (zero-area) pairs never link.
inline bool overlaps_for_resolution(const Cluster& a, const Cluster& b,
                                    double threshold) {
    const Cluster& smaller = a.bbox.area() <= b.bbox.area() ? a : b;
    const Cluster& larger = a.bbox.area() <= b.bbox.area() ? b : a;
    if (smaller.bbox.area() <= 0.0) return false;
    return containment_fraction(smaller.bbox, larger.bbox) >= threshold;
}

}  // namespace detail

// Collapses every overlap group to its best proposal. The winner inherits the
// group's cells (and, for special winners, the losers' children). Because a
// regular winner re-snaps to its merged cell set, the pass repeats until no
// group remains.
inline void resolve_overlaps(ClusterSet& set, const PipelineConfig& cfg,
                             const std::map<std::int64_t, BBox>* cell_boxes = nullptr) {
    const double thr = cfg.taxonomy.overlap_threshold;
    for (;;) {
        const std::size_t n = set.top.size();
        if (n < 2) return;
        detail::UnionFind uf(n);
        bool any_edge = false;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (detail::overlaps_for_resolution(set.by_id(set.top[i]),
                                                    set.by_id(set.top[j]), thr)) {
                    uf.unite(i, j);
                    any_edge = true;
                }
            }
        }
        if (!any_edge) return;

        std::map<std::size_t, std::vector<std::size_t>> components;
        for (std::size_t i = 0; i < n; ++i) components[uf.find(i)].push_back(i);

        std::vector<std::int64_t> kept;
        std::vector<std::int64_t> reentry;
        std::vector<bool> handled(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            if (handled[i]) continue;
            const auto& members = components[uf.find(i)];
            for (std::size_t m : members) handled[m] = true;
            if (members.size() == 1) {
                kept.push_back(set.top[i]);
                continue;
            }
            std::vector<const Cluster*> group;
            group.reserve(members.size());
            for (std::size_t m : members) group.push_back(&set.by_id(set.top[m]));
            const std::size_t w = select_best_proposal_index(group, cfg);
            Cluster& winner = set.by_id(set.top[members[w]]);

            std::set<std::int64_t> merged_cells(winner.cell_ids.begin(),
                                                winner.cell_ids.end());
            for (std::size_t m : members) {
                if (m == members[w]) continue;
                Cluster& loser = set.by_id(set.top[m]);
                merged_cells.insert(loser.cell_ids.begin(), loser.cell_ids.end());
                loser.cell_ids.clear();
                // A loser's children move to the winner only when the winner
                // actually contains them; anything else returns to the top
                // level and the next pass reconsiders it.
                for (std::int64_t child_id : loser.children) {
                    const Cluster& child = set.by_id(child_id);
                    const bool adoptable =
                        winner.role() != LabelRole::Regular &&
                        child.bbox.area() > 0.0 &&
                        containment_fraction(child.bbox, winner.bbox) >= thr;
                    (adoptable ? winner.children : reentry).push_back(child_id);
                }
                loser.children.clear();
            }
            // Special winners keep only the inherited cells their box covers;
            // stray cells from a loser that hung outside become unowned.
            if (winner.role() != LabelRole::Regular && cell_boxes != nullptr) {
                std::erase_if(merged_cells, [&](std::int64_t id) {
                    const BBox& box = cell_boxes->at(id);
                    return box.area() <= 0.0 ||
                           containment_fraction(box, winner.bbox) < thr;
                });
            }
            winner.cell_ids.assign(merged_cells.begin(), merged_cells.end());

            if (winner.role() == LabelRole::Regular && cell_boxes != nullptr) {
                snap_to_cells(winner, *cell_boxes);
            }
            if ((winner.label == Label::Form ||
                 winner.label == Label::KeyValueRegion) &&
                !winner.children.empty()) {
                std::vector<BBox> boxes{winner.bbox};
                for (std::int64_t child : winner.children) {
                    boxes.push_back(set.by_id(child).bbox);
                }
                winner.bbox = union_bbox(boxes);
            }
            kept.push_back(winner.id);
        }
        kept.insert(kept.end(), reentry.begin(), reentry.end());
        set.top = std::move(kept);
    }
}

namespace detail {

inline std::vector<std::int64_t> live_cluster_ids(const ClusterSet& set) {
    std::vector<std::int64_t> live;
    for (std::int64_t id : set.top) {
        live.push_back(id);
        for (std::int64_t child : set.by_id(id).children) live.push_back(child);
    }
    return live;
}

// One from-scratch assignment round over the live clusters. Regular holdings
// are rebuilt outright; special clusters keep whatever inherited cells no
// regular claims, so a cell never has two owners. Returns whether any regular
// holding changed (the loop-control signal; box updates follow separately).
inline bool reassign_cells(ClusterSet& set, const std::vector<TextCell>& cells,
                           const PipelineConfig& cfg) {
    std::vector<Cluster*> regulars;
    std::vector<Cluster*> specials;
    for (std::int64_t id : live_cluster_ids(set)) {
        Cluster& c = set.by_id(id);
        (c.role() == LabelRole::Regular ? regulars : specials).push_back(&c);
    }
    std::map<Cluster*, std::vector<std::int64_t>> next;
    std::set<std::int64_t> claimed;
    for (const TextCell& cell : cells) {
        Cluster* best =
            best_cell_owner(cell, regulars, cfg.cell_assignment_threshold);
        if (best != nullptr) {
            next[best].push_back(cell.id);
            claimed.insert(cell.id);
        }
    }
    bool changed = false;
    for (Cluster* c : regulars) {
        std::vector<std::int64_t> holdings = std::move(next[c]);
        std::sort(holdings.begin(), holdings.end());
        if (holdings != c->cell_ids) {
            c->cell_ids = std::move(holdings);
            changed = true;
        }
    }
    for (Cluster* c : specials) {
        std::erase_if(c->cell_ids,
                      [&](std::int64_t id) { return claimed.count(id) > 0; });
    }
    return changed;
}

inline bool snap_live_regulars(ClusterSet& set,
                               const std::map<std::int64_t, BBox>& cell_boxes) {
    bool changed = false;
    for (std::int64_t id : live_cluster_ids(set)) {
        Cluster& c = set.by_id(id);
        if (c.role() != LabelRole::Regular || c.cell_ids.empty()) continue;
        const BBox before = c.bbox;
        snap_to_cells(c, cell_boxes);
        changed = changed || !(c.bbox == before);
    }
    return changed;
}

// Re-derives the child-parent map from current boxes (wrapper expansion can
// overtake an earlier attachment choice). Lists are rebuilt only when the map
// actually changes, in ascending-id order for determinism.
inline bool reattach_children(ClusterSet& set, const PipelineConfig& cfg) {
    std::map<std::int64_t, std::int64_t> old_parent;
    std::vector<std::int64_t> specials;
    std::vector<std::int64_t> regulars;
    for (std::int64_t id : set.top) {
        const Cluster& c = set.by_id(id);
        if (c.role() == LabelRole::Regular) {
            regulars.push_back(id);
        } else {
            specials.push_back(id);
            for (std::int64_t child : c.children) {
                old_parent[child] = id;
                regulars.push_back(child);
            }
        }
    }
    if (specials.empty()) return false;
    std::sort(regulars.begin(), regulars.end());

    std::map<std::int64_t, std::int64_t> new_parent;
    for (std::int64_t rid : regulars) {
        const Cluster& r = set.by_id(rid);
        if (r.bbox.area() <= 0.0) continue;
        std::int64_t parent = -1;
        double best_fraction = 0.0;
        for (std::int64_t sid : specials) {
            const Cluster& s = set.by_id(sid);
            const double f = containment_fraction(r.bbox, s.bbox);
            if (f < cfg.taxonomy.overlap_threshold) continue;
            if (parent < 0 || f > best_fraction ||
                (f == best_fraction &&
                 (s.score > set.by_id(parent).score ||
                  (s.score == set.by_id(parent).score && sid < parent)))) {
                parent = sid;
                best_fraction = f;
            }
        }
        if (parent >= 0) new_parent[rid] = parent;
    }
    if (new_parent == old_parent) return false;

    for (std::int64_t sid : specials) set.by_id(sid).children.clear();
    for (const auto& [child, parent] : new_parent) {
        set.by_id(parent).children.push_back(child);
    }
    std::vector<std::int64_t> new_top;
    for (std::int64_t id : set.top) {
        if (set.by_id(id).role() != LabelRole::Regular) new_top.push_back(id);
    }
    for (std::int64_t rid : regulars) {
        if (!new_parent.count(rid)) new_top.push_back(rid);
    }
    set.top = std::move(new_top);
    return true;
}

inline bool re_expand_wrappers(ClusterSet& set) {
    bool changed = false;
    for (std::int64_t id : set.top) {
        Cluster& c = set.by_id(id);
        if (c.label != Label::Form && c.label != Label::KeyValueRegion) continue;
        if (c.children.empty()) continue;
        std::vector<BBox> boxes{c.bbox};
        for (std::int64_t child : c.children) boxes.push_back(set.by_id(child).bbox);
        const BBox expanded = union_bbox(boxes);
        changed = changed || !(expanded == c.bbox);
        c.bbox = expanded;
    }
    return changed;
}

}  // namespace detail

// Unassigned cells become synthetic Text clusters when the policy asks for
// it, but only where they do not land inside a surviving cluster; emitting
// them there would undo the overlap resolution.
inline void emit_orphans(ClusterSet& set, const std::vector<TextCell>& cells,
                         const PipelineConfig& cfg) {
    if (cfg.orphan_policy != OrphanPolicy::EmitTextClusters) return;
    std::set<std::int64_t> assigned;
    for (const Cluster& c : set.pool) {
        assigned.insert(c.cell_ids.begin(), c.cell_ids.end());
    }
    const double thr = cfg.taxonomy.overlap_threshold;
    auto conflicts = [&](const BBox& candidate, const BBox& existing) {
        const BBox& smaller = candidate.area() <= existing.area() ? candidate : existing;
        const BBox& larger = candidate.area() <= existing.area() ? existing : candidate;
        if (smaller.area() <= 0.0) return false;
        return containment_fraction(smaller, larger) >= thr;
    };
    for (const TextCell& cell : cells) {
        if (cell.bbox.area() <= 0.0 || assigned.count(cell.id)) continue;
        bool covered = false;
        for (std::int64_t id : set.top) {
            if (conflicts(cell.bbox, set.by_id(id).bbox)) {
                covered = true;
                break;
            }
        }
        if (covered) continue;
        Cluster orphan;
        orphan.id = static_cast<std::int64_t>(set.pool.size());
        orphan.label = Label::Text;
        orphan.bbox = cell.bbox;
        orphan.score = cfg.taxonomy.min_score_for(Label::Text);
        orphan.cell_ids.push_back(cell.id);
        set.top.push_back(orphan.id);
        set.pool.push_back(std::move(orphan));
    }
}

// Final page output: clusters in depth-first order (each top-level cluster
// followed by its children), top-level entries indexed separately.
struct PageClusters {
    std::string page_id;
    std::vector<Cluster> clusters;
    std::vector<std::size_t> top_level;  // indices into clusters
};

// The cell-dependent stages feed back into each other (snapped boxes change
// what the next assignment would pick), so both the pre-attachment pass and
// the post-resolution pass run to a fixed point. Convergence is fast; the
// cap is a guard against pathological inputs.
inline constexpr int kStabilizeRounds = 8;

inline PageClusters postprocess_page(const PageSample& page,
                                     const PipelineConfig& cfg) {
    const std::vector<Detection> gated = gate_by_confidence(page.predictions, cfg);
    ClusterSet set = ClusterSet::from_clusters(build_clusters(gated));

    std::map<std::int64_t, BBox> cell_boxes;
    const bool has_cells = page.cells.has_value();
    if (has_cells) {
        cell_boxes = cell_box_index(*page.cells);
        for (int round = 0; round < kStabilizeRounds; ++round) {
            bool changed = detail::reassign_cells(set, *page.cells, cfg);
            changed |= detail::snap_live_regulars(set, cell_boxes);
            if (!changed) break;
        }
    }

    const double page_area = page.width * page.height;
    std::erase_if(set.top, [&](std::int64_t id) {
        const Cluster& c = set.by_id(id);
        return c.role() == LabelRole::Picture && page_area > 0.0 &&
               c.bbox.area() / page_area > cfg.taxonomy.picture_page_coverage_limit;
    });

    attach_children(set, cfg);
    expand_wrappers(set);
    for (int round = 0; round < kStabilizeRounds; ++round) {
        resolve_overlaps(set, cfg, has_cells ? &cell_boxes : nullptr);
        bool changed = false;
        if (has_cells) {
            changed |= detail::reassign_cells(set, *page.cells, cfg);
            changed |= detail::snap_live_regulars(set, cell_boxes);
        }
        changed |= detail::reattach_children(set, cfg);
        changed |= detail::re_expand_wrappers(set);
        if (!changed) break;
    }
    if (has_cells) emit_orphans(set, *page.cells, cfg);

    std::sort(set.top.begin(), set.top.end(), [&](std::int64_t a, std::int64_t b) {
        const Cluster& ca = set.by_id(a);
        const Cluster& cb = set.by_id(b);
        if (ca.bbox.top != cb.bbox.top) return ca.bbox.top < cb.bbox.top;
        if (ca.bbox.left != cb.bbox.left) return ca.bbox.left < cb.bbox.left;
        return a < b;
    });

    PageClusters out;
    out.page_id = page.page_id;
    for (std::int64_t id : set.top) {
        out.top_level.push_back(out.clusters.size());
        out.clusters.push_back(set.by_id(id));
        for (std::int64_t child : set.by_id(id).children) {
            out.clusters.push_back(set.by_id(child));
        }
    }
    return out;
}

inline std::vector<PageClusters> postprocess_dataset(const Dataset& ds,
                                                     const PipelineConfig& cfg,
                                                     unsigned threads = 1) {
    std::vector<PageClusters> results(ds.pages.size());
    parallel_for(ds.pages.size(), threads, [&](std::size_t i) {
        results[i] = postprocess_page(ds.pages[i], cfg);
    });
    return results;
}

// Clusters flattened back to plain detections (depth-first order), the input
// format for evaluating post-processed output.
inline std::vector<Detection> detections_from_clusters(const PageClusters& page) {
    std::vector<Detection> out;
    out.reserve(page.clusters.size());
    for (const Cluster& c : page.clusters) {
        out.push_back(Detection{c.label, c.bbox, c.score});
    }
    return out;
}

inline nlohmann::json cluster_to_json(const Cluster& c) {
    return {{"id", c.id},
            {"label", std::string(label_name(c.label))},
            {"bbox", {c.bbox.left, c.bbox.top, c.bbox.right, c.bbox.bottom}},
            {"score", c.score},
            {"children", c.children},
            {"cell_ids", c.cell_ids}};
}

inline nlohmann::json clusters_to_json(std::span<const PageClusters> pages) {
    nlohmann::json out;
    out["pages"] = nlohmann::json::array();
    for (const PageClusters& page : pages) {
        nlohmann::json pj;
        pj["page_id"] = page.page_id;
        pj["clusters"] = nlohmann::json::array();
        for (const Cluster& c : page.clusters) {
            pj["clusters"].push_back(cluster_to_json(c));
        }
        out["pages"].push_back(std::move(pj));
    }
    return out;
}

}  // namespace layoutkit

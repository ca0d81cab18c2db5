#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "safeflow/flow_graph.hpp"
#include "safeflow/safety.hpp"

namespace safeflow {

// Forest of preferred maximum incoming (or outgoing) edges. parent[v] is the
// far endpoint of v's preferred max edge, -1 at roots. cum_loss[v] is the
// excess-flow loss of extending a path from v to its root, one extension
// lemma step per forest edge; it is monotone non-decreasing from root to
// leaf. cum_spine (incoming forest only) accumulates the symmetric
// right-extension losses along forest edges, used to test safety of paths
// that run inside the forest. Level ancestors answered with jump pointers.
struct ExtensionForest {
    std::vector<vertex_t> parent;
    std::vector<std::int32_t> depth;
    std::vector<flow_t> cum_loss;
    std::vector<flow_t> cum_spine;
    std::vector<std::vector<vertex_t>> up;

    // Ancestor of v at depth d (d <= depth[v]); v itself when d == depth[v].
    vertex_t level_ancestor(vertex_t v, std::int32_t d) const;
    bool is_ancestor(vertex_t a, vertex_t v) const;
};

std::pair<ExtensionForest, ExtensionForest> build_extension_forests(const FlowGraph& g,
                                                                    const MaxEdgeIndex& idx);

// Shallowest ancestor l of u in the incoming forest whose extension loss
// cum_loss[u] - cum_loss[l] stays below excess. Returns u when even one step
// loses too much.
vertex_t left_extend(const ExtensionForest& fi, vertex_t u, flow_t excess);

// Symmetric search on the outgoing forest.
vertex_t right_extend_o(const ExtensionForest& fo, vertex_t v, flow_t excess);

// Deepest ancestor r of prev that is a strict descendant of y in the
// incoming forest such that the forest path <y,...,r> is safe. prev must be
// a strict descendant of y (error otherwise).
vertex_t right_extend_i(const ExtensionForest& fi, const FlowGraph& g,
                        const MaxEdgeIndex& idx, vertex_t y, vertex_t prev);

bool is_left_extendable(const FlowGraph& g, const MaxEdgeIndex& idx, vertex_t v, flow_t flow);
bool is_right_extendable(const FlowGraph& g, const MaxEdgeIndex& idx, vertex_t v, flow_t flow);

// Constant-space representation of one maximal safe path: the path is the
// representative edge with its left extensions along the incoming forest and
// right extensions along the outgoing forest. Trivial records come from the
// incoming-forest leaf sweep and always end at the representative edge head.
struct OptimalRecord {
    vertex_t edge_tail = -1;
    vertex_t edge_head = -1;
    vertex_t left = -1;
    vertex_t right = -1;
    flow_t flow = 0;
    bool trivial = false;

    friend bool operator==(const OptimalRecord& a, const OptimalRecord& b) {
        return a.edge_tail == b.edge_tail && a.edge_head == b.edge_head && a.left == b.left &&
               a.right == b.right && a.flow == b.flow && a.trivial == b.trivial;
    }
};

std::vector<OptimalRecord> opt_rep_enumerate(const FlowGraph& g, const MaxEdgeIndex& idx,
                                             const ExtensionForest& fi,
                                             const ExtensionForest& fo);

// Reconstructs the path of a record: left extensions from edge_tail down to
// rec.left in the incoming forest, the edge, then right extensions from
// edge_head to rec.right in the outgoing forest. Throws validation_error on
// malformed records.
WeightedSafePath expand_optimal(const FlowGraph& g, const ExtensionForest& fi,
                                const ExtensionForest& fo, const OptimalRecord& rec);

// A carrier path together with the safe paths stored as (left, right, flow)
// intervals of it, ordered by left endpoint; no interval nests in another
// and none has unit length.
struct ConciseRecord {
    struct Interval {
        vertex_t l;
        vertex_t r;
        flow_t flow;
        friend bool operator==(const Interval& a, const Interval& b) {
            return a.l == b.l && a.r == b.r && a.flow == b.flow;
        }
    };
    std::vector<vertex_t> carrier;
    std::vector<Interval> intervals;

    friend bool operator==(const ConciseRecord& a, const ConciseRecord& b) {
        return a.carrier == b.carrier && a.intervals == b.intervals;
    }
};

std::vector<WeightedSafePath> expand_concise(const std::vector<ConciseRecord>& recs);

// Counters for the output-sensitivity check of the trie-based enumerators.
struct TrieOpStats {
    std::uint64_t ops = 0;
};

// Topological-order enumeration of all maximal safe paths (>= 2 edges) with
// their excess flows, no duplicates; O(m + output tokens) trie operations.
std::vector<WeightedSafePath> opt_raw_enumerate(const FlowGraph& g, const MaxEdgeIndex& idx,
                                                TrieOpStats* stats = nullptr);

// Optimal concise representation: interval expansion is exactly the maximal
// safe path set, each safe path stored under exactly one carrier.
std::vector<ConciseRecord> opt_concise(const FlowGraph& g, const MaxEdgeIndex& idx,
                                       TrieOpStats* stats = nullptr);

// The old pipeline's concise representation: intervals of the candidate
// decomposition paths that survive the subpath filter, merged into carriers
// while the running common intersection stays non-empty.
std::vector<ConciseRecord> con_pipeline(const FlowGraph& g);

void canonical_sort_concise(std::vector<ConciseRecord>& recs, const FlowGraph& g);
void canonical_sort_optimal(std::vector<OptimalRecord>& recs, const FlowGraph& g);

}  // namespace safeflow

#pragma once

#include <span>
#include <vector>

#include "safeflow/flow_graph.hpp"

namespace safeflow {

// A vertex sequence together with its excess flow. Reported maximal safe
// paths always have at least 2 edges; unit-length safe paths are excluded
// from all outputs.
struct WeightedSafePath {
    std::vector<vertex_t> vertices;
    flow_t excess = 0;

    friend bool operator==(const WeightedSafePath& a, const WeightedSafePath& b) {
        return a.excess == b.excess && a.vertices == b.vertices;
    }
    friend bool operator<(const WeightedSafePath& a, const WeightedSafePath& b) {
        if (a.vertices != b.vertices) return a.vertices < b.vertices;
        return a.excess < b.excess;
    }
};

struct WeightedPath {
    std::vector<vertex_t> vertices;
    flow_t weight = 0;

    friend bool operator==(const WeightedPath& a, const WeightedPath& b) {
        return a.weight == b.weight && a.vertices == b.vertices;
    }
    friend bool operator<(const WeightedPath& a, const WeightedPath& b) {
        if (a.vertices != b.vertices) return a.vertices < b.vertices;
        return a.weight < b.weight;
    }
};

// Source-to-sink paths whose weighted superposition reproduces every edge flow.
struct CandidateDecomposition {
    std::vector<WeightedPath> paths;
};

// Excess flow of a path with >= 1 edge: the flow that necessarily traverses
// the whole path. Computed with the outgoing-based formula; the incoming
// formula is asserted to agree. Throws validation_error if p is not a path.
flow_t excess_flow(const FlowGraph& g, std::span<const vertex_t> p);

enum class Side { left, right };

// Change of excess flow when extending p by edge (u,v) on the given side:
//   left:  -(f_in(v)  - f(u,v))   with p starting at v
//   right: -(f_out(u) - f(u,v))   with p ending at u
flow_t delta_extend(const FlowGraph& g, std::span<const vertex_t> p, Side side, Edge e);

bool is_safe(const FlowGraph& g, std::span<const vertex_t> p);

// Classical flow decomposition: repeatedly trace a source-to-sink path through
// positive-residual edges, always taking the out-edge with the largest
// residual (ties broken by earliest topological position of the head), with
// weight equal to the minimum residual on the path. At most m paths.
CandidateDecomposition candidate_flow_decomposition(const FlowGraph& g);

// All maximal-within-p safe subpaths (>= 2 edges) of a decomposition path,
// left to right, each with its excess flow. Linear in |p|.
std::vector<WeightedSafePath> two_pointer_scan(const FlowGraph& g,
                                               std::span<const vertex_t> p);

// Removes exact duplicates (first occurrence's payload is kept) and every
// path that occurs as a proper contiguous subsequence of another path.
// Aho-Corasick automaton over the vertex-id alphabet.
std::vector<WeightedSafePath> filter_subpaths(std::vector<WeightedSafePath> paths);

// The old pipeline (RawRep): candidate decomposition, two-pointer scan and
// subpath filtering. Output sorted canonically.
std::vector<WeightedSafePath> raw_pipeline(const FlowGraph& g);

// Ground truth for testing: every path with >= 2 edges and positive excess
// that is not a contiguous subpath of another such path.
// Guard: at most 64 vertices.
std::vector<WeightedSafePath> enumerate_all_maximal_safe_paths_bruteforce(const FlowGraph& g);

// All integral flow decompositions of a tiny graph, canonicalized and
// deduplicated. Guards: <= 12 edges and total source outflow <= 32.
std::vector<std::vector<WeightedPath>> enumerate_flow_decompositions(const FlowGraph& g);

// Sort paths by (topo position of first vertex, length, topo-lexicographic).
void canonical_sort(std::vector<WeightedSafePath>& paths, const FlowGraph& g);

}  // namespace safeflow

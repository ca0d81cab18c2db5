#include <algorithm>
#include <cassert>

#include "safeflow/optenum.hpp"

namespace safeflow {

std::vector<OptimalRecord> opt_rep_enumerate(const FlowGraph& g, const MaxEdgeIndex& idx,
                                             const ExtensionForest& fi,
                                             const ExtensionForest& fo) {
    vertex_t n = g.num_vertices();
    std::vector<OptimalRecord> out;

    // Trivial sweep: walk up from every leaf of the incoming forest. Each
    // visited vertex u is the right end of at most one maximal trivial path,
    // whose last edge is u's forest edge; marked[] stops re-visits when
    // sweeps from different leaves merge.
    std::vector<char> is_leaf(n, 1);
    for (vertex_t v = 0; v < n; ++v)
        if (fi.parent[v] >= 0) is_leaf[fi.parent[v]] = 0;
    std::vector<char> marked(n, 0);

    for (vertex_t leaf = 0; leaf < n; ++leaf) {
        if (!is_leaf[leaf]) continue;
        vertex_t u = leaf;
        while (!marked[u]) {
            marked[u] = 1;
            vertex_t v = fi.parent[u];
            if (v < 0) break;
            flow_t fedge = idx.max_in[u].flow;  // f(v,u)
            vertex_t x = left_extend(fi, v, fedge);
            flow_t flow = fedge - (fi.cum_loss[v] - fi.cum_loss[x]);
            if (x != v && !is_left_extendable(g, idx, x, flow) &&
                !is_right_extendable(g, idx, u, flow))
                out.push_back({v, u, x, u, flow, true});
            if (fi.parent[x] < 0) break;
            u = right_extend_i(fi, g, idx, fi.parent[x], u);
        }
    }

    // Non-trivial paths: two-pointer search per edge outside the incoming
    // forest, right end advancing along the outgoing forest.
    for (std::size_t ei = 0; ei < g.num_edges(); ++ei) {
        const Edge& e = g.edge(ei);
        if (idx.max_in[e.v].edge == static_cast<std::int32_t>(ei)) continue;
        flow_t excess = e.flow;
        while (excess > 0) {
            vertex_t l = left_extend(fi, e.u, excess);
            excess = e.flow - (fi.cum_loss[e.u] - fi.cum_loss[l]);
            vertex_t r = right_extend_o(fo, e.v, excess);
            flow_t flow = excess - (fo.cum_loss[e.v] - fo.cum_loss[r]);
            if ((l != e.u || r != e.v) && !is_left_extendable(g, idx, l, flow))
                out.push_back({e.u, e.v, l, r, flow, false});
            if (fo.parent[r] < 0) break;
            vertex_t next = fo.parent[r];
            excess = e.flow - (fo.cum_loss[e.v] - fo.cum_loss[next]);
        }
    }
    canonical_sort_optimal(out, g);
    return out;
}

WeightedSafePath expand_optimal(const FlowGraph& g, const ExtensionForest& fi,
                                const ExtensionForest& fo, const OptimalRecord& rec) {
    if (rec.edge_tail < 0 || rec.edge_head < 0 || g.find_edge(rec.edge_tail, rec.edge_head) < 0)
        throw validation_error("expand_optimal: record edge not in graph");
    if (!fi.is_ancestor(rec.left, rec.edge_tail))
        throw validation_error("expand_optimal: left end is not an incoming-forest ancestor");
    if (!fo.is_ancestor(rec.right, rec.edge_head))
        throw validation_error("expand_optimal: right end is not an outgoing-forest ancestor");

    WeightedSafePath p;
    std::vector<vertex_t> pre;
    for (vertex_t v = rec.edge_tail; v != rec.left; v = fi.parent[v]) pre.push_back(v);
    pre.push_back(rec.left);
    p.vertices.assign(pre.rbegin(), pre.rend());
    p.vertices.push_back(rec.edge_head);
    for (vertex_t v = rec.edge_head; v != rec.right; v = fo.parent[v])
        p.vertices.push_back(fo.parent[v]);
    p.excess = rec.flow;
    return p;
}

std::vector<WeightedSafePath> expand_concise(const std::vector<ConciseRecord>& recs) {
    std::vector<WeightedSafePath> out;
    for (const ConciseRecord& rec : recs) {
        for (const auto& iv : rec.intervals) {
            auto lb = std::find(rec.carrier.begin(), rec.carrier.end(), iv.l);
            auto rb = std::find(lb, rec.carrier.end(), iv.r);
            if (lb == rec.carrier.end() || rb == rec.carrier.end())
                throw validation_error("expand_concise: interval endpoint not on carrier");
            out.push_back({std::vector<vertex_t>(lb, rb + 1), iv.flow});
        }
    }
    return out;
}

void canonical_sort_optimal(std::vector<OptimalRecord>& recs, const FlowGraph& g) {
    std::sort(recs.begin(), recs.end(), [&](const OptimalRecord& a, const OptimalRecord& b) {
        if (a.trivial != b.trivial) return !a.trivial;  // edge groups first
        if (a.trivial)
            return std::make_tuple(g.topo_pos(a.edge_head), g.topo_pos(a.left)) <
                   std::make_tuple(g.topo_pos(b.edge_head), g.topo_pos(b.left));
        return std::make_tuple(g.topo_pos(a.edge_tail), g.topo_pos(a.edge_head),
                               g.topo_pos(a.right), g.topo_pos(a.left)) <
               std::make_tuple(g.topo_pos(b.edge_tail), g.topo_pos(b.edge_head),
                               g.topo_pos(b.right), g.topo_pos(b.left));
    });
}

}  // namespace safeflow

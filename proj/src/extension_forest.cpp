#include <algorithm>
#include <cassert>

#include "safeflow/optenum.hpp"

namespace safeflow {

vertex_t ExtensionForest::level_ancestor(vertex_t v, std::int32_t d) const {
    assert(d >= 0 && d <= depth[v]);
    std::int32_t diff = depth[v] - d;
    for (std::size_t k = 0; diff; ++k, diff >>= 1)
        if (diff & 1) v = up[k][v];
    return v;
}

bool ExtensionForest::is_ancestor(vertex_t a, vertex_t v) const {
    return depth[a] <= depth[v] && level_ancestor(v, depth[a]) == a;
}

std::pair<ExtensionForest, ExtensionForest> build_extension_forests(const FlowGraph& g,
                                                                    const MaxEdgeIndex& idx) {
    vertex_t n = g.num_vertices();
    ExtensionForest fi, fo;
    fi.parent.assign(n, -1);
    fi.depth.assign(n, 0);
    fi.cum_loss.assign(n, 0);
    fi.cum_spine.assign(n, 0);
    fo.parent.assign(n, -1);
    fo.depth.assign(n, 0);
    fo.cum_loss.assign(n, 0);

    for (vertex_t v : g.topo()) {
        const MaxEdge& m = idx.max_in[v];
        if (m.edge < 0) continue;
        vertex_t p = g.edge(m.edge).u;
        fi.parent[v] = p;
        fi.depth[v] = fi.depth[p] + 1;
        fi.cum_loss[v] = fi.cum_loss[p] + (g.f_in(v) - m.flow);
        fi.cum_spine[v] = fi.cum_spine[p] + (g.f_out(p) - m.flow);
    }
    for (auto it = g.topo().rbegin(); it != g.topo().rend(); ++it) {
        vertex_t v = *it;
        const MaxEdge& m = idx.max_out[v];
        if (m.edge < 0) continue;
        vertex_t p = g.edge(m.edge).v;
        fo.parent[v] = p;
        fo.depth[v] = fo.depth[p] + 1;
        fo.cum_loss[v] = fo.cum_loss[p] + (g.f_out(v) - m.flow);
    }

    auto build_jumps = [n](ExtensionForest& f) {
        std::int32_t maxd = 0;
        for (vertex_t v = 0; v < n; ++v) maxd = std::max(maxd, f.depth[v]);
        std::size_t levels = 1;
        while ((1 << levels) <= maxd) ++levels;
        f.up.assign(levels, std::vector<vertex_t>(n));
        for (vertex_t v = 0; v < n; ++v) f.up[0][v] = f.parent[v] < 0 ? v : f.parent[v];
        for (std::size_t k = 1; k < levels; ++k)
            for (vertex_t v = 0; v < n; ++v) f.up[k][v] = f.up[k - 1][f.up[k - 1][v]];
    };
    build_jumps(fi);
    build_jumps(fo);
    return {std::move(fi), std::move(fo)};
}

namespace {

// Shallowest ancestor whose cumulative extension loss from v stays < excess.
vertex_t budget_climb(const ExtensionForest& f, vertex_t v, flow_t excess) {
    if (excess <= 0) return v;
    flow_t base = f.cum_loss[v];
    for (std::size_t k = f.up.size(); k-- > 0;) {
        vertex_t a = f.up[k][v];
        if (a != v && base - f.cum_loss[a] < excess) v = a;
    }
    // One more plain-parent step may still fit (jump tables stop at roots).
    while (f.parent[v] >= 0 && base - f.cum_loss[f.parent[v]] < excess) v = f.parent[v];
    return v;
}

}  // namespace

vertex_t left_extend(const ExtensionForest& fi, vertex_t u, flow_t excess) {
    return budget_climb(fi, u, excess);
}

vertex_t right_extend_o(const ExtensionForest& fo, vertex_t v, flow_t excess) {
    return budget_climb(fo, v, excess);
}

vertex_t right_extend_i(const ExtensionForest& fi, const FlowGraph& g,
                        const MaxEdgeIndex& idx, vertex_t y, vertex_t prev) {
    if (!(fi.depth[y] < fi.depth[prev] && fi.level_ancestor(prev, fi.depth[y]) == y))
        throw validation_error("right_extend_i: node is not a strict forest ancestor");
    // c = y's child on the spine toward prev; <y,c> alone is always safe.
    vertex_t c = fi.level_ancestor(prev, fi.depth[y] + 1);
    flow_t bound = idx.max_in[c].flow + fi.cum_spine[c];  // f(y,c) + base
    std::int32_t lo = fi.depth[c], hi = fi.depth[prev], best = lo;
    while (lo <= hi) {
        std::int32_t mid = lo + (hi - lo) / 2;
        if (fi.cum_spine[fi.level_ancestor(prev, mid)] < bound) {
            best = mid;
            lo = mid + 1;
        } else {
            hi = mid - 1;
        }
    }
    return fi.level_ancestor(prev, best);
}

bool is_left_extendable(const FlowGraph& g, const MaxEdgeIndex& idx, vertex_t v, flow_t flow) {
    const MaxEdge& m = idx.max_in[v];
    return m.edge >= 0 && g.f_in(v) - m.flow < flow;
}

bool is_right_extendable(const FlowGraph& g, const MaxEdgeIndex& idx, vertex_t v, flow_t flow) {
    const MaxEdge& m = idx.max_out[v];
    return m.edge >= 0 && g.f_out(v) - m.flow < flow;
}

}  // namespace safeflow

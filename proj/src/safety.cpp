#include "safeflow/safety.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <memory>
#include <set>
#include <unordered_map>

namespace safeflow {

namespace {

void check_path(const FlowGraph& g, std::span<const vertex_t> p) {
    if (p.size() < 2) throw validation_error("path needs at least one edge");
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (g.find_edge(p[i], p[i + 1]) < 0)
            throw validation_error("vertex sequence is not a path: no edge " +
                                   std::to_string(p[i]) + "->" + std::to_string(p[i + 1]));
}

flow_t excess_outgoing(const FlowGraph& g, std::span<const vertex_t> p) {
    flow_t ex = g.edge(g.find_edge(p[0], p[1])).flow;
    for (std::size_t i = 1; i + 1 < p.size(); ++i)
        ex -= g.f_out(p[i]) - g.edge(g.find_edge(p[i], p[i + 1])).flow;
    return ex;
}

flow_t excess_incoming(const FlowGraph& g, std::span<const vertex_t> p) {
    flow_t ex = g.edge(g.find_edge(p[p.size() - 2], p[p.size() - 1])).flow;
    for (std::size_t i = 1; i + 1 < p.size(); ++i)
        ex -= g.f_in(p[i]) - g.edge(g.find_edge(p[i - 1], p[i])).flow;
    return ex;
}

}  // namespace

flow_t excess_flow(const FlowGraph& g, std::span<const vertex_t> p) {
    check_path(g, p);
    flow_t ex = excess_outgoing(g, p);
    assert(ex == excess_incoming(g, p));
    return ex;
}

flow_t delta_extend(const FlowGraph& g, std::span<const vertex_t> p, Side side, Edge e) {
    check_path(g, p);
    std::int32_t ei = g.find_edge(e.u, e.v);
    if (ei < 0) throw validation_error("extension edge not in graph");
    flow_t f = g.edge(ei).flow;
    if (side == Side::left) {
        if (p.front() != e.v) throw validation_error("edge does not extend path on the left");
        return -(g.f_in(e.v) - f);
    }
    if (p.back() != e.u) throw validation_error("edge does not extend path on the right");
    return -(g.f_out(e.u) - f);
}

bool is_safe(const FlowGraph& g, std::span<const vertex_t> p) {
    return excess_flow(g, p) > 0;
}

CandidateDecomposition candidate_flow_decomposition(const FlowGraph& g) {
    CandidateDecomposition dec;
    std::vector<flow_t> residual(g.num_edges());
    for (std::size_t i = 0; i < g.num_edges(); ++i) residual[i] = g.edge(i).flow;
    std::vector<flow_t> src_left(g.num_vertices(), 0);
    for (vertex_t s : g.sources()) src_left[s] = g.f_out(s);

    for (vertex_t s : g.sources()) {
        while (src_left[s] > 0) {
            std::vector<vertex_t> path{s};
            std::vector<std::int32_t> path_edges;
            flow_t w = src_left[s];
            vertex_t v = s;
            while (!g.is_sink(v)) {
                std::int32_t best = -1;
                for (std::int32_t ei : g.out_edges(v)) {
                    if (residual[ei] <= 0) continue;
                    if (best < 0 || residual[ei] > residual[best] ||
                        (residual[ei] == residual[best] &&
                         g.topo_pos(g.edge(ei).v) < g.topo_pos(g.edge(best).v)))
                        best = ei;
                }
                // Residual conservation guarantees a positive-residual out-edge.
                assert(best >= 0);
                path_edges.push_back(best);
                w = std::min(w, residual[best]);
                v = g.edge(best).v;
                path.push_back(v);
            }
            for (std::int32_t ei : path_edges) residual[ei] -= w;
            src_left[s] -= w;
            dec.paths.push_back({std::move(path), w});
        }
    }
    return dec;
}

std::vector<WeightedSafePath> two_pointer_scan(const FlowGraph& g,
                                               std::span<const vertex_t> p) {
    std::vector<WeightedSafePath> out;
    if (p.size() < 2) return out;
    // Edge flows and per-vertex losses along p, precomputed once.
    std::size_t m = p.size() - 1;
    std::vector<flow_t> ef(m);
    for (std::size_t i = 0; i < m; ++i) ef[i] = g.edge(g.find_edge(p[i], p[i + 1])).flow;

    std::size_t i = 0, j = 1;  // window p[i..j], at least one edge
    flow_t ex = ef[0];
    while (true) {
        // Extend right while the window stays safe.
        while (j < m && ex - (g.f_out(p[j]) - ef[j]) > 0) {
            ex -= g.f_out(p[j]) - ef[j];
            ++j;
        }
        if (j - i >= 2)  // unit-length windows are never reported
            out.push_back({std::vector<vertex_t>(p.begin() + i, p.begin() + j + 1), ex});
        if (j == m) break;
        // Take the unsafe right extension, then shrink from the left until
        // the window is safe again.
        ex -= g.f_out(p[j]) - ef[j];
        ++j;
        while (ex <= 0 && i + 1 < j) {
            ex += g.f_in(p[i + 1]) - ef[i];
            ++i;
        }
    }
    return out;
}

namespace {

// Aho-Corasick trie over vertex ids; used only to locate paths occurring
// inside other paths.
struct AcNode {
    std::unordered_map<vertex_t, std::int32_t> next;
    std::int32_t fail = 0;
    std::int32_t out_link = -1;  // deepest pattern-terminal suffix state
    std::int32_t pattern = -1;   // pattern index terminating here
    std::int32_t depth = 0;
};

}  // namespace

std::vector<WeightedSafePath> filter_subpaths(std::vector<WeightedSafePath> paths) {
    // Exact duplicates: keep the first occurrence.
    std::vector<WeightedSafePath> uniq;
    {
        std::set<std::vector<vertex_t>> seen;
        for (auto& p : paths)
            if (seen.insert(p.vertices).second) uniq.push_back(std::move(p));
    }

    std::vector<AcNode> trie(1);
    auto insert = [&](const std::vector<vertex_t>& seq, std::int32_t id) {
        std::int32_t s = 0;
        for (vertex_t v : seq) {
            auto it = trie[s].next.find(v);
            if (it == trie[s].next.end()) {
                trie.push_back({});
                trie.back().depth = trie[s].depth + 1;
                it = trie[s].next.emplace(v, static_cast<std::int32_t>(trie.size() - 1)).first;
            }
            s = it->second;
        }
        trie[s].pattern = id;
    };
    for (std::size_t i = 0; i < uniq.size(); ++i)
        insert(uniq[i].vertices, static_cast<std::int32_t>(i));

    // BFS fail links.
    std::vector<std::int32_t> order;
    order.reserve(trie.size());
    for (auto& [c, s] : trie[0].next) order.push_back(s);
    for (std::size_t h = 0; h < order.size(); ++h) {
        std::int32_t s = order[h];
        for (auto& [c, t] : trie[s].next) order.push_back(t);
        std::int32_t f = trie[s].fail;
        for (auto& [c, t] : trie[s].next) {
            std::int32_t q = f;
            while (q != 0 && !trie[q].next.count(c)) q = trie[q].fail;
            auto it = trie[q].next.find(c);
            trie[t].fail = (it != trie[q].next.end() && it->second != t) ? it->second : 0;
            trie[t].out_link =
                trie[trie[t].fail].pattern >= 0 ? trie[t].fail : trie[trie[t].fail].out_link;
        }
    }

    std::vector<char> subsumed(uniq.size(), 0);
    for (std::size_t i = 0; i < uniq.size(); ++i) {
        const auto& seq = uniq[i].vertices;
        std::int32_t s = 0;
        for (vertex_t v : seq) {
            while (s != 0 && !trie[s].next.count(v)) s = trie[s].fail;
            auto it = trie[s].next.find(v);
            s = (it != trie[s].next.end()) ? it->second : 0;
            for (std::int32_t q = s; q >= 0; q = trie[q].out_link) {
                std::int32_t pat = trie[q].pattern;
                if (pat >= 0 && static_cast<std::size_t>(pat) != i &&
                    trie[q].depth < static_cast<std::int32_t>(seq.size()))
                    subsumed[pat] = 1;
                if (q == 0) break;
            }
        }
    }

    std::vector<WeightedSafePath> out;
    for (std::size_t i = 0; i < uniq.size(); ++i)
        if (!subsumed[i]) out.push_back(std::move(uniq[i]));
    return out;
}

std::vector<WeightedSafePath> raw_pipeline(const FlowGraph& g) {
    CandidateDecomposition dec = candidate_flow_decomposition(g);
    std::vector<WeightedSafePath> all;
    for (const auto& p : dec.paths) {
        auto sub = two_pointer_scan(g, p.vertices);
        for (auto& s : sub) all.push_back(std::move(s));
    }
    auto out = filter_subpaths(std::move(all));
    canonical_sort(out, g);
    return out;
}

std::vector<WeightedSafePath> enumerate_all_maximal_safe_paths_bruteforce(const FlowGraph& g) {
    if (g.num_vertices() > 64)
        throw validation_error("brute-force oracle guard: more than 64 vertices");

    std::vector<WeightedSafePath> safe;
    // DFS over all paths, excess maintained incrementally via the extension
    // deltas; prune when a right extension can never be safe again (excess
    // only decreases along extensions).
    std::vector<vertex_t> cur;
    auto dfs = [&](auto&& self, vertex_t v, flow_t ex) -> void {
        for (std::int32_t ei : g.out_edges(v)) {
            const Edge& e = g.edge(ei);
            flow_t nex = (cur.size() == 1) ? e.flow : ex - (g.f_out(v) - e.flow);
            if (nex <= 0) continue;
            cur.push_back(e.v);
            if (cur.size() >= 3) safe.push_back({cur, nex});
            self(self, e.v, nex);
            cur.pop_back();
        }
    };
    for (vertex_t v = 0; v < g.num_vertices(); ++v) {
        cur = {v};
        dfs(dfs, v, 0);
    }

    // Keep paths that are not contiguous subpaths of another safe path
    // (directly, without the Aho-Corasick machinery of the pipeline).
    auto contains = [](const std::vector<vertex_t>& big, const std::vector<vertex_t>& small) {
        if (small.size() > big.size()) return false;
        for (std::size_t off = 0; off + small.size() <= big.size(); ++off)
            if (std::equal(small.begin(), small.end(), big.begin() + off)) return true;
        return false;
    };
    std::vector<WeightedSafePath> out;
    for (std::size_t i = 0; i < safe.size(); ++i) {
        bool sub = false;
        for (std::size_t j = 0; j < safe.size() && !sub; ++j)
            if (i != j && safe[j].vertices.size() > safe[i].vertices.size() &&
                contains(safe[j].vertices, safe[i].vertices))
                sub = true;
        if (!sub) out.push_back(safe[i]);
    }
    canonical_sort(out, g);
    return out;
}

namespace {

void canonicalize_decomposition(std::vector<WeightedPath>& dec) {
    // Merge repeated paths, then sort.
    std::map<std::vector<vertex_t>, flow_t> m;
    for (auto& p : dec) m[p.vertices] += p.weight;
    dec.clear();
    for (auto& [v, w] : m) dec.push_back({v, w});
}

}  // namespace

std::vector<std::vector<WeightedPath>> enumerate_flow_decompositions(const FlowGraph& g) {
    if (g.num_edges() > 12)
        throw validation_error("decomposition oracle guard: more than 12 edges");
    flow_t total = 0;
    for (vertex_t s : g.sources()) total += g.f_out(s);
    for (vertex_t v = 0; v < g.num_vertices(); ++v)
        if (g.is_source(v) && g.is_sink(v)) continue;
    if (total > 32)
        throw validation_error("decomposition oracle guard: total flow exceeds 32");

    std::set<std::vector<WeightedPath>> found;
    std::vector<flow_t> residual(g.num_edges());
    for (std::size_t i = 0; i < g.num_edges(); ++i) residual[i] = g.edge(i).flow;
    std::vector<WeightedPath> partial;

    // Enumerate all s-t paths with positive residual from the first
    // still-active source, branch over every (path, weight) choice.
    auto all_done = [&]() {
        for (flow_t r : residual)
            if (r != 0) return false;
        return true;
    };

    auto rec = [&](auto&& self) -> void {
        if (all_done()) {
            auto dec = partial;
            canonicalize_decomposition(dec);
            found.insert(std::move(dec));
            return;
        }
        vertex_t start = -1;
        for (vertex_t v : g.topo()) {
            for (std::int32_t ei : g.out_edges(v))
                if (residual[ei] > 0 && g.is_source(v)) {
                    start = v;
                    break;
                }
            if (start >= 0) break;
        }
        if (start < 0) return;  // residual left but no source flow: dead end

        // Enumerate residual-positive paths from start to any sink.
        std::vector<std::int32_t> pe;
        std::vector<vertex_t> pv{start};
        auto walk = [&](auto&& w, vertex_t v) -> void {
            if (g.is_sink(v) && !pe.empty()) {
                flow_t cap = residual[pe[0]];
                for (std::int32_t ei : pe) cap = std::min(cap, residual[ei]);
                for (flow_t wt = 1; wt <= cap; ++wt) {
                    for (std::int32_t ei : pe) residual[ei] -= wt;
                    partial.push_back({pv, wt});
                    self(self);
                    partial.pop_back();
                    for (std::int32_t ei : pe) residual[ei] += wt;
                }
            }
            for (std::int32_t ei : g.out_edges(v)) {
                if (residual[ei] <= 0) continue;
                pe.push_back(ei);
                pv.push_back(g.edge(ei).v);
                w(w, g.edge(ei).v);
                pv.pop_back();
                pe.pop_back();
            }
        };
        walk(walk, start);
    };
    rec(rec);

    return {found.begin(), found.end()};
}

void canonical_sort(std::vector<WeightedSafePath>& paths, const FlowGraph& g) {
    std::sort(paths.begin(), paths.end(), [&](const WeightedSafePath& a, const WeightedSafePath& b) {
        if (a.vertices.empty() || b.vertices.empty()) return a.vertices.size() < b.vertices.size();
        std::int32_t pa = g.topo_pos(a.vertices.front());
        std::int32_t pb = g.topo_pos(b.vertices.front());
        if (pa != pb) return pa < pb;
        if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
        for (std::size_t i = 0; i < a.vertices.size(); ++i)
            if (a.vertices[i] != b.vertices[i])
                return g.topo_pos(a.vertices[i]) < g.topo_pos(b.vertices[i]);
        return false;
    });
}

}  // namespace safeflow

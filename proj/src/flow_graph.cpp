#include "safeflow/flow_graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>

namespace safeflow {

FlowGraph::FlowGraph(vertex_t n, std::vector<Edge> edges, std::string name)
    : n_(n), name_(std::move(name)) {
    if (n < 0) throw validation_error("negative vertex count");
    // Merge parallel edges by summing flows, then keep a canonical (u,v) order.
    std::map<std::pair<vertex_t, vertex_t>, flow_t> merged;
    for (const Edge& e : edges) {
        if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
            throw validation_error("edge endpoint out of range");
        if (e.flow <= 0) throw validation_error("non-positive edge flow");
        merged[{e.u, e.v}] += e.flow;
    }
    edges_.reserve(merged.size());
    for (const auto& [uv, f] : merged) edges_.push_back({uv.first, uv.second, f});

    out_adj_.assign(n_, {});
    in_adj_.assign(n_, {});
    f_in_.assign(n_, 0);
    f_out_.assign(n_, 0);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        out_adj_[e.u].push_back(static_cast<std::int32_t>(i));
        in_adj_[e.v].push_back(static_cast<std::int32_t>(i));
        f_out_[e.u] += e.flow;
        f_in_[e.v] += e.flow;
    }
    for (vertex_t v = 0; v < n_; ++v) {
        std::sort(out_adj_[v].begin(), out_adj_[v].end(),
                  [&](std::int32_t a, std::int32_t b) { return edges_[a].v < edges_[b].v; });
        std::sort(in_adj_[v].begin(), in_adj_[v].end(),
                  [&](std::int32_t a, std::int32_t b) { return edges_[a].u < edges_[b].u; });
    }

    topo_ = topological_order(n_, edges_);
    topo_pos_.assign(n_, 0);
    for (std::int32_t i = 0; i < n_; ++i) topo_pos_[topo_[i]] = i;

    for (vertex_t v = 0; v < n_; ++v) {
        bool src = in_adj_[v].empty();
        bool snk = out_adj_[v].empty();
        if (src && !snk) sources_.push_back(v);
        if (snk && !src) sinks_.push_back(v);
        if (src && snk) continue;  // isolated vertex
        if (!src && !snk && f_in_[v] != f_out_[v])
            throw validation_error("conservation violated at vertex " + std::to_string(v) +
                                   " (in " + std::to_string(f_in_[v]) + " != out " +
                                   std::to_string(f_out_[v]) + ")");
    }
}

std::int32_t FlowGraph::find_edge(vertex_t u, vertex_t v) const {
    const auto& adj = out_adj_[u];
    auto it = std::lower_bound(adj.begin(), adj.end(), v, [&](std::int32_t e, vertex_t x) {
        return edges_[e].v < x;
    });
    if (it != adj.end() && edges_[*it].v == v) return *it;
    return -1;
}

std::vector<vertex_t> topological_order(vertex_t n, const std::vector<Edge>& edges) {
    std::vector<std::int32_t> indeg(n, 0);
    std::vector<std::vector<vertex_t>> succ(n);
    for (const Edge& e : edges) {
        if (e.u == e.v) throw validation_error("self-loop at vertex " + std::to_string(e.u));
        ++indeg[e.v];
        succ[e.u].push_back(e.v);
    }
    std::priority_queue<vertex_t, std::vector<vertex_t>, std::greater<>> ready;
    for (vertex_t v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push(v);
    std::vector<vertex_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        vertex_t v = ready.top();
        ready.pop();
        order.push_back(v);
        for (vertex_t w : succ[v])
            if (--indeg[w] == 0) ready.push(w);
    }
    if (static_cast<vertex_t>(order.size()) != n)
        throw validation_error("graph contains a cycle");
    return order;
}

MaxEdgeIndex build_max_edge_index(const FlowGraph& g) {
    MaxEdgeIndex idx;
    idx.max_in.assign(g.num_vertices(), {});
    idx.max_out.assign(g.num_vertices(), {});
    for (vertex_t v = 0; v < g.num_vertices(); ++v) {
        for (std::int32_t ei : g.in_edges(v)) {
            const Edge& e = g.edge(ei);
            MaxEdge& m = idx.max_in[v];
            if (m.edge < 0 || e.flow > m.flow) {
                m = {ei, e.flow, true};
            } else if (e.flow == m.flow) {
                m.unique = false;
                if (g.topo_pos(e.u) < g.topo_pos(g.edge(m.edge).u)) m.edge = ei;
            }
        }
        for (std::int32_t ei : g.out_edges(v)) {
            const Edge& e = g.edge(ei);
            MaxEdge& m = idx.max_out[v];
            if (m.edge < 0 || e.flow > m.flow) {
                m = {ei, e.flow, true};
            } else if (e.flow == m.flow) {
                m.unique = false;
                if (g.topo_pos(e.v) < g.topo_pos(g.edge(m.edge).v)) m.edge = ei;
            }
        }
    }
    return idx;
}

bool is_funnel(const FlowGraph& g) {
    // reach[v]: some vertex with in-degree > 1 equals v or reaches v.
    std::vector<char> reach(g.num_vertices(), 0);
    for (vertex_t v : g.topo()) {
        if (g.in_degree(v) > 1) reach[v] = 1;
        if (!reach[v])
            for (std::int32_t ei : g.in_edges(v))
                if (reach[g.edge(ei).u]) {
                    reach[v] = 1;
                    break;
                }
        if (reach[v] && g.out_degree(v) > 1) return false;
    }
    return true;
}

double funnel_vertex_ratio(const FlowGraph& g) {
    if (g.num_vertices() == 0) return 1.0;
    std::int64_t c = 0;
    for (vertex_t v = 0; v < g.num_vertices(); ++v)
        if (g.in_degree(v) <= 1 || g.out_degree(v) <= 1) ++c;
    return static_cast<double>(c) / static_cast<double>(g.num_vertices());
}

namespace {

bool parse_int(const std::string& tok, std::int64_t& out) {
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e;
}

}  // namespace

std::vector<FlowGraph> parse_graphs(std::istream& in) {
    std::vector<FlowGraph> graphs;
    std::string line;
    std::size_t lineno = 0;

    std::string name;
    bool in_block = false;
    bool have_n = false;
    std::int64_t n = 0;
    std::vector<Edge> edges;
    std::size_t block_line = 0;

    auto flush = [&]() {
        if (!in_block) return;
        if (!have_n) throw parse_error(block_line, "graph block missing vertex count");
        try {
            graphs.emplace_back(static_cast<vertex_t>(n), std::move(edges), name);
        } catch (const validation_error& ex) {
            throw parse_error(block_line, std::string("invalid graph '") + name + "': " + ex.what());
        }
        edges.clear();
        in_block = false;
        have_n = false;
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            flush();
            in_block = true;
            block_line = lineno;
            name = line.substr(first + 1);
            std::size_t b = name.find_first_not_of(" \t");
            std::size_t e = name.find_last_not_of(" \t\r");
            name = (b == std::string::npos) ? "" : name.substr(b, e - b + 1);
            continue;
        }
        if (!in_block) throw parse_error(lineno, "expected '#' graph header");
        std::istringstream ss(line);
        std::vector<std::string> toks;
        std::string t;
        while (ss >> t) toks.push_back(t);
        if (!have_n) {
            std::int64_t val;
            if (toks.size() != 1 || !parse_int(toks[0], val) || val < 0)
                throw parse_error(lineno, "expected vertex count");
            n = val;
            have_n = true;
            continue;
        }
        if (toks.size() != 3) throw parse_error(lineno, "expected edge line 'u v f'");
        std::int64_t u, v, f;
        if (!parse_int(toks[0], u) || !parse_int(toks[1], v) || !parse_int(toks[2], f))
            throw parse_error(lineno, "malformed edge line");
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw parse_error(lineno, "edge endpoint out of range");
        if (f <= 0) throw parse_error(lineno, "edge flow must be a positive integer");
        edges.push_back({static_cast<vertex_t>(u), static_cast<vertex_t>(v), f});
    }
    flush();
    return graphs;
}

std::vector<FlowGraph> parse_graphs_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open " + path);
    return parse_graphs(f);
}

void serialize_graph(const FlowGraph& g, std::ostream& out) {
    out << "# " << (g.name().empty() ? "graph" : g.name()) << '\n';
    out << g.num_vertices() << '\n';
    for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << ' ' << e.flow << '\n';
}

}  // namespace safeflow

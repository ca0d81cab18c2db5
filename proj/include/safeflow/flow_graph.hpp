#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace safeflow {

using vertex_t = std::int32_t;
using flow_t = std::int64_t;

struct parse_error : std::runtime_error {
    std::size_t line;
    parse_error(std::size_t line_, const std::string& what_)
        : std::runtime_error("parse error at line " + std::to_string(line_) + ": " + what_),
          line(line_) {}
};

struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Edge {
    vertex_t u;
    vertex_t v;
    flow_t flow;
};

// A DAG flow network: positive integer flows, conservation at every vertex
// that is neither a source nor a sink. Parallel edges are merged on
// construction by summing their flows. Immutable once built.
class FlowGraph {
  public:
    FlowGraph() = default;
    // Throws validation_error on non-positive flow, cyclic input, or a
    // conservation violation (checked after merging parallel edges).
    FlowGraph(vertex_t n, std::vector<Edge> edges, std::string name = "");

    vertex_t num_vertices() const { return n_; }
    std::size_t num_edges() const { return edges_.size(); }
    const std::string& name() const { return name_; }

    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(std::size_t i) const { return edges_[i]; }

    // Edge indices, sorted by the far endpoint's vertex id.
    const std::vector<std::int32_t>& out_edges(vertex_t v) const { return out_adj_[v]; }
    const std::vector<std::int32_t>& in_edges(vertex_t v) const { return in_adj_[v]; }

    flow_t f_in(vertex_t v) const { return f_in_[v]; }
    flow_t f_out(vertex_t v) const { return f_out_[v]; }
    std::size_t in_degree(vertex_t v) const { return in_adj_[v].size(); }
    std::size_t out_degree(vertex_t v) const { return out_adj_[v].size(); }

    bool is_source(vertex_t v) const { return in_adj_[v].empty(); }
    bool is_sink(vertex_t v) const { return out_adj_[v].empty(); }
    const std::vector<vertex_t>& sources() const { return sources_; }
    const std::vector<vertex_t>& sinks() const { return sinks_; }

    // Topological order (ties broken by ascending vertex id) and its inverse.
    const std::vector<vertex_t>& topo() const { return topo_; }
    std::int32_t topo_pos(vertex_t v) const { return topo_pos_[v]; }

    // Index of the edge (u,v), or -1 if absent.
    std::int32_t find_edge(vertex_t u, vertex_t v) const;

  private:
    vertex_t n_ = 0;
    std::string name_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::int32_t>> out_adj_;
    std::vector<std::vector<std::int32_t>> in_adj_;
    std::vector<flow_t> f_in_;
    std::vector<flow_t> f_out_;
    std::vector<vertex_t> sources_;
    std::vector<vertex_t> sinks_;
    std::vector<vertex_t> topo_;
    std::vector<std::int32_t> topo_pos_;
};

// Kahn's algorithm; zero-indegree ties broken by ascending vertex id.
// Throws validation_error if the edge list contains a cycle.
std::vector<vertex_t> topological_order(vertex_t n, const std::vector<Edge>& edges);

struct MaxEdge {
    std::int32_t edge = -1;  // edge index into FlowGraph::edges(), -1 if none
    flow_t flow = 0;
    bool unique = false;
};

// Per-vertex preferred maximum incoming/outgoing edges. On a flow tie the
// edge whose far endpoint comes earliest in topological order is preferred.
struct MaxEdgeIndex {
    std::vector<MaxEdge> max_in;
    std::vector<MaxEdge> max_out;
};

MaxEdgeIndex build_max_edge_index(const FlowGraph& g);

// True iff no vertex with in-degree > 1 equals or reaches a vertex with
// out-degree > 1. Such graphs have a unique flow decomposition.
bool is_funnel(const FlowGraph& g);

// |{v : indeg(v) <= 1 or outdeg(v) <= 1}| / n
double funnel_vertex_ratio(const FlowGraph& g);

// Catfish graph format: repeated blocks of
//   # <graph id, free text>
//   <n>
//   <u> <v> <f>      (one line per edge, 0 <= u,v < n, integer f > 0)
std::vector<FlowGraph> parse_graphs(std::istream& in);
std::vector<FlowGraph> parse_graphs_file(const std::string& path);

// Canonical serialization: edges sorted by (u, v).
void serialize_graph(const FlowGraph& g, std::ostream& out);

}  // namespace safeflow

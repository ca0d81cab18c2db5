#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "safeflow/flow_graph.hpp"
#include "safeflow/optenum.hpp"
#include "safeflow/safety.hpp"

namespace safeflow {

// tokens counts whitespace-separated lexical items of the serialized text;
// re-tokenizing the emitted bytes always reproduces it.
struct TokenReport {
    std::uint64_t tokens = 0;
    std::uint64_t bytes = 0;
    std::uint64_t records = 0;
};

std::uint64_t count_tokens(const std::string& text);

// Raw: one line per path, vertex ids then the excess flow.
TokenReport serialize_raw(const std::vector<WeightedSafePath>& paths, const FlowGraph& g,
                          std::ostream& out);
std::vector<WeightedSafePath> parse_raw(std::istream& in);

// Concise: per record a carrier line followed by one "l r f" line per
// interval; records separated by a blank line.
TokenReport serialize_concise(const std::vector<ConciseRecord>& recs, const FlowGraph& g,
                              std::ostream& out);
std::vector<ConciseRecord> parse_concise(std::istream& in);

// Heuristic concise: the first interval drops its left endpoint and the last
// its right one (both always equal the carrier ends); an interval starting
// where the previous one ended drops its start; a single-interval record
// reports only the flow.
TokenReport serialize_concise_heuristic(const std::vector<ConciseRecord>& recs,
                                        const FlowGraph& g, std::ostream& out);
std::vector<ConciseRecord> parse_concise_heuristic(std::istream& in);

// Optimal: non-trivial records grouped by representative edge, an "eL eR"
// line followed by one "l r f" line per path (groups separated by a blank
// line); then one "l eL eR f" line per trivial record (the right end always
// equals eR and is omitted).
TokenReport serialize_optimal(const std::vector<OptimalRecord>& recs, const FlowGraph& g,
                              std::ostream& out);
std::vector<OptimalRecord> parse_optimal(std::istream& in);

// Heuristic optimal: trivial records shrink to flow-first "f l r" lines (the
// interior is recovered along the incoming forest); non-trivial group lines
// omit r when it equals eR ("l f") or l when it equals eL (flow-first
// "f r"). An omission that the parser could read both ways falls back to the
// full line, so parsing stays lossless.
TokenReport serialize_optimal_heuristic(const std::vector<OptimalRecord>& recs,
                                        const FlowGraph& g, const ExtensionForest& fi,
                                        const ExtensionForest& fo, std::ostream& out);
std::vector<OptimalRecord> parse_optimal_heuristic(std::istream& in, const FlowGraph& g,
                                                   const ExtensionForest& fi,
                                                   const ExtensionForest& fo);

// Per-dataset statistics over the representations (pooled across graphs).
struct DatasetStats {
    std::string dataset;
    std::uint64_t graphs = 0;
    double avg_nodes = 0;
    double avg_edges = 0;
    double avg_complexity = 0;      // candidate decomposition path count
    double funnel_probability = 0;  // mean ratio of funnel-like vertices
    double avg_safe_len = 0;        // vertices per maximal safe path
    double pct_single = 0;          // carriers holding exactly one safe path
    double pct_start_end = 0;       // safe paths matching a carrier endpoint
    double pct_successive = 0;      // interval pairs sharing an endpoint
    double avg_indices = 0;         // intervals per carrier
    double avg_carrier_len = 0;     // vertices per carrier
    double pct_nontrivial = 0;      // optimal records that are non-trivial
    double avg_indices_opt = 0;     // records per non-trivial representative edge
};

DatasetStats dataset_statistics(const std::vector<FlowGraph>& graphs, bool skip_funnels,
                                const std::string& dataset_name);

extern const char* const kStatsCsvHeader;
void stats_csv_row(const DatasetStats& s, std::ostream& out);

}  // namespace safeflow

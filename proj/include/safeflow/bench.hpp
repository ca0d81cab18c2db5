#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "safeflow/codec.hpp"
#include "safeflow/flow_graph.hpp"

namespace safeflow {

// Closed set of algorithm names understood by the runner.
inline const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names = {
        "rawrep", "conrep", "optrawrep", "optconrep", "optconrep#", "optrep", "optrep#"};
    return names;
}

struct BenchRecord {
    std::string dataset;
    std::string graph;
    std::string algo;
    double ms = 0;
    double peak_mb = 0;
    std::uint64_t tokens = 0;
    std::uint64_t bytes = 0;
    vertex_t n = 0;
    std::uint64_t m = 0;
};

extern const char* const kBenchCsvHeader;  // dataset,graph,algo,ms,peak_mb,tokens,bytes,n,m
void bench_csv_row(const BenchRecord& r, std::ostream& out);
// Appends one row, writing the header first when the file is new or empty.
void append_csv(const std::string& path, const BenchRecord& r);

// Runs one algorithm over one graph, streaming the representation to out.
// Timing covers the algorithm and serialization, not parsing.
struct RunResult {
    TokenReport report;
    double ms = 0;
};
RunResult run_algorithm(const std::string& algo, const FlowGraph& g, std::ostream& out);

// Peak resident set of this process in MB (VmHWM).
double peak_rss_mb();

// Executes run_algorithm in a forked child with a wall-clock timeout and a
// peak-memory cap; output goes to /dev/null. Returns nullopt on DNF (either
// limit exceeded, the child is killed). mem_cap_mb <= 0 disables the cap.
struct CellResult {
    double ms = 0;
    double peak_mb = 0;
    std::uint64_t tokens = 0;
    std::uint64_t bytes = 0;
};
std::optional<CellResult> run_cell_subprocess(const std::string& algo, const FlowGraph& g,
                                              double timeout_sec, double mem_cap_mb);

// Five-way equivalence check of one graph against the brute-force oracle
// (old pipeline, optrawrep, expanded optconrep, expanded optrep). Returns an
// empty string on agreement, else a description of the first mismatch.
std::string verify_graph(const FlowGraph& g);

// Shrinks a failing graph by removing candidate-decomposition paths while
// verify_graph still reports a mismatch.
FlowGraph minimize_witness(const FlowGraph& g);

}  // namespace safeflow

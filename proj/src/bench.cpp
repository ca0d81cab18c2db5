#include "safeflow/bench.hpp"

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "safeflow/optenum.hpp"
#include "safeflow/safety.hpp"

namespace safeflow {

const char* const kBenchCsvHeader = "dataset,graph,algo,ms,peak_mb,tokens,bytes,n,m";

void bench_csv_row(const BenchRecord& r, std::ostream& out) {
    out << r.dataset << ',' << r.graph << ',' << r.algo << ',' << r.ms << ',' << r.peak_mb << ','
        << r.tokens << ',' << r.bytes << ',' << r.n << ',' << r.m << '\n';
}

void append_csv(const std::string& path, const BenchRecord& r) {
    bool need_header = true;
    {
        std::ifstream probe(path, std::ios::ate | std::ios::binary);
        if (probe && probe.tellg() > 0) need_header = false;
    }
    std::ofstream out(path, std::ios::app);
    if (!out) throw validation_error("cannot open csv " + path);
    std::ostringstream line;
    if (need_header) line << kBenchCsvHeader << '\n';
    bench_csv_row(r, line);
    out << line.str();  // single buffered write per row
}

RunResult run_algorithm(const std::string& algo, const FlowGraph& g, std::ostream& out) {
    auto t0 = std::chrono::steady_clock::now();
    TokenReport rep;
    if (algo == "rawrep") {
        rep = serialize_raw(raw_pipeline(g), g, out);
    } else if (algo == "conrep") {
        rep = serialize_concise(con_pipeline(g), g, out);
    } else if (algo == "optrawrep") {
        MaxEdgeIndex idx = build_max_edge_index(g);
        rep = serialize_raw(opt_raw_enumerate(g, idx), g, out);
    } else if (algo == "optconrep") {
        MaxEdgeIndex idx = build_max_edge_index(g);
        rep = serialize_concise(opt_concise(g, idx), g, out);
    } else if (algo == "optconrep#") {
        MaxEdgeIndex idx = build_max_edge_index(g);
        rep = serialize_concise_heuristic(opt_concise(g, idx), g, out);
    } else if (algo == "optrep") {
        MaxEdgeIndex idx = build_max_edge_index(g);
        auto [fi, fo] = build_extension_forests(g, idx);
        rep = serialize_optimal(opt_rep_enumerate(g, idx, fi, fo), g, out);
    } else if (algo == "optrep#") {
        MaxEdgeIndex idx = build_max_edge_index(g);
        auto [fi, fo] = build_extension_forests(g, idx);
        rep = serialize_optimal_heuristic(opt_rep_enumerate(g, idx, fi, fo), g, fi, fo, out);
    } else {
        throw validation_error("unknown algorithm '" + algo + "'");
    }
    auto t1 = std::chrono::steady_clock::now();
    return {rep, std::chrono::duration<double, std::milli>(t1 - t0).count()};
}

double peak_rss_mb() {
    std::ifstream st("/proc/self/status");
    std::string line;
    while (std::getline(st, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
            std::istringstream ss(line.substr(6));
            double kb = 0;
            ss >> kb;
            return kb / 1024.0;
        }
    }
    return 0.0;
}

namespace {

double read_rss_mb(pid_t pid) {
    std::ifstream st("/proc/" + std::to_string(pid) + "/status");
    std::string line;
    while (std::getline(st, line)) {
        if (line.rfind("VmRSS:", 0) == 0) {
            std::istringstream ss(line.substr(6));
            double kb = 0;
            ss >> kb;
            return kb / 1024.0;
        }
    }
    return 0.0;
}

}  // namespace

std::optional<CellResult> run_cell_subprocess(const std::string& algo, const FlowGraph& g,
                                              double timeout_sec, double mem_cap_mb) {
    int pipefd[2];
    if (pipe(pipefd) != 0) throw validation_error("pipe failed");
    pid_t pid = fork();
    if (pid < 0) throw validation_error("fork failed");
    if (pid == 0) {
        close(pipefd[0]);
        std::ofstream null("/dev/null");
        CellResult res;
        try {
            RunResult rr = run_algorithm(algo, g, null);
            res.ms = rr.ms;
            res.tokens = rr.report.tokens;
            res.bytes = rr.report.bytes;
            res.peak_mb = peak_rss_mb();
        } catch (...) {
            _exit(2);
        }
        char buf[128];
        int len = std::snprintf(buf, sizeof buf, "%.3f %.3f %llu %llu\n", res.ms, res.peak_mb,
                                static_cast<unsigned long long>(res.tokens),
                                static_cast<unsigned long long>(res.bytes));
        ssize_t ignored = write(pipefd[1], buf, static_cast<std::size_t>(len));
        (void)ignored;
        close(pipefd[1]);
        _exit(0);
    }
    close(pipefd[1]);

    auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_sec);
    bool dnf = false;
    int status = 0;
    while (true) {
        pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (std::chrono::steady_clock::now() > deadline ||
            (mem_cap_mb > 0 && read_rss_mb(pid) > mem_cap_mb)) {
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            dnf = true;
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (dnf || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        close(pipefd[0]);
        return std::nullopt;
    }
    char buf[128] = {0};
    ssize_t n = read(pipefd[0], buf, sizeof buf - 1);
    close(pipefd[0]);
    if (n <= 0) return std::nullopt;
    CellResult res;
    unsigned long long tok = 0, by = 0;
    if (std::sscanf(buf, "%lf %lf %llu %llu", &res.ms, &res.peak_mb, &tok, &by) != 4)
        return std::nullopt;
    res.tokens = tok;
    res.bytes = by;
    return res;
}

namespace {

std::string describe_paths(const std::vector<WeightedSafePath>& a) {
    std::ostringstream ss;
    for (const auto& p : a) {
        for (std::size_t i = 0; i < p.vertices.size(); ++i) ss << p.vertices[i] << ' ';
        ss << "w=" << p.excess << "; ";
    }
    return ss.str();
}

std::string first_diff(const char* name, std::vector<WeightedSafePath> got,
                       std::vector<WeightedSafePath> want) {
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    if (got == want) return "";
    std::ostringstream ss;
    ss << name << " disagrees with the oracle.\n got:    " << describe_paths(got)
       << "\n oracle: " << describe_paths(want) << '\n';
    return ss.str();
}

}  // namespace

std::string verify_graph(const FlowGraph& g) {
    std::vector<WeightedSafePath> oracle;
    try {
        oracle = enumerate_all_maximal_safe_paths_bruteforce(g);
    } catch (const validation_error& e) {
        return std::string("oracle guard: ") + e.what();
    }
    MaxEdgeIndex idx = build_max_edge_index(g);

    if (auto d = first_diff("rawrep", raw_pipeline(g), oracle); !d.empty()) return d;
    if (auto d = first_diff("optrawrep", opt_raw_enumerate(g, idx), oracle); !d.empty()) return d;
    if (auto d = first_diff("optconrep", expand_concise(opt_concise(g, idx)), oracle); !d.empty())
        return d;
    if (auto d = first_diff("conrep", expand_concise(con_pipeline(g)), oracle); !d.empty())
        return d;
    auto [fi, fo] = build_extension_forests(g, idx);
    std::vector<WeightedSafePath> expanded;
    for (const auto& rec : opt_rep_enumerate(g, idx, fi, fo))
        expanded.push_back(expand_optimal(g, fi, fo, rec));
    if (auto d = first_diff("optrep", expanded, oracle); !d.empty()) return d;
    return "";
}

FlowGraph minimize_witness(const FlowGraph& g) {
    FlowGraph cur = g;
    bool progress = true;
    while (progress) {
        progress = false;
        CandidateDecomposition dec = candidate_flow_decomposition(cur);
        if (dec.paths.size() <= 1) break;
        for (const auto& removed : dec.paths) {
            // Subtract one decomposition path; conservation survives.
            std::map<std::pair<vertex_t, vertex_t>, flow_t> acc;
            for (const Edge& e : cur.edges()) acc[{e.u, e.v}] = e.flow;
            for (std::size_t i = 0; i + 1 < removed.vertices.size(); ++i)
                acc[{removed.vertices[i], removed.vertices[i + 1]}] -= removed.weight;
            std::vector<Edge> edges;
            for (const auto& [uv, f] : acc)
                if (f > 0) edges.push_back({uv.first, uv.second, f});
            if (edges.empty()) continue;
            try {
                FlowGraph smaller(cur.num_vertices(), edges, cur.name() + " (shrunk)");
                if (!verify_graph(smaller).empty()) {
                    cur = std::move(smaller);
                    progress = true;
                    break;
                }
            } catch (const validation_error&) {
                continue;
            }
        }
    }
    return cur;
}

}  // namespace safeflow

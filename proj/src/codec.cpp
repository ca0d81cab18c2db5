#include "safeflow/codec.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace safeflow {

namespace {

// Streams whitespace-separated tokens and keeps the report in sync with the
// emitted bytes; output is never buffered whole.
class LineWriter {
  public:
    explicit LineWriter(std::ostream& out) : out_(out) {}

    void token(std::int64_t v) {
        char buf[24];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        std::size_t len = static_cast<std::size_t>(res.ptr - buf);
        if (!line_empty_) {
            out_.put(' ');
            ++rep_.bytes;
        }
        out_.write(buf, static_cast<std::streamsize>(len));
        rep_.bytes += len;
        ++rep_.tokens;
        line_empty_ = false;
    }

    void endl() {
        out_.put('\n');
        ++rep_.bytes;
        line_empty_ = true;
    }

    void blank() {
        out_.put('\n');
        ++rep_.bytes;
    }

    void record() { ++rep_.records; }
    TokenReport report() const { return rep_; }

  private:
    std::ostream& out_;
    TokenReport rep_;
    bool line_empty_ = true;
};

std::vector<std::vector<std::int64_t>> read_token_lines(std::istream& in) {
    std::vector<std::vector<std::int64_t>> lines;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::int64_t> toks;
        std::istringstream ss(line);
        std::string t;
        while (ss >> t) {
            std::int64_t v;
            auto res = std::from_chars(t.data(), t.data() + t.size(), v);
            if (res.ec != std::errc() || res.ptr != t.data() + t.size())
                throw parse_error(lineno, "expected integer token");
            toks.push_back(v);
        }
        lines.push_back(std::move(toks));
    }
    return lines;
}

template <typename T, typename Less>
std::vector<std::size_t> sorted_indices(const std::vector<T>& items, Less less) {
    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return less(items[a], items[b]); });
    return order;
}

}  // namespace

std::uint64_t count_tokens(const std::string& text) {
    std::istringstream ss(text);
    std::string t;
    std::uint64_t c = 0;
    while (ss >> t) ++c;
    return c;
}

TokenReport serialize_raw(const std::vector<WeightedSafePath>& paths, const FlowGraph& g,
                          std::ostream& out) {
    LineWriter w(out);
    auto order = sorted_indices(paths, [&](const WeightedSafePath& a, const WeightedSafePath& b) {
        std::int32_t pa = g.topo_pos(a.vertices.front());
        std::int32_t pb = g.topo_pos(b.vertices.front());
        if (pa != pb) return pa < pb;
        if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
        return a.vertices < b.vertices;
    });
    for (std::size_t i : order) {
        w.record();
        for (vertex_t v : paths[i].vertices) w.token(v);
        w.token(paths[i].excess);
        w.endl();
    }
    return w.report();
}

std::vector<WeightedSafePath> parse_raw(std::istream& in) {
    std::vector<WeightedSafePath> out;
    for (auto& toks : read_token_lines(in)) {
        if (toks.empty()) continue;
        if (toks.size() < 3) throw parse_error(0, "raw line needs at least two vertices and a flow");
        WeightedSafePath p;
        for (std::size_t i = 0; i + 1 < toks.size(); ++i)
            p.vertices.push_back(static_cast<vertex_t>(toks[i]));
        p.excess = toks.back();
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

std::vector<std::size_t> concise_order(const std::vector<ConciseRecord>& recs,
                                       const FlowGraph& g) {
    return sorted_indices(recs, [&](const ConciseRecord& a, const ConciseRecord& b) {
        std::int32_t pa = g.topo_pos(a.carrier.front());
        std::int32_t pb = g.topo_pos(b.carrier.front());
        if (pa != pb) return pa < pb;
        if (a.carrier.size() != b.carrier.size()) return a.carrier.size() < b.carrier.size();
        return a.carrier < b.carrier;
    });
}

void check_intervals(const ConciseRecord& rec) {
    std::map<vertex_t, std::size_t> pos;
    for (std::size_t i = 0; i < rec.carrier.size(); ++i) pos[rec.carrier[i]] = i;
    for (const auto& iv : rec.intervals) {
        auto l = pos.find(iv.l), r = pos.find(iv.r);
        if (l == pos.end() || r == pos.end() || l->second >= r->second)
            throw validation_error("concise interval endpoints not on carrier");
    }
}

}  // namespace

TokenReport serialize_concise(const std::vector<ConciseRecord>& recs, const FlowGraph& g,
                              std::ostream& out) {
    LineWriter w(out);
    auto order = concise_order(recs, g);
    bool first = true;
    for (std::size_t i : order) {
        const ConciseRecord& rec = recs[i];
        check_intervals(rec);
        if (!first) w.blank();
        first = false;
        w.record();
        for (vertex_t v : rec.carrier) w.token(v);
        w.endl();
        for (const auto& iv : rec.intervals) {
            w.token(iv.l);
            w.token(iv.r);
            w.token(iv.flow);
            w.endl();
        }
    }
    return w.report();
}

std::vector<ConciseRecord> parse_concise(std::istream& in) {
    std::vector<ConciseRecord> out;
    ConciseRecord cur;
    bool in_record = false;
    auto flush = [&]() {
        if (in_record) {
            out.push_back(std::move(cur));
            cur = {};
            in_record = false;
        }
    };
    for (auto& toks : read_token_lines(in)) {
        if (toks.empty()) {
            flush();
            continue;
        }
        if (!in_record) {
            if (toks.size() < 2) throw parse_error(0, "carrier line needs at least two vertices");
            for (auto t : toks) cur.carrier.push_back(static_cast<vertex_t>(t));
            in_record = true;
        } else {
            if (toks.size() != 3) throw parse_error(0, "interval line needs 'l r f'");
            cur.intervals.push_back(
                {static_cast<vertex_t>(toks[0]), static_cast<vertex_t>(toks[1]), toks[2]});
        }
    }
    flush();
    return out;
}

TokenReport serialize_concise_heuristic(const std::vector<ConciseRecord>& recs,
                                        const FlowGraph& g, std::ostream& out) {
    LineWriter w(out);
    auto order = concise_order(recs, g);
    bool first_rec = true;
    for (std::size_t i : order) {
        const ConciseRecord& rec = recs[i];
        check_intervals(rec);
        if (!first_rec) w.blank();
        first_rec = false;
        w.record();
        for (vertex_t v : rec.carrier) w.token(v);
        w.endl();
        std::size_t k = rec.intervals.size();
        if (k == 1) {
            w.token(rec.intervals[0].flow);
            w.endl();
            continue;
        }
        for (std::size_t j = 0; j < k; ++j) {
            const auto& iv = rec.intervals[j];
            bool successive = j > 0 && iv.l == rec.intervals[j - 1].r;
            if (j == 0) {
                w.token(iv.r);  // left end equals the carrier start
            } else if (j + 1 == k) {
                if (!successive) w.token(iv.l);  // right end equals the carrier end
            } else {
                if (!successive) w.token(iv.l);
                w.token(iv.r);
            }
            w.token(iv.flow);
            w.endl();
        }
    }
    return w.report();
}

std::vector<ConciseRecord> parse_concise_heuristic(std::istream& in) {
    std::vector<ConciseRecord> out;
    std::vector<std::vector<std::int64_t>> block;
    auto flush = [&]() {
        if (block.empty()) return;
        ConciseRecord rec;
        for (auto t : block[0]) rec.carrier.push_back(static_cast<vertex_t>(t));
        if (rec.carrier.size() < 2) throw parse_error(0, "carrier line needs at least two vertices");
        std::size_t k = block.size() - 1;
        if (k == 0) throw parse_error(0, "concise record without intervals");
        for (std::size_t j = 1; j <= k; ++j) {
            const auto& toks = block[j];
            vertex_t l, r;
            flow_t f;
            bool is_first = j == 1, is_last = j == k;
            if (is_first && is_last) {
                if (toks.size() != 1) throw parse_error(0, "single-interval record must be one flow");
                l = rec.carrier.front();
                r = rec.carrier.back();
                f = toks[0];
            } else if (is_first) {
                if (toks.size() != 2) throw parse_error(0, "first interval line needs 'r f'");
                l = rec.carrier.front();
                r = static_cast<vertex_t>(toks[0]);
                f = toks[1];
            } else if (is_last) {
                if (toks.size() == 2) {
                    l = static_cast<vertex_t>(toks[0]);
                    f = toks[1];
                } else if (toks.size() == 1) {
                    l = rec.intervals.back().r;
                    f = toks[0];
                } else {
                    throw parse_error(0, "last interval line needs 'l f' or 'f'");
                }
                r = rec.carrier.back();
            } else {
                if (toks.size() == 3) {
                    l = static_cast<vertex_t>(toks[0]);
                    r = static_cast<vertex_t>(toks[1]);
                    f = toks[2];
                } else if (toks.size() == 2) {
                    l = rec.intervals.back().r;
                    r = static_cast<vertex_t>(toks[0]);
                    f = toks[1];
                } else {
                    throw parse_error(0, "interval line needs 'l r f' or 'r f'");
                }
            }
            rec.intervals.push_back({l, r, f});
        }
        out.push_back(std::move(rec));
        block.clear();
    };
    for (auto& toks : read_token_lines(in)) {
        if (toks.empty())
            flush();
        else
            block.push_back(std::move(toks));
    }
    flush();
    return out;
}

namespace {

struct OptimalGroups {
    // indices of non-trivial records grouped by representative edge, and the
    // trivial records, both in serialization order
    std::vector<std::pair<std::pair<vertex_t, vertex_t>, std::vector<std::size_t>>> groups;
    std::vector<std::size_t> trivial;
};

OptimalGroups group_optimal(const std::vector<OptimalRecord>& recs, const FlowGraph& g) {
    OptimalGroups res;
    std::map<std::pair<std::int32_t, std::int32_t>,
             std::pair<std::pair<vertex_t, vertex_t>, std::vector<std::size_t>>>
        groups;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (recs[i].trivial) {
            res.trivial.push_back(i);
        } else {
            auto key = std::make_pair(g.topo_pos(recs[i].edge_tail), g.topo_pos(recs[i].edge_head));
            auto& slot = groups[key];
            slot.first = {recs[i].edge_tail, recs[i].edge_head};
            slot.second.push_back(i);
        }
    }
    for (auto& [key, slot] : groups) {
        std::sort(slot.second.begin(), slot.second.end(), [&](std::size_t a, std::size_t b) {
            return std::make_pair(g.topo_pos(recs[a].right), g.topo_pos(recs[a].left)) <
                   std::make_pair(g.topo_pos(recs[b].right), g.topo_pos(recs[b].left));
        });
        res.groups.push_back(std::move(slot));
    }
    std::sort(res.trivial.begin(), res.trivial.end(), [&](std::size_t a, std::size_t b) {
        return std::make_pair(g.topo_pos(recs[a].edge_head), g.topo_pos(recs[a].left)) <
               std::make_pair(g.topo_pos(recs[b].edge_head), g.topo_pos(recs[b].left));
    });
    return res;
}

}  // namespace

TokenReport serialize_optimal(const std::vector<OptimalRecord>& recs, const FlowGraph& g,
                              std::ostream& out) {
    LineWriter w(out);
    OptimalGroups gr = group_optimal(recs, g);
    bool first = true;
    for (const auto& [edge, members] : gr.groups) {
        if (!first) w.blank();
        first = false;
        w.token(edge.first);
        w.token(edge.second);
        w.endl();
        for (std::size_t i : members) {
            w.record();
            w.token(recs[i].left);
            w.token(recs[i].right);
            w.token(recs[i].flow);
            w.endl();
        }
    }
    if (!gr.trivial.empty() && !first) w.blank();
    for (std::size_t i : gr.trivial) {
        w.record();
        w.token(recs[i].left);
        w.token(recs[i].edge_tail);
        w.token(recs[i].edge_head);
        w.token(recs[i].flow);
        w.endl();
    }
    return w.report();
}

std::vector<OptimalRecord> parse_optimal(std::istream& in) {
    std::vector<OptimalRecord> out;
    bool have_edge = false;
    vertex_t eL = -1, eR = -1;
    for (auto& toks : read_token_lines(in)) {
        if (toks.empty()) {
            have_edge = false;
            continue;
        }
        if (toks.size() == 2) {
            eL = static_cast<vertex_t>(toks[0]);
            eR = static_cast<vertex_t>(toks[1]);
            have_edge = true;
        } else if (toks.size() == 3) {
            if (!have_edge) throw parse_error(0, "path line before representative edge");
            out.push_back({eL, eR, static_cast<vertex_t>(toks[0]), static_cast<vertex_t>(toks[1]),
                           toks[2], false});
        } else if (toks.size() == 4) {
            vertex_t t = static_cast<vertex_t>(toks[1]);
            vertex_t h = static_cast<vertex_t>(toks[2]);
            out.push_back({t, h, static_cast<vertex_t>(toks[0]), h, toks[3], true});
        } else {
            throw parse_error(0, "unrecognized optimal representation line");
        }
    }
    return out;
}

namespace {

flow_t record_flow(const FlowGraph& g, const ExtensionForest& fi, const ExtensionForest& fo,
                   vertex_t eL, vertex_t eR, vertex_t l, vertex_t r) {
    std::int32_t ei = g.find_edge(eL, eR);
    if (ei < 0) return -1;
    return g.edge(ei).flow - (fi.cum_loss[eL] - fi.cum_loss[l]) -
           (fo.cum_loss[eR] - fo.cum_loss[r]);
}

bool valid_left(const FlowGraph& g, const ExtensionForest& fi, vertex_t l, vertex_t eL) {
    return l >= 0 && l < g.num_vertices() && fi.is_ancestor(l, eL);
}
bool valid_right(const FlowGraph& g, const ExtensionForest& fo, vertex_t r, vertex_t eR) {
    return r >= 0 && r < g.num_vertices() && fo.is_ancestor(r, eR);
}

// Interpretations of a 2-token group line under edge (eL,eR):
//   A: "l f"  -> (l, eR)      B: "f r" -> (eL, r)
bool reads_as_a(const FlowGraph& g, const ExtensionForest& fi, const ExtensionForest& fo,
                vertex_t eL, vertex_t eR, std::int64_t t0, std::int64_t t1) {
    vertex_t l = static_cast<vertex_t>(t0);
    return valid_left(g, fi, l, eL) && record_flow(g, fi, fo, eL, eR, l, eR) == t1 && t1 > 0;
}
bool reads_as_b(const FlowGraph& g, const ExtensionForest& fi, const ExtensionForest& fo,
                vertex_t eL, vertex_t eR, std::int64_t t0, std::int64_t t1) {
    vertex_t r = static_cast<vertex_t>(t1);
    return valid_right(g, fo, r, eR) && record_flow(g, fi, fo, eL, eR, eL, r) == t0 && t0 > 0;
}

}  // namespace

TokenReport serialize_optimal_heuristic(const std::vector<OptimalRecord>& recs,
                                        const FlowGraph& g, const ExtensionForest& fi,
                                        const ExtensionForest& fo, std::ostream& out) {
    LineWriter w(out);
    OptimalGroups gr = group_optimal(recs, g);
    bool first = true;
    for (const auto& [edge, members] : gr.groups) {
        if (!first) w.blank();
        first = false;
        w.token(edge.first);
        w.token(edge.second);
        w.endl();
        for (std::size_t i : members) {
            const OptimalRecord& rec = recs[i];
            w.record();
            if (rec.right == rec.edge_head &&
                !reads_as_b(g, fi, fo, rec.edge_tail, rec.edge_head, rec.left, rec.flow)) {
                w.token(rec.left);
                w.token(rec.flow);
            } else if (rec.left == rec.edge_tail &&
                       !reads_as_a(g, fi, fo, rec.edge_tail, rec.edge_head, rec.flow, rec.right)) {
                w.token(rec.flow);
                w.token(rec.right);
            } else {
                w.token(rec.left);
                w.token(rec.right);
                w.token(rec.flow);
            }
            w.endl();
        }
    }
    if (!gr.trivial.empty() && !first) w.blank();
    for (std::size_t i : gr.trivial) {
        w.record();
        w.token(recs[i].flow);
        w.token(recs[i].left);
        w.token(recs[i].edge_head);
        w.endl();
    }
    return w.report();
}

std::vector<OptimalRecord> parse_optimal_heuristic(std::istream& in, const FlowGraph& g,
                                                   const ExtensionForest& fi,
                                                   const ExtensionForest& fo) {
    std::vector<OptimalRecord> out;
    bool have_edge = false, trivial_section = false;
    vertex_t eL = -1, eR = -1;
    for (auto& toks : read_token_lines(in)) {
        if (toks.empty()) {
            have_edge = false;
            continue;
        }
        if (!have_edge && !trivial_section) {
            if (toks.size() == 2) {
                eL = static_cast<vertex_t>(toks[0]);
                eR = static_cast<vertex_t>(toks[1]);
                have_edge = true;
                continue;
            }
            if (toks.size() == 3) {
                trivial_section = true;  // flow-first trivial lines from here on
            } else {
                throw parse_error(0, "expected a representative edge or a trivial record");
            }
        }
        if (trivial_section) {
            if (toks.size() != 3) throw parse_error(0, "trivial record line needs 'f l r'");
            vertex_t r = static_cast<vertex_t>(toks[2]);
            if (r < 0 || r >= g.num_vertices() || fi.parent[r] < 0)
                throw parse_error(0, "trivial record right end has no incoming forest edge");
            out.push_back({fi.parent[r], r, static_cast<vertex_t>(toks[1]), r, toks[0], true});
            continue;
        }
        if (toks.size() == 3) {
            out.push_back({eL, eR, static_cast<vertex_t>(toks[0]), static_cast<vertex_t>(toks[1]),
                           toks[2], false});
        } else if (toks.size() == 2) {
            bool a = reads_as_a(g, fi, fo, eL, eR, toks[0], toks[1]);
            bool b = reads_as_b(g, fi, fo, eL, eR, toks[0], toks[1]);
            if (a == b) throw parse_error(0, a ? "ambiguous shortened record line"
                                               : "unreadable shortened record line");
            if (a)
                out.push_back({eL, eR, static_cast<vertex_t>(toks[0]), eR, toks[1], false});
            else
                out.push_back({eL, eR, eL, static_cast<vertex_t>(toks[1]), toks[0], false});
        } else {
            throw parse_error(0, "unrecognized optimal representation line");
        }
    }
    return out;
}

const char* const kStatsCsvHeader =
    "dataset,graphs,avg_nodes,avg_edges,avg_complexity,funnel_prob,avg_s_len,pct_single,"
    "pct_start_end,pct_successive,avg_indices,avg_c_len,pct_nontrivial,avg_indices_opt";

DatasetStats dataset_statistics(const std::vector<FlowGraph>& graphs, bool skip_funnels,
                                const std::string& dataset_name) {
    DatasetStats s;
    s.dataset = dataset_name;
    std::uint64_t nodes = 0, edges = 0, complexity = 0;
    double funnel_ratio_sum = 0;
    std::uint64_t safe_paths = 0, safe_len = 0;
    std::uint64_t carriers = 0, carrier_len = 0, intervals = 0, single = 0;
    std::uint64_t start_end = 0, pairs = 0, successive = 0;
    std::uint64_t opt_records = 0, opt_nontrivial = 0, opt_edges = 0;

    for (const FlowGraph& g : graphs) {
        if (skip_funnels && is_funnel(g)) continue;
        ++s.graphs;
        nodes += g.num_vertices();
        edges += g.num_edges();
        complexity += candidate_flow_decomposition(g).paths.size();
        funnel_ratio_sum += funnel_vertex_ratio(g);

        MaxEdgeIndex idx = build_max_edge_index(g);
        for (const auto& p : opt_raw_enumerate(g, idx)) {
            ++safe_paths;
            safe_len += p.vertices.size();
        }
        for (const auto& rec : opt_concise(g, idx)) {
            ++carriers;
            carrier_len += rec.carrier.size();
            intervals += rec.intervals.size();
            if (rec.intervals.size() == 1) ++single;
            for (std::size_t i = 0; i < rec.intervals.size(); ++i) {
                const auto& iv = rec.intervals[i];
                if (iv.l == rec.carrier.front() || iv.r == rec.carrier.back()) ++start_end;
                if (i > 0) {
                    ++pairs;
                    if (rec.intervals[i - 1].r == iv.l) ++successive;
                }
            }
        }
        auto [fi, fo] = build_extension_forests(g, idx);
        std::set<std::pair<vertex_t, vertex_t>> nontrivial_edges;
        for (const auto& rec : opt_rep_enumerate(g, idx, fi, fo)) {
            ++opt_records;
            if (!rec.trivial) {
                ++opt_nontrivial;
                nontrivial_edges.insert({rec.edge_tail, rec.edge_head});
            }
        }
        opt_edges += nontrivial_edges.size();
    }
    if (s.graphs == 0) return s;

    double ng = static_cast<double>(s.graphs);
    s.avg_nodes = static_cast<double>(nodes) / ng;
    s.avg_edges = static_cast<double>(edges) / ng;
    s.avg_complexity = static_cast<double>(complexity) / ng;
    s.funnel_probability = funnel_ratio_sum / ng;
    s.avg_safe_len = safe_paths ? static_cast<double>(safe_len) / safe_paths : 0.0;
    s.pct_single = carriers ? 100.0 * single / carriers : 0.0;
    s.pct_start_end = intervals ? 100.0 * start_end / intervals : 0.0;
    s.pct_successive = pairs ? 100.0 * successive / pairs : 0.0;
    s.avg_indices = carriers ? static_cast<double>(intervals) / carriers : 0.0;
    s.avg_carrier_len = carriers ? static_cast<double>(carrier_len) / carriers : 0.0;
    s.pct_nontrivial = opt_records ? 100.0 * opt_nontrivial / opt_records : 0.0;
    s.avg_indices_opt = opt_edges ? static_cast<double>(opt_nontrivial) / opt_edges : 0.0;
    return s;
}

void stats_csv_row(const DatasetStats& s, std::ostream& out) {
    out << s.dataset << ',' << s.graphs << ',' << s.avg_nodes << ',' << s.avg_edges << ','
        << s.avg_complexity << ',' << s.funnel_probability << ',' << s.avg_safe_len << ','
        << s.pct_single << ',' << s.pct_start_end << ',' << s.pct_successive << ','
        << s.avg_indices << ',' << s.avg_carrier_len << ',' << s.pct_nontrivial << ','
        << s.avg_indices_opt << '\n';
}

}  // namespace safeflow

#include <algorithm>
#include <cassert>
#include <deque>
#include <limits>
#include <set>
#include <unordered_map>

#include "safeflow/optenum.hpp"

namespace safeflow {

namespace {

constexpr flow_t kDead = std::numeric_limits<flow_t>::min() / 4;

// Reversed trie of the left-maximal safe paths ending at the processed
// vertex: the root is the path end, parents point one step to the right,
// leaves are path starts. Tries of consecutive vertices share structure by
// hanging the whole trie of u below u's preferred max out-neighbour.
struct TrieNode {
    vertex_t vertex = -1;
    TrieNode* parent = nullptr;
    TrieNode* first_child = nullptr;
    TrieNode* next_sib = nullptr;
    TrieNode* prev_sib = nullptr;
    TrieNode* max_child = nullptr;  // child on the preferred max-in spine
    std::int32_t child_count = 0;
};

struct Trie {
    std::deque<TrieNode> arena;
    std::vector<TrieNode*> free_list;
    std::uint64_t ops = 0;

    TrieNode* alloc(vertex_t v) {
        ++ops;
        TrieNode* n;
        if (!free_list.empty()) {
            n = free_list.back();
            free_list.pop_back();
            *n = TrieNode{};
        } else {
            arena.emplace_back();
            n = &arena.back();
        }
        n->vertex = v;
        return n;
    }

    TrieNode* add_child(TrieNode* parent, vertex_t v, bool on_max_spine) {
        TrieNode* c = alloc(v);
        attach(parent, c, on_max_spine);
        return c;
    }

    void attach(TrieNode* parent, TrieNode* child, bool on_max_spine) {
        ++ops;
        child->parent = parent;
        child->next_sib = parent->first_child;
        child->prev_sib = nullptr;
        if (parent->first_child) parent->first_child->prev_sib = child;
        parent->first_child = child;
        ++parent->child_count;
        if (on_max_spine) parent->max_child = child;
    }

    // Unlink a childless node from its parent and recycle it.
    void remove_leaf(TrieNode* x) {
        ++ops;
        assert(x->child_count == 0 && x->parent);
        TrieNode* p = x->parent;
        if (x->prev_sib)
            x->prev_sib->next_sib = x->next_sib;
        else
            p->first_child = x->next_sib;
        if (x->next_sib) x->next_sib->prev_sib = x->prev_sib;
        --p->child_count;
        if (p->max_child == x) p->max_child = nullptr;
        free_list.push_back(x);
    }
};

struct Record {
    TrieNode* leaf = nullptr;
    flow_t excess = 0;  // excess of the last interval's path, ending at the owner vertex
    bool dead = false;
    // Concise bookkeeping; unused in the raw engine.
    std::vector<vertex_t> prefix;
    std::vector<ConciseRecord::Interval> intervals;
};

struct MarkEntry {
    vertex_t neighbour;
    std::size_t slot;  // index of the chain record in lists[neighbour]
};

// Shared state of the topological sweep behind OptRawRep and OptConRep.
struct Engine {
    const FlowGraph& g;
    const MaxEdgeIndex& idx;
    bool concise;
    Trie trie;
    std::vector<TrieNode*> root;
    std::vector<std::vector<Record>> lists;
    std::unordered_map<TrieNode*, std::vector<MarkEntry>> marks;
    std::vector<TrieNode*> marked_nodes;
    std::vector<WeightedSafePath> raw_out;
    std::vector<ConciseRecord> con_out;

    Engine(const FlowGraph& g_, const MaxEdgeIndex& idx_, bool concise_)
        : g(g_), idx(idx_), concise(concise_) {
        root.assign(g.num_vertices(), nullptr);
        lists.resize(g.num_vertices());
    }

    TrieNode* ensure_root(vertex_t v) {
        if (!root[v]) root[v] = trie.alloc(v);
        return root[v];
    }

    flow_t edge_flow(vertex_t u, vertex_t v) const {
        std::int32_t ei = g.find_edge(u, v);
        assert(ei >= 0);
        return g.edge(ei).flow;
    }

    bool is_max_in_tail(vertex_t tail, vertex_t head) const {
        const MaxEdge& m = idx.max_in[head];
        return m.edge >= 0 && g.edge(m.edge).u == tail;
    }

    // Left-maximal chain for a non-preferred out-edge (u,w): copy the max-in
    // spine of T_u into T_w while the extension keeps the excess positive,
    // stopping early at leaves of T_u.
    void build_chain(vertex_t u, vertex_t w, flow_t f_uw) {
        TrieNode* tip = trie.add_child(ensure_root(w), u, is_max_in_tail(u, w));
        TrieNode* x = ensure_root(u);
        flow_t fx = f_uw;
        while (x->child_count > 0) {
            ++trie.ops;
            const MaxEdge& m = idx.max_in[x->vertex];
            if (m.edge < 0) break;
            flow_t step = g.f_in(x->vertex) - m.flow;
            if (fx - step <= 0) break;
            TrieNode* next = x->max_child;
            // The max-in child outlives every sibling, so a positive budget
            // implies it is still present.
            assert(next != nullptr);
            if (!next) break;
            fx -= step;
            tip = trie.add_child(tip, next->vertex, true);
            x = next;
        }
        Record rec;
        rec.leaf = tip;
        rec.excess = fx;
        if (concise) {
            rec.intervals.push_back({x->vertex, w, fx});
            marks[x].push_back({w, lists[w].size()});
            marked_nodes.push_back(x);
        }
        lists[w].push_back(std::move(rec));
    }

    void emit_raw(TrieNode* leaf, flow_t excess) {
        std::vector<vertex_t> path;
        for (TrieNode* q = leaf; q; q = q->parent) {
            ++trie.ops;
            path.push_back(q->vertex);
        }
        if (path.size() >= 3) raw_out.push_back({std::move(path), excess});
    }

    void emit_concise(std::vector<vertex_t> carrier,
                      std::vector<ConciseRecord::Interval> intervals) {
        if (intervals.empty() || carrier.size() < 2) return;
        std::unordered_map<vertex_t, std::int32_t> pos;
        pos.reserve(carrier.size());
        for (std::size_t i = 0; i < carrier.size(); ++i)
            pos[carrier[i]] = static_cast<std::int32_t>(i);
        // Unit-length intervals are never reported.
        std::vector<ConciseRecord::Interval> keep;
        for (const auto& iv : intervals) {
            assert(pos.count(iv.l) && pos.count(iv.r) && pos[iv.l] < pos[iv.r]);
            if (pos[iv.r] - pos[iv.l] >= 2) keep.push_back(iv);
        }
        if (keep.empty()) return;
        // Minimal carrier: trim to the span of the surviving intervals.
        while (!carrier.empty() && carrier.back() != keep.back().r) carrier.pop_back();
        std::size_t first = static_cast<std::size_t>(pos[keep.front().l]);
        if (first > 0) carrier.erase(carrier.begin(), carrier.begin() + first);
        con_out.push_back({std::move(carrier), std::move(keep)});
    }

    void process(vertex_t u) {
        bool src = g.is_source(u), snk = g.is_sink(u);
        if (src && snk) return;
        vertex_t vstar = -1;
        if (!src && !snk) vstar = g.edge(idx.max_out[u].edge).v;
        if (src) ensure_root(u);

        for (std::int32_t ei : g.out_edges(u)) {
            const Edge& e = g.edge(ei);
            if (e.v != vstar) build_chain(u, e.v, e.flow);
        }
        if (vstar >= 0) {
            trie.attach(ensure_root(vstar), ensure_root(u), is_max_in_tail(u, vstar));
            process_records(u, vstar, g.f_out(u) - idx.max_out[u].flow);
        } else {
            process_records(u, -1, 0);
        }
        for (TrieNode* x : marked_nodes) marks.erase(x);
        marked_nodes.clear();
    }

    bool has_mark(TrieNode* x) {
        auto it = marks.find(x);
        return it != marks.end() && !it->second.empty();
    }

    void process_records(vertex_t u, vertex_t vstar, flow_t star_loss) {
        TrieNode* uroot = root[u];
        auto& recs = lists[u];
        for (std::size_t ri = 0; ri < recs.size(); ++ri) {
            if (recs[ri].dead) continue;
            Record rec = std::move(recs[ri]);
            recs[ri].dead = true;

            flow_t fx = (vstar < 0) ? kDead : rec.excess - star_loss;
            TrieNode* x = rec.leaf;
            bool one_step = rec.leaf->parent == uroot;
            bool resurrected = false;

            while (true) {
                // Shrink from the left while the extension stays unsafe,
                // removing the walked-over leaf edges from the trie.
                while (fx <= 0 && x != uroot) {
                    ++trie.ops;
                    if (!resurrected && has_mark(x)) break;
                    if (x->child_count > 0) break;
                    TrieNode* y = x->parent;
                    fx += g.f_in(y->vertex) - edge_flow(x->vertex, y->vertex);
                    if (concise) rec.prefix.push_back(x->vertex);
                    trie.remove_leaf(x);
                    x = y;
                }

                // A unit-length last interval that died against the root is
                // dropped; the rest of the record is flushed.
                if (concise && x == uroot && one_step && !rec.prefix.empty() &&
                    !rec.intervals.empty()) {
                    rec.intervals.pop_back();
                    emit_concise(std::move(rec.prefix), std::move(rec.intervals));
                    rec.prefix.clear();
                    rec.intervals.clear();
                }

                if (fx > 0 && x->child_count == 0) {
                    // The surviving suffix continues to vstar as a
                    // left-maximal safe path.
                    if (concise) {
                        if (x == rec.leaf && !rec.intervals.empty())
                            rec.intervals.back() = {rec.intervals.back().l, vstar, fx};
                        else
                            rec.intervals.push_back({x->vertex, vstar, fx});
                    }
                    rec.leaf = x;
                    rec.excess = fx;
                    rec.dead = false;
                    lists[vstar].push_back(std::move(rec));
                    break;
                }

                if (!resurrected && has_mark(x)) {
                    // Rendezvous with the chain that departed from x: donate
                    // the carrier so both share one concise record.
                    auto& stack = marks[x];
                    MarkEntry me = stack.back();
                    stack.pop_back();
                    Record& chain = lists[me.neighbour][me.slot];
                    std::vector<ConciseRecord::Interval> merged = std::move(rec.intervals);
                    for (auto& iv : chain.intervals) merged.push_back(iv);
                    chain.intervals = std::move(merged);
                    chain.prefix = std::move(rec.prefix);
                    // The spine above a now childless rendezvous node would
                    // be orphaned; keep walking it as a fresh record.
                    if (x->child_count == 0 && x != uroot) {
                        rec.prefix.clear();
                        rec.intervals.clear();
                        rec.leaf = x;
                        one_step = x->parent == uroot;
                        resurrected = true;
                        continue;
                    }
                    break;
                }

                if (concise && !rec.intervals.empty()) {
                    // The record dies here; materialize its carrier.
                    std::vector<vertex_t> carrier = std::move(rec.prefix);
                    for (TrieNode* q = x;; q = q->parent) {
                        ++trie.ops;
                        carrier.push_back(q->vertex);
                        if (q == uroot) break;
                    }
                    emit_concise(std::move(carrier), std::move(rec.intervals));
                }
                break;
            }
        }
        recs.clear();
        recs.shrink_to_fit();
    }
};

}  // namespace

std::vector<WeightedSafePath> opt_raw_enumerate(const FlowGraph& g, const MaxEdgeIndex& idx,
                                                TrieOpStats* stats) {
    Engine eng(g, idx, false);
    for (vertex_t u : g.topo()) {
        // A record whose right extension along the preferred max out-edge
        // dies is a maximal safe path; report it before shrinking.
        bool snk = g.is_sink(u);
        flow_t star_loss =
            (!g.is_source(u) && !snk) ? g.f_out(u) - idx.max_out[u].flow : 0;
        for (const Record& r : eng.lists[u]) {
            if (r.dead) continue;
            if (snk || r.excess - star_loss <= 0) eng.emit_raw(r.leaf, r.excess);
        }
        eng.process(u);
    }
    if (stats) stats->ops = eng.trie.ops;
    auto out = std::move(eng.raw_out);
    canonical_sort(out, g);
    return out;
}

std::vector<ConciseRecord> opt_concise(const FlowGraph& g, const MaxEdgeIndex& idx,
                                       TrieOpStats* stats) {
    Engine eng(g, idx, true);
    for (vertex_t u : g.topo()) eng.process(u);
    if (stats) stats->ops = eng.trie.ops;
    auto out = std::move(eng.con_out);
    canonical_sort_concise(out, g);
    return out;
}

std::vector<ConciseRecord> con_pipeline(const FlowGraph& g) {
    CandidateDecomposition dec = candidate_flow_decomposition(g);

    struct Scanned {
        std::size_t path_idx;
        std::size_t l_pos, r_pos;
        WeightedSafePath p;
    };
    std::vector<Scanned> scanned;
    std::vector<WeightedSafePath> all;
    for (std::size_t pi = 0; pi < dec.paths.size(); ++pi) {
        const auto& verts = dec.paths[pi].vertices;
        for (auto& s : two_pointer_scan(g, verts)) {
            std::size_t l = 0;
            while (verts[l] != s.vertices.front()) ++l;
            std::size_t r = l + s.vertices.size() - 1;
            scanned.push_back({pi, l, r, s});
            all.push_back(std::move(s));
        }
    }
    auto survivors = filter_subpaths(std::move(all));
    std::set<std::vector<vertex_t>> keep;
    for (auto& s : survivors) keep.insert(s.vertices);

    // Merge the surviving intervals of each decomposition path into carriers
    // while they all still overlap a common segment.
    std::vector<ConciseRecord> out;
    for (std::size_t pi = 0; pi < dec.paths.size(); ++pi) {
        const auto& verts = dec.paths[pi].vertices;
        std::vector<const Scanned*> ivs;
        for (const auto& s : scanned)
            if (s.path_idx == pi && keep.count(s.p.vertices)) {
                ivs.push_back(&s);
                keep.erase(s.p.vertices);  // a duplicate stays with its first carrier
            }
        std::size_t i = 0;
        while (i < ivs.size()) {
            std::size_t lo = ivs[i]->l_pos, hi = ivs[i]->r_pos;
            std::size_t common_lo = lo, common_hi = hi;
            ConciseRecord rec;
            rec.intervals.push_back({verts[lo], verts[hi], ivs[i]->p.excess});
            std::size_t j = i + 1;
            while (j < ivs.size() &&
                   std::max(common_lo, ivs[j]->l_pos) <= std::min(common_hi, ivs[j]->r_pos)) {
                common_lo = std::max(common_lo, ivs[j]->l_pos);
                common_hi = std::min(common_hi, ivs[j]->r_pos);
                hi = std::max(hi, ivs[j]->r_pos);
                rec.intervals.push_back(
                    {verts[ivs[j]->l_pos], verts[ivs[j]->r_pos], ivs[j]->p.excess});
                ++j;
            }
            rec.carrier.assign(verts.begin() + lo, verts.begin() + hi + 1);
            out.push_back(std::move(rec));
            i = j;
        }
    }
    canonical_sort_concise(out, g);
    return out;
}

void canonical_sort_concise(std::vector<ConciseRecord>& recs, const FlowGraph& g) {
    std::sort(recs.begin(), recs.end(), [&](const ConciseRecord& a, const ConciseRecord& b) {
        std::int32_t pa = g.topo_pos(a.carrier.front());
        std::int32_t pb = g.topo_pos(b.carrier.front());
        if (pa != pb) return pa < pb;
        if (a.carrier.size() != b.carrier.size()) return a.carrier.size() < b.carrier.size();
        for (std::size_t i = 0; i < a.carrier.size(); ++i)
            if (a.carrier[i] != b.carrier[i])
                return g.topo_pos(a.carrier[i]) < g.topo_pos(b.carrier[i]);
        return false;
    });
}

}  // namespace safeflow

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "safeflow/optenum.hpp"

using namespace safeflow;
using safeflow::testing::fig2;
using safeflow::testing::y_graph;

namespace {

std::vector<WeightedSafePath> sorted(std::vector<WeightedSafePath> v) {
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<WeightedSafePath> expand_rep(const FlowGraph& g) {
    MaxEdgeIndex idx = build_max_edge_index(g);
    auto [fi, fo] = build_extension_forests(g, idx);
    std::vector<WeightedSafePath> out;
    for (const auto& rec : opt_rep_enumerate(g, idx, fi, fo))
        out.push_back(expand_optimal(g, fi, fo, rec));
    return out;
}

}  // namespace

TEST_CASE("extension forests on the y graph") {
    FlowGraph g = y_graph();
    MaxEdgeIndex idx = build_max_edge_index(g);
    auto [fi, fo] = build_extension_forests(g, idx);
    CHECK(fi.parent[2] == 0);  // a's max incoming edge comes from s (5 > 2)
    CHECK(fi.cum_loss[2] == 2);  // extending past a loses f_in(a) - f(s,a) = 2
    CHECK(fi.cum_loss[3] == 2);
    CHECK(fo.parent[0] == 2);
    CHECK(fo.cum_loss[0] == 0);
}

TEST_CASE("single path graph forest") {
    FlowGraph g(4, {{0, 1, 7}, {1, 2, 7}, {2, 3, 7}}, "p");
    MaxEdgeIndex idx = build_max_edge_index(g);
    auto [fi, fo] = build_extension_forests(g, idx);
    for (vertex_t v = 1; v < 4; ++v) {
        CHECK(fi.parent[v] == v - 1);
        CHECK(fi.cum_loss[v] == 0);
    }
    CHECK(fi.level_ancestor(3, 0) == 0);
    CHECK(fi.level_ancestor(3, 3) == 3);
}

TEST_CASE("level ancestors and budget walks match the naive oracles") {
    for (const auto& gen : safeflow::testing::small_fuzz_batch(60, 2024)) {
        const FlowGraph& g = gen.graph;
        MaxEdgeIndex idx = build_max_edge_index(g);
        auto [fi, fo] = build_extension_forests(g, idx);
        SplitMix64 rng(gen.graph.num_vertices() * 1337u + 5);
        for (vertex_t v = 0; v < g.num_vertices(); ++v) {
            // cum_loss is monotone along the parent chain.
            if (fi.parent[v] >= 0) CHECK(fi.cum_loss[v] >= fi.cum_loss[fi.parent[v]]);
            if (fo.parent[v] >= 0) CHECK(fo.cum_loss[v] >= fo.cum_loss[fo.parent[v]]);
            if (fi.depth[v] > 0) {
                std::int32_t d = static_cast<std::int32_t>(rng.below(fi.depth[v] + 1));
                vertex_t a = v;
                for (std::int32_t s = fi.depth[v]; s > d; --s) a = fi.parent[a];
                CHECK(fi.level_ancestor(v, d) == a);
            }
            for (flow_t excess : {flow_t(1), flow_t(3), flow_t(50), flow_t(100000)}) {
                vertex_t got = left_extend(fi, v, excess);
                vertex_t walk = v;
                while (fi.parent[walk] >= 0 &&
                       fi.cum_loss[v] - fi.cum_loss[fi.parent[walk]] < excess)
                    walk = fi.parent[walk];
                CHECK(got == walk);
                vertex_t got_o = right_extend_o(fo, v, excess);
                vertex_t walk_o = v;
                while (fo.parent[walk_o] >= 0 &&
                       fo.cum_loss[v] - fo.cum_loss[fo.parent[walk_o]] < excess)
                    walk_o = fo.parent[walk_o];
                CHECK(got_o == walk_o);
            }
        }
    }
}

TEST_CASE("right_extend_i matches a naive spine walk") {
    for (const auto& gen : safeflow::testing::small_fuzz_batch(40, 909)) {
        const FlowGraph& g = gen.graph;
        MaxEdgeIndex idx = build_max_edge_index(g);
        auto [fi, fo] = build_extension_forests(g, idx);
        for (vertex_t leaf = 0; leaf < g.num_vertices(); ++leaf) {
            if (fi.depth[leaf] < 2) continue;
            for (std::int32_t d = 0; d < fi.depth[leaf]; ++d) {
                vertex_t y = fi.level_ancestor(leaf, d);
                vertex_t got = right_extend_i(fi, g, idx, y, leaf);
                // Naive: deepest r on the spine with <y..r> safe.
                vertex_t best = fi.level_ancestor(leaf, d + 1);
                for (std::int32_t rd = d + 1; rd <= fi.depth[leaf]; ++rd) {
                    vertex_t r = fi.level_ancestor(leaf, rd);
                    vertex_t c = fi.level_ancestor(leaf, d + 1);
                    flow_t ex = idx.max_in[c].flow - (fi.cum_spine[r] - fi.cum_spine[c]);
                    if (ex > 0) best = r;
                }
                CHECK(got == best);
            }
        }
    }
}

TEST_CASE("opt_raw on fig2 finds the five paths") {
    FlowGraph g = fig2();
    MaxEdgeIndex idx = build_max_edge_index(g);
    auto got = sorted(opt_raw_enumerate(g, idx));
    auto want = sorted(safeflow::testing::fig2_safe_paths());
    CHECK(got == want);
}

TEST_CASE("opt_concise on fig2 reproduces the two published carriers") {
    FlowGraph g = fig2();
    MaxEdgeIndex idx = build_max_edge_index(g);
    auto recs = opt_concise(g, idx);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].carrier == std::vector<vertex_t>{0, 2, 3, 4, 5, 6, 7, 8, 9, 11});
    REQUIRE(recs[0].intervals.size() == 2);
    CHECK(recs[0].intervals[0] == ConciseRecord::Interval{0, 9, 3});
    CHECK(recs[0].intervals[1] == ConciseRecord::Interval{2, 11, 3});
    CHECK(recs[1].carrier == std::vector<vertex_t>{0, 1, 2, 3, 4, 5, 7, 8, 9, 10, 11});
    REQUIRE(recs[1].intervals.size() == 3);
    CHECK(recs[1].intervals[0] == ConciseRecord::Interval{0, 5, 3});
    CHECK(recs[1].intervals[1] == ConciseRecord::Interval{2, 9, 3});
    CHECK(recs[1].intervals[2] == ConciseRecord::Interval{7, 11, 3});
}

TEST_CASE("opt_rep on fig2 yields 2 trivial + 3 non-trivial records") {
    FlowGraph g = fig2();
    MaxEdgeIndex idx = build_max_edge_index(g);
    auto [fi, fo] = build_extension_forests(g, idx);
    auto recs = opt_rep_enumerate(g, idx, fi, fo);
    REQUIRE(recs.size() == 5);
    int trivial = 0;
    for (const auto& r : recs) trivial += r.trivial;
    CHECK(trivial == 2);
    // Non-trivial representative edges are exactly (b,c), (f,h), (k,l).
    std::set<std::pair<vertex_t, vertex_t>> nt;
    for (const auto& r : recs)
        if (!r.trivial) nt.insert({r.edge_tail, r.edge_head});
    CHECK(nt == std::set<std::pair<vertex_t, vertex_t>>{{1, 2}, {5, 7}, {10, 11}});
    // The trivial records are (a,(i,j)) and (c,(j,l)).
    for (const auto& r : recs)
        if (r.trivial) {
            CHECK(r.right == r.edge_head);
            bool a = r.left == 0 && r.edge_tail == 8 && r.edge_head == 9;
            bool b = r.left == 2 && r.edge_tail == 9 && r.edge_head == 11;
            CHECK((a || b));
        }
    auto got = sorted([&] {
        std::vector<WeightedSafePath> v;
        for (const auto& r : recs) v.push_back(expand_optimal(g, fi, fo, r));
        return v;
    }());
    CHECK(got == sorted(safeflow::testing::fig2_safe_paths()));
}

TEST_CASE("expand_optimal rejects malformed records") {
    FlowGraph g = fig2();
    MaxEdgeIndex idx = build_max_edge_index(g);
    auto [fi, fo] = build_extension_forests(g, idx);
    CHECK_THROWS_AS(expand_optimal(g, fi, fo, {8, 9, 1 /* not an ancestor */, 9, 3, true}),
                    validation_error);
    CHECK_THROWS_AS(expand_optimal(g, fi, fo, {1, 2, 0, 10 /* not in F_o of c */, 3, false}),
                    validation_error);
    auto bare = expand_optimal(g, fi, fo, {1, 2, 1, 2, 3, false});
    CHECK(bare.vertices == std::vector<vertex_t>{1, 2});  // callers must reject length 1
}

TEST_CASE("funnels: every algorithm returns the decomposition paths") {
    SplitMix64 rng(606);
    for (int i = 0; i < 30; ++i) {
        GenParams p;
        p.n = static_cast<vertex_t>(rng.range(4, 40));
        p.d = static_cast<std::int32_t>(rng.range(3, std::min<std::int64_t>(p.n, 12)));
        p.k = 1;
        p.seed = rng.next();
        Generated gen = (i % 2) ? gen_uniform(p) : [&] {
            GenParams q = p;
            q.p = 1.0;
            q.k = static_cast<std::int32_t>(rng.range(1, 6));
            return gen_improved(q);
        }();
        const FlowGraph& g = gen.graph;
        REQUIRE(is_funnel(g));
        auto dec = candidate_flow_decomposition(g);
        std::vector<WeightedSafePath> want;
        for (const auto& wp : dec.paths)
            if (wp.vertices.size() >= 3) want.push_back({wp.vertices, wp.weight});
        MaxEdgeIndex idx = build_max_edge_index(g);
        CHECK(sorted(opt_raw_enumerate(g, idx)) == sorted(want));
        CHECK(sorted(expand_rep(g)) == sorted(want));
        CHECK(sorted(expand_concise(opt_concise(g, idx))) == sorted(want));
    }
}

TEST_CASE("five way equivalence on small fuzzed graphs") {
    for (const auto& gen : safeflow::testing::small_fuzz_batch(150, 80085)) {
        const FlowGraph& g = gen.graph;
        auto oracle = sorted(enumerate_all_maximal_safe_paths_bruteforce(g));
        MaxEdgeIndex idx = build_max_edge_index(g);
        REQUIRE(sorted(opt_raw_enumerate(g, idx)) == oracle);
        REQUIRE(sorted(expand_concise(opt_concise(g, idx))) == oracle);
        REQUIRE(sorted(expand_rep(g)) == oracle);
        REQUIRE(sorted(raw_pipeline(g)) == oracle);
        REQUIRE(sorted(expand_concise(con_pipeline(g))) == oracle);
    }
}

TEST_CASE("five way equivalence under heavy flow ties") {
    for (const auto& gen : safeflow::testing::small_fuzz_batch(150, 1213, 3)) {
        const FlowGraph& g = gen.graph;
        auto oracle = sorted(enumerate_all_maximal_safe_paths_bruteforce(g));
        MaxEdgeIndex idx = build_max_edge_index(g);
        REQUIRE(sorted(opt_raw_enumerate(g, idx)) == oracle);
        REQUIRE(sorted(expand_concise(opt_concise(g, idx))) == oracle);
        REQUIRE(sorted(expand_rep(g)) == oracle);
        REQUIRE(sorted(raw_pipeline(g)) == oracle);
        REQUIRE(sorted(expand_concise(con_pipeline(g))) == oracle);
    }
}

TEST_CASE("concise validity: single ownership, ordering, no nesting, no units") {
    for (const auto& gen : safeflow::testing::small_fuzz_batch(100, 3111)) {
        const FlowGraph& g = gen.graph;
        MaxEdgeIndex idx = build_max_edge_index(g);
        std::set<std::vector<vertex_t>> seen;
        for (const auto& rec : opt_concise(g, idx)) {
            std::map<vertex_t, std::size_t> pos;
            for (std::size_t i = 0; i < rec.carrier.size(); ++i) pos[rec.carrier[i]] = i;
            // Carrier is a real path.
            for (std::size_t i = 0; i + 1 < rec.carrier.size(); ++i)
                REQUIRE(g.find_edge(rec.carrier[i], rec.carrier[i + 1]) >= 0);
            std::size_t prev_l = 0, prev_r = 0;
            bool first = true;
            for (const auto& iv : rec.intervals) {
                REQUIRE(pos.count(iv.l));
                REQUIRE(pos.count(iv.r));
                std::size_t pl = pos[iv.l], pr = pos[iv.r];
                REQUIRE(pl < pr);
                REQUIRE(pr - pl >= 2);  // no unit intervals
                if (!first) {
                    REQUIRE(prev_l < pl);  // sorted by left endpoint
                    REQUIRE(prev_r < pr);  // hence no nesting
                }
                first = false;
                prev_l = pl;
                prev_r = pr;
                std::vector<vertex_t> path(rec.carrier.begin() + pl, rec.carrier.begin() + pr + 1);
                REQUIRE(excess_flow(g, path) == iv.flow);
                REQUIRE(seen.insert(std::move(path)).second);  // exactly one carrier owns it
            }
        }
    }
}

TEST_CASE("optimal record validity") {
    for (const auto& gen : safeflow::testing::small_fuzz_batch(100, 5657)) {
        const FlowGraph& g = gen.graph;
        MaxEdgeIndex idx = build_max_edge_index(g);
        auto [fi, fo] = build_extension_forests(g, idx);
        for (const auto& rec : opt_rep_enumerate(g, idx, fi, fo)) {
            auto p = expand_optimal(g, fi, fo, rec);
            REQUIRE(p.vertices.size() >= 3);
            REQUIRE(excess_flow(g, p.vertices) == rec.flow);
            REQUIRE(rec.flow > 0);
            // Not extendable on either side.
            CHECK_FALSE(is_left_extendable(g, idx, p.vertices.front(), rec.flow));
            CHECK_FALSE(is_right_extendable(g, idx, p.vertices.back(), rec.flow));
            // Trivial records carry their forest edge; non-trivial records an
            // edge outside the incoming forest.
            std::int32_t ei = g.find_edge(rec.edge_tail, rec.edge_head);
            REQUIRE(ei >= 0);
            if (rec.trivial) {
                CHECK(idx.max_in[rec.edge_head].edge == ei);
                CHECK(rec.right == rec.edge_head);
            } else {
                CHECK(idx.max_in[rec.edge_head].edge != ei);
            }
        }
    }
}

TEST_CASE("trie work stays proportional to input plus output") {
    SplitMix64 rng(8888);
    for (int i = 0; i < 12; ++i) {
        GenParams p;
        p.n = static_cast<vertex_t>(rng.range(200, 2000));
        p.d = static_cast<std::int32_t>(rng.range(4, 40));
        p.k = static_cast<std::int32_t>(rng.range(2, 24));
        p.seed = rng.next();
        p.p = 0.81;
        Generated gen = (i % 2) ? gen_improved(p) : gen_uniform(p);
        const FlowGraph& g = gen.graph;
        MaxEdgeIndex idx = build_max_edge_index(g);
        TrieOpStats stats;
        auto paths = opt_raw_enumerate(g, idx, &stats);
        std::uint64_t tokens = 0;
        for (const auto& sp : paths) tokens += sp.vertices.size() + 1;
        std::uint64_t budget = 8 * (g.num_edges() + g.num_vertices() + tokens) + 64;
        CHECK(stats.ops <= budget);
    }
}

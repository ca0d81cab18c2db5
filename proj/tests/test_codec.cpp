#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "fixtures.hpp"
#include "safeflow/codec.hpp"
#include "safeflow/optenum.hpp"

using namespace safeflow;
using safeflow::testing::fig2;

namespace {

struct Ctx {
    FlowGraph g;
    MaxEdgeIndex idx;
    ExtensionForest fi, fo;
    explicit Ctx(FlowGraph gr) : g(std::move(gr)), idx(build_max_edge_index(g)) {
        auto [i, o] = build_extension_forests(g, idx);
        fi = std::move(i);
        fo = std::move(o);
    }
};

std::vector<OptimalRecord> sorted_recs(std::vector<OptimalRecord> v) {
    auto key = [](const OptimalRecord& r) {
        return std::make_tuple(r.edge_tail, r.edge_head, r.left, r.right, r.flow, r.trivial);
    };
    std::sort(v.begin(), v.end(),
              [&](const OptimalRecord& a, const OptimalRecord& b) { return key(a) < key(b); });
    return v;
}

std::vector<ConciseRecord> sorted_crecs(std::vector<ConciseRecord> v) {
    std::sort(v.begin(), v.end(), [](const ConciseRecord& a, const ConciseRecord& b) {
        return a.carrier < b.carrier;
    });
    return v;
}

}  // namespace

TEST_CASE("fig2 golden token totals across all representations") {
    Ctx c(fig2());
    std::ostringstream raw, con, conh, opt, opth, oldcon;

    auto paths = opt_raw_enumerate(c.g, c.idx);
    CHECK(serialize_raw(paths, c.g, raw).tokens == 41);

    auto crecs = opt_concise(c.g, c.idx);
    CHECK(serialize_concise(crecs, c.g, con).tokens == 36);
    CHECK(serialize_concise_heuristic(crecs, c.g, conh).tokens == 32);

    auto orecs = opt_rep_enumerate(c.g, c.idx, c.fi, c.fo);
    CHECK(serialize_optimal(orecs, c.g, opt).tokens == 23);
    CHECK(serialize_optimal_heuristic(orecs, c.g, c.fi, c.fo, opth).tokens == 20);

    auto oldrecs = con_pipeline(c.g);
    CHECK(serialize_concise(oldrecs, c.g, oldcon).tokens == 39);

    // The old pipeline's carriers are exactly the published ones.
    REQUIRE(oldrecs.size() == 3);
    CHECK(oldrecs[0].carrier == std::vector<vertex_t>{0, 1, 2, 3, 4, 5, 7, 8, 9});
    CHECK(oldrecs[1].carrier == std::vector<vertex_t>{0, 2, 3, 4, 5, 6, 7, 8, 9, 11});
    CHECK(oldrecs[2].carrier == std::vector<vertex_t>{7, 8, 9, 10, 11});
    REQUIRE(oldrecs[0].intervals.size() == 2);
    CHECK(oldrecs[0].intervals[0] == ConciseRecord::Interval{0, 5, 3});
    CHECK(oldrecs[0].intervals[1] == ConciseRecord::Interval{2, 9, 3});
    REQUIRE(oldrecs[2].intervals.size() == 1);
    CHECK(oldrecs[2].intervals[0] == ConciseRecord::Interval{7, 11, 3});

    // Old and optimal raw representations coincide byte for byte.
    std::ostringstream oldraw;
    serialize_raw(raw_pipeline(c.g), c.g, oldraw);
    CHECK(oldraw.str() == raw.str());
}

TEST_CASE("worked heuristic example: 4 intervals drop from 22 to 19 tokens") {
    // Carrier a..j (0..9); safe paths a-c, b-e, e-g, f-j.
    ConciseRecord rec;
    rec.carrier = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    rec.intervals = {{0, 2, 11}, {1, 4, 12}, {4, 6, 13}, {5, 9, 14}};
    FlowGraph chain = [] {
        std::vector<Edge> es;
        for (vertex_t v = 0; v + 1 < 10; ++v) es.push_back({v, static_cast<vertex_t>(v + 1), 1});
        return FlowGraph(10, es, "chain");
    }();
    std::ostringstream plain, heur;
    CHECK(serialize_concise({rec}, chain, plain).tokens == 22);
    CHECK(serialize_concise_heuristic({rec}, chain, heur).tokens == 19);
    std::istringstream in(heur.str());
    auto back = parse_concise_heuristic(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == rec);
}

TEST_CASE("token report equals a re-tokenization of the emitted text") {
    for (const auto& gen : safeflow::testing::small_fuzz_batch(40, 2468)) {
        Ctx c(gen.graph);
        auto paths = opt_raw_enumerate(c.g, c.idx);
        auto crecs = opt_concise(c.g, c.idx);
        auto orecs = opt_rep_enumerate(c.g, c.idx, c.fi, c.fo);
        std::ostringstream s1, s2, s3, s4, s5;
        CHECK(serialize_raw(paths, c.g, s1).tokens == count_tokens(s1.str()));
        CHECK(serialize_concise(crecs, c.g, s2).tokens == count_tokens(s2.str()));
        CHECK(serialize_concise_heuristic(crecs, c.g, s3).tokens == count_tokens(s3.str()));
        CHECK(serialize_optimal(orecs, c.g, s4).tokens == count_tokens(s4.str()));
        CHECK(serialize_optimal_heuristic(orecs, c.g, c.fi, c.fo, s5).tokens ==
              count_tokens(s5.str()));
        std::ostringstream again;
        CHECK(static_cast<std::uint64_t>(s1.str().size()) ==
              serialize_raw(paths, c.g, again).bytes);
    }
}

TEST_CASE("heuristic dominance and lossless round trips") {
    for (const auto& gen : safeflow::testing::small_fuzz_batch(120, 13579)) {
        Ctx c(gen.graph);
        auto crecs = opt_concise(c.g, c.idx);
        auto orecs = opt_rep_enumerate(c.g, c.idx, c.fi, c.fo);

        std::ostringstream con, conh, opt, opth;
        auto rc = serialize_concise(crecs, c.g, con);
        auto rch = serialize_concise_heuristic(crecs, c.g, conh);
        auto ro = serialize_optimal(orecs, c.g, opt);
        auto roh = serialize_optimal_heuristic(orecs, c.g, c.fi, c.fo, opth);
        CHECK(rch.tokens <= rc.tokens);
        CHECK(roh.tokens <= ro.tokens);

        std::istringstream icon(con.str()), iconh(conh.str()), iopt(opt.str()), iopth(opth.str());
        CHECK(sorted_crecs(parse_concise(icon)) == sorted_crecs(crecs));
        CHECK(sorted_crecs(parse_concise_heuristic(iconh)) == sorted_crecs(crecs));
        CHECK(sorted_recs(parse_optimal(iopt)) == sorted_recs(orecs));
        CHECK(sorted_recs(parse_optimal_heuristic(iopth, c.g, c.fi, c.fo)) == sorted_recs(orecs));
    }
}

TEST_CASE("raw round trip") {
    Ctx c(fig2());
    auto paths = opt_raw_enumerate(c.g, c.idx);
    std::ostringstream out;
    serialize_raw(paths, c.g, out);
    std::istringstream in(out.str());
    auto back = parse_raw(in);
    std::sort(back.begin(), back.end());
    std::sort(paths.begin(), paths.end());
    CHECK(back == paths);
}

TEST_CASE("trivial serializer shapes") {
    FlowGraph chain(4, {{0, 1, 2}, {1, 2, 2}, {2, 3, 2}}, "c4");
    std::ostringstream r0, r1, c1, ch1;
    CHECK(serialize_raw({}, chain, r0).tokens == 0);
    CHECK(serialize_raw({{{0, 1}, 2}}, chain, r1).tokens == 3);

    ConciseRecord rec{{0, 1, 2, 3}, {{0, 3, 2}}};
    CHECK(serialize_concise({rec}, chain, c1).tokens == 4 + 3);
    CHECK(serialize_concise_heuristic({rec}, chain, ch1).tokens == 4 + 1);
    std::istringstream back(ch1.str());
    auto recs = parse_concise_heuristic(back);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0] == rec);
    std::istringstream bad("0 1 2\n0 2\n");
    CHECK_THROWS_AS(parse_concise(bad), parse_error);
}

TEST_CASE("interval endpoints must lie on the carrier") {
    Ctx c(fig2());
    ConciseRecord bad{{0, 1, 2}, {{0, 9, 1}}};
    std::ostringstream out;
    CHECK_THROWS_AS(serialize_concise({bad}, c.g, out), validation_error);
}

TEST_CASE("empty outputs serialize to empty text") {
    Ctx c(fig2());
    std::ostringstream a, b, d;
    CHECK(serialize_concise({}, c.g, a).tokens == 0);
    CHECK(serialize_optimal({}, c.g, b).tokens == 0);
    CHECK(serialize_optimal_heuristic({}, c.g, c.fi, c.fo, d).tokens == 0);
    CHECK(a.str().empty());
}

TEST_CASE("dataset statistics on fig2") {
    std::vector<FlowGraph> graphs{fig2()};
    DatasetStats s = dataset_statistics(graphs, false, "fig2");
    CHECK(s.graphs == 1);
    CHECK(s.avg_nodes == doctest::Approx(12));
    CHECK(s.avg_edges == doctest::Approx(14));
    CHECK(s.avg_complexity == doctest::Approx(2));  // max-residual tracing uses 2 paths
    CHECK(s.avg_safe_len == doctest::Approx(7.2));  // (6+7+9+9+5)/5 vertices
    CHECK(s.pct_single == doctest::Approx(0.0));
    CHECK(s.avg_indices == doctest::Approx(2.5));
    CHECK(s.avg_carrier_len == doctest::Approx(10.5));
    CHECK(s.pct_start_end == doctest::Approx(80.0));
    CHECK(s.pct_successive == doctest::Approx(0.0));
    CHECK(s.pct_nontrivial == doctest::Approx(60.0));  // 3 of 5 records
    CHECK(s.avg_indices_opt == doctest::Approx(1.0));

    DatasetStats skip = dataset_statistics({FlowGraph(3, {{0, 1, 5}, {1, 2, 5}}, "f")}, true, "f");
    CHECK(skip.graphs == 0);
}

TEST_CASE("stats of a funnel-path dataset") {
    FlowGraph path(4, {{0, 1, 5}, {1, 2, 5}, {2, 3, 5}}, "p");
    DatasetStats s = dataset_statistics({path}, false, "path");
    CHECK(s.pct_single == doctest::Approx(100.0));
    CHECK(s.avg_indices == doctest::Approx(1.0));
    CHECK(s.funnel_probability == doctest::Approx(1.0));
}

TEST_CASE("stats csv row shape") {
    DatasetStats s;
    s.dataset = "x";
    std::ostringstream out;
    stats_csv_row(s, out);
    std::string header(kStatsCsvHeader);
    CHECK(std::count(header.begin(), header.end(), ',') ==
          std::count(out.str().begin(), out.str().end(), ','));
}

TEST_CASE("representation size ordering holds on a mid-size improved graph") {
    GenParams p;
    p.n = 20000;
    p.k = 40;
    p.d = 400;
    p.seed = 99;
    Generated gen = gen_improved(p);
    Ctx c(gen.graph);
    std::ostringstream raw, con, conh, opt, opth;
    auto tr = serialize_raw(opt_raw_enumerate(c.g, c.idx), c.g, raw).tokens;
    auto crecs = opt_concise(c.g, c.idx);
    auto tc = serialize_concise(crecs, c.g, con).tokens;
    auto tch = serialize_concise_heuristic(crecs, c.g, conh).tokens;
    auto orecs = opt_rep_enumerate(c.g, c.idx, c.fi, c.fo);
    auto to = serialize_optimal(orecs, c.g, opt).tokens;
    auto toh = serialize_optimal_heuristic(orecs, c.g, c.fi, c.fo, opth).tokens;
    CHECK(toh <= to);
    CHECK(to < tch);
    CHECK(tch <= tc);
    CHECK(tc < tr);
}

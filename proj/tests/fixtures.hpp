#pragma once

#include <vector>

#include "safeflow/flow_graph.hpp"
#include "safeflow/randgen.hpp"

namespace safeflow::testing {

// The running example graph. Letter labels map to ids as a..l -> 0..11:
//   a=0 b=1 c=2 d=3 e=4 f=5 g=6 h=7 i=8 j=9 k=10 l=11
// Its five maximal safe paths all have excess flow 3:
//   (a b c d e f), (c d e f h i j), (a c d e f g h i j),
//   (c d e f g h i j l), (h i j k l)
inline FlowGraph fig2() {
    return FlowGraph(12,
                     {
                         {0, 1, 3},   // a->b
                         {0, 2, 6},   // a->c
                         {1, 2, 3},   // b->c
                         {2, 3, 9},   // c->d
                         {3, 4, 9},   // d->e
                         {4, 5, 9},   // e->f
                         {5, 6, 6},   // f->g
                         {5, 7, 3},   // f->h
                         {6, 7, 6},   // g->h
                         {7, 8, 9},   // h->i
                         {8, 9, 9},   // i->j
                         {9, 10, 3},  // j->k
                         {9, 11, 6},  // j->l
                         {10, 11, 3}  // k->l
                     },
                     "fig2");
}

inline std::vector<WeightedSafePath> fig2_safe_paths() {
    return {
        {{0, 1, 2, 3, 4, 5}, 3},           {{2, 3, 4, 5, 7, 8, 9}, 3},
        {{0, 2, 3, 4, 5, 6, 7, 8, 9}, 3},  {{2, 3, 4, 5, 6, 7, 8, 9, 11}, 3},
        {{7, 8, 9, 10, 11}, 3},
    };
}

// s->a:5, x->a:2, a->t:7 with s=0, x=1, a=2, t=3.
inline FlowGraph y_graph() {
    return FlowGraph(4, {{0, 2, 5}, {1, 2, 2}, {2, 3, 7}}, "y");
}

// A small pseudo-random batch mixing the three generator families.
inline std::vector<Generated> small_fuzz_batch(std::size_t count, std::uint64_t seed,
                                               flow_t flow_max = 1000) {
    std::vector<Generated> out;
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        GenParams p;
        p.n = static_cast<vertex_t>(rng.range(4, 64));
        p.d = static_cast<std::int32_t>(rng.range(2, std::min<std::int64_t>(p.n, 16)));
        p.k = static_cast<std::int32_t>(rng.range(1, 8));
        p.flow_min = 1;
        p.flow_max = flow_max;
        p.seed = rng.next();
        switch (i % 3) {
            case 0: out.push_back(gen_uniform(p)); break;
            case 1: out.push_back(gen_power_law(p)); break;
            default:
                p.p = rng.unit();
                out.push_back(gen_improved(p));
                break;
        }
    }
    return out;
}

}  // namespace safeflow::testing

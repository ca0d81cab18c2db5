#pragma once

#include <cstdint>
#include <vector>

#include "safeflow/flow_graph.hpp"
#include "safeflow/safety.hpp"

namespace safeflow {

// Parameters of the three random flow-graph families. Vertex ids are
// 0-based and equal the topological order; vertex 0 is the path source and
// n-1 the sink. Every generated path has d vertices.
struct GenParams {
    vertex_t n = 100;
    std::int32_t k = 10;       // paths in the true decomposition
    std::int32_t d = 10;       // vertices per path
    double p = 0.81;           // funnel probability (improved model only)
    std::uint64_t seed = 1;
    flow_t flow_min = 1;
    flow_t flow_max = 1000;
};

// Generated graph plus its generation ledger: the routed paths with their
// flow values form a valid flow decomposition of the graph by construction.
struct Generated {
    FlowGraph graph;
    std::vector<WeightedPath> ledger;
};

// SplitMix64; the per-path substream i of seed s starts at
// mix(s + i * 0x9E3779B97F4A7C15). Portable and byte-stable across platforms.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // Uniform integer in [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        std::uint64_t limit = ~0ull - ~0ull % bound;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }
    std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

Generated gen_uniform(const GenParams& params);
Generated gen_power_law(const GenParams& params);
Generated gen_improved(const GenParams& params);

}  // namespace safeflow

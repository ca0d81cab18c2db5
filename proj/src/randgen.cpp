#include "safeflow/randgen.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace safeflow {

namespace {

constexpr std::uint64_t kStreamStep = 0x9E3779B97F4A7C15ull;

void check_params(const GenParams& p) {
    if (p.d < 2 || p.n < p.d) throw validation_error("generator requires n >= d >= 2");
    if (p.k < 1) throw validation_error("generator requires k >= 1");
    if (p.flow_min < 1 || p.flow_max < p.flow_min)
        throw validation_error("generator requires 1 <= flow_min <= flow_max");
    if (p.p < 0.0 || p.p > 1.0) throw validation_error("generator requires 0 <= p <= 1");
}

// d-2 distinct internal vertices of [1, n-2], ascending (Floyd's sampling).
std::vector<vertex_t> sample_internal(SplitMix64& rng, vertex_t n, std::int32_t d) {
    std::int64_t need = d - 2;
    std::unordered_set<std::int64_t> chosen;
    std::vector<vertex_t> out;
    std::int64_t hi = n - 2;
    for (std::int64_t j = hi - need + 1; j <= hi; ++j) {
        std::int64_t t = rng.range(1, j);
        if (chosen.insert(t).second) {
            out.push_back(static_cast<vertex_t>(t));
        } else {
            chosen.insert(j);
            out.push_back(static_cast<vertex_t>(j));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Generated assemble(const GenParams& params, std::vector<WeightedPath> ledger,
                   const char* model) {
    std::map<std::pair<vertex_t, vertex_t>, flow_t> acc;
    for (const auto& p : ledger)
        for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i)
            acc[{p.vertices[i], p.vertices[i + 1]}] += p.weight;
    std::vector<Edge> edges;
    edges.reserve(acc.size());
    for (const auto& [uv, f] : acc) edges.push_back({uv.first, uv.second, f});
    std::string name = std::string(model) + " n=" + std::to_string(params.n) +
                       " k=" + std::to_string(params.k) + " d=" + std::to_string(params.d) +
                       " seed=" + std::to_string(params.seed);
    return {FlowGraph(params.n, std::move(edges), name), std::move(ledger)};
}

}  // namespace

Generated gen_uniform(const GenParams& params) {
    check_params(params);
    std::vector<WeightedPath> ledger;
    for (std::int32_t i = 0; i < params.k; ++i) {
        SplitMix64 rng(params.seed + static_cast<std::uint64_t>(i + 1) * kStreamStep);
        std::vector<vertex_t> path{0};
        for (vertex_t v : sample_internal(rng, params.n, params.d)) path.push_back(v);
        path.push_back(params.n - 1);
        ledger.push_back({std::move(path), rng.range(params.flow_min, params.flow_max)});
    }
    return assemble(params, std::move(ledger), "uniform");
}

Generated gen_power_law(const GenParams& params) {
    check_params(params);
    vertex_t n = params.n;
    // Fenwick tree over per-vertex sampling weights (total degree + 1)^3 of
    // the internal vertices [1, n-2]; the degree state updates after every
    // completed path. Sampling within one path is without replacement.
    std::vector<std::int64_t> deg(n, 0);
    std::vector<std::int64_t> fen(n + 1, 0);
    auto fen_add = [&](vertex_t i, std::int64_t delta) {
        for (std::int64_t x = i + 1; x <= n; x += x & -x) fen[x] += delta;
    };
    auto fen_total = [&]() {
        std::int64_t s = 0;
        for (std::int64_t x = n; x > 0; x -= x & -x) s += fen[x];
        return s;
    };
    auto weight = [&](vertex_t v) {
        std::int64_t w = deg[v] + 1;
        return w * w * w;
    };
    for (vertex_t v = 1; v + 1 < n; ++v) fen_add(v, weight(v));

    std::vector<WeightedPath> ledger;
    for (std::int32_t i = 0; i < params.k; ++i) {
        SplitMix64 rng(params.seed + static_cast<std::uint64_t>(i + 1) * kStreamStep);
        std::vector<vertex_t> internal;
        for (std::int32_t j = 0; j < params.d - 2; ++j) {
            std::int64_t target =
                static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(fen_total())));
            // Smallest v with prefix_sum(v) > target.
            std::int64_t pos = 0, acc = 0, bit = 1;
            while (bit * 2 <= n) bit *= 2;
            for (; bit > 0; bit /= 2)
                if (pos + bit <= n && acc + fen[pos + bit] <= target) {
                    pos += bit;
                    acc += fen[pos];
                }
            vertex_t v = static_cast<vertex_t>(pos);
            internal.push_back(v);
            fen_add(v, -weight(v));
        }
        for (vertex_t v : internal) fen_add(v, weight(v));
        std::sort(internal.begin(), internal.end());

        std::vector<vertex_t> path{0};
        for (vertex_t v : internal) path.push_back(v);
        path.push_back(n - 1);
        for (vertex_t v : internal) fen_add(v, -weight(v));
        for (std::size_t j = 0; j + 1 < path.size(); ++j) {
            deg[path[j]] += 1;
            deg[path[j + 1]] += 1;
        }
        for (vertex_t v : internal) fen_add(v, weight(v));
        ledger.push_back({std::move(path), rng.range(params.flow_min, params.flow_max)});
    }
    return assemble(params, std::move(ledger), "power_law");
}

Generated gen_improved(const GenParams& params) {
    check_params(params);
    vertex_t n = params.n;
    std::vector<WeightedPath> ledger;
    // Complete backbone path over all vertices in topological order with a
    // unit base flow, so that every backbone edge carries positive flow.
    {
        std::vector<vertex_t> spine(n);
        for (vertex_t v = 0; v < n; ++v) spine[v] = v;
        ledger.push_back({std::move(spine), 1});
    }
    double p2 = params.p * params.p;
    for (std::int32_t i = 0; i < params.k; ++i) {
        SplitMix64 rng(params.seed + static_cast<std::uint64_t>(i + 1) * kStreamStep);
        std::vector<vertex_t> stops{0};
        for (vertex_t v : sample_internal(rng, n, params.d)) stops.push_back(v);
        stops.push_back(n - 1);
        // Consecutive stops are joined by the backbone segment with
        // probability p^2 (both ends funnel-like), else by a direct edge.
        std::vector<vertex_t> routed{0};
        for (std::size_t j = 0; j + 1 < stops.size(); ++j) {
            vertex_t a = stops[j], b = stops[j + 1];
            if (b == a + 1 || rng.unit() < p2) {
                for (vertex_t v = a + 1; v <= b; ++v) routed.push_back(v);
            } else {
                routed.push_back(b);
            }
        }
        ledger.push_back({std::move(routed), rng.range(params.flow_min, params.flow_max)});
    }
    return assemble(params, std::move(ledger), "improved");
}

}  // namespace safeflow

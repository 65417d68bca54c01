#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ccs/graph.hpp"

namespace ccs {

struct SamplingParams {
    std::uint32_t dp = 3;   // intended BFS depth, >= 1
    std::uint32_t l = 300;  // minimum vertex count, 1 <= l <= h
    std::uint32_t h = 5000; // hard vertex cap
};

/// Query-local search space: the induced subgraph on the sampled vertex
/// set, the mapping back to parent ids, and the BFS depth (admission level)
/// of each sampled vertex.
struct SampledSubgraph {
    Graph graph;
    std::vector<VertexId> to_parent;  // sorted ascending
    DepthMap depths;                  // indexed by local id
    VertexId query_local = 0;

    std::optional<VertexId> local_id(VertexId parent) const {
        auto it = std::lower_bound(to_parent.begin(), to_parent.end(), parent);
        if (it == to_parent.end() || *it != parent) return std::nullopt;
        return static_cast<VertexId>(it - to_parent.begin());
    }
};

/// Level-by-level BFS extraction around q. Whole levels are admitted while
/// depth ≤ dp; if fewer than l vertices have been admitted when depth dp is
/// exhausted, further whole levels are taken until the count reaches l or
/// the component runs out. Admission stops immediately at h vertices, and
/// within a level candidates are admitted in ascending parent id. The edge
/// set is the full induced subgraph on the admitted vertices.
inline SampledSubgraph sample_subgraph(const Graph& g, VertexId q,
                                       const SamplingParams& p) {
    if (q >= g.vertex_count()) throw std::invalid_argument("query vertex out of range");
    if (p.dp < 1) throw std::invalid_argument("dp must be at least 1");
    if (p.l < 1 || p.l > p.h) throw std::invalid_argument("need 1 <= l <= h");

    std::vector<std::uint32_t> depth(g.vertex_count(), DepthMap::kUnreachable);
    std::vector<VertexId> admitted{q};
    depth[q] = 0;

    std::vector<VertexId> level{q};
    std::vector<VertexId> candidates;
    std::uint32_t current_depth = 0;
    while (!level.empty() && admitted.size() < p.h) {
        candidates.clear();
        for (VertexId u : level) {
            for (VertexId w : g.neighbors(u)) {
                if (depth[w] != DepthMap::kUnreachable) continue;
                depth[w] = current_depth + 1;  // provisional; cleared if not admitted
                candidates.push_back(w);
            }
        }
        std::sort(candidates.begin(), candidates.end());
        std::vector<VertexId> next_level;
        for (VertexId v : candidates) {
            if (admitted.size() >= p.h) {
                depth[v] = DepthMap::kUnreachable;  // cap reached: not admitted
                continue;
            }
            admitted.push_back(v);
            next_level.push_back(v);
        }
        ++current_depth;
        level = std::move(next_level);
        if (current_depth >= p.dp && admitted.size() >= p.l) break;
    }

    std::sort(admitted.begin(), admitted.end());
    InducedSubgraph ind = induced_subgraph(g, admitted);

    SampledSubgraph out;
    out.graph = std::move(ind.graph);
    out.to_parent = std::move(ind.to_parent);
    out.depths.depth.resize(out.to_parent.size());
    for (std::size_t i = 0; i < out.to_parent.size(); ++i)
        out.depths.depth[i] = depth[out.to_parent[i]];
    out.query_local = *out.local_id(q);
    return out;
}

}  // namespace ccs

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ccs/graph.hpp"
#include "ccs/metrics.hpp"

namespace ccs {

struct PprParams {
    double alpha = 0.15;  // jump probability, in (0, 1)
    double r_max = 0.0;   // push threshold; 0 means auto = 1/n
};

/// Forward-push output. The vectors are dense (indexed by vertex id);
/// `touched` lists every vertex that ever held estimate or residual mass,
/// i.e. the sparse support of the computation.
struct PprState {
    std::vector<double> pi_hat;
    std::vector<double> residual;
    std::vector<VertexId> touched;
};

namespace detail {

inline double resolve_r_max(const Graph& g, const PprParams& p) {
    if (p.alpha <= 0.0 || p.alpha >= 1.0)
        throw std::invalid_argument("alpha must lie in (0, 1)");
    if (p.r_max < 0.0) throw std::invalid_argument("r_max must be positive");
    if (p.r_max > 0.0) return p.r_max;
    return 1.0 / static_cast<double>(g.vertex_count());
}

/// Union-find with path halving; used for incremental prefix connectivity.
struct UnionFind {
    std::vector<VertexId> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<VertexId>(i);
    }
    VertexId find(VertexId x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    // returns true when two components were merged
    bool unite(VertexId a, VertexId b) {
        VertexId ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent[ra] = rb;
        return true;
    }
};

}  // namespace detail

/// Forward push from q: repeatedly moves residual mass into the estimate
/// (α · r(t) stays at t, the rest spreads over neighbors) until every
/// residual satisfies r(v) < r_max · d(v). FIFO processing order; each
/// vertex is queued at most once while above threshold. Mass conservation
/// Σπ̂ + Σr = 1 holds throughout.
inline PprState forward_push(const Graph& g, VertexId q, const PprParams& p) {
    if (q >= g.vertex_count()) throw std::invalid_argument("query vertex out of range");
    if (g.degree(q) == 0)
        throw std::invalid_argument("query vertex is isolated; push is undefined");
    const double r_max = detail::resolve_r_max(g, p);

    PprState st;
    st.pi_hat.assign(g.vertex_count(), 0.0);
    st.residual.assign(g.vertex_count(), 0.0);
    std::vector<std::uint8_t> touched_flag(g.vertex_count(), 0);
    std::vector<std::uint8_t> in_queue(g.vertex_count(), 0);
    auto touch = [&](VertexId v) {
        if (!touched_flag[v]) {
            touched_flag[v] = 1;
            st.touched.push_back(v);
        }
    };

    st.residual[q] = 1.0;
    touch(q);
    std::vector<VertexId> queue;
    if (st.residual[q] >= r_max * g.degree(q)) {
        queue.push_back(q);
        in_queue[q] = 1;
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        VertexId t = queue[head];
        in_queue[t] = 0;
        double rt = st.residual[t];
        if (rt < r_max * g.degree(t)) continue;  // fell below while waiting
        double share = (1.0 - p.alpha) * rt / static_cast<double>(g.degree(t));
        for (VertexId u : g.neighbors(t)) {
            st.residual[u] += share;
            touch(u);
            if (!in_queue[u] && st.residual[u] >= r_max * g.degree(u)) {
                queue.push_back(u);
                in_queue[u] = 1;
            }
        }
        st.pi_hat[t] += p.alpha * rt;
        st.residual[t] = 0.0;
        // t itself may need another pass once neighbors push mass back;
        // the threshold test on re-entry handles that.
    }
    return st;
}

/// PPR-based community search: rank vertices by y(v) = π̂(v)/d(v) with the
/// query pinned to the front (its score is treated as +∞), then sweep all
/// prefixes of the ranking and return the connected, non-degenerate prefix
/// with minimum whole-graph conductance. Falls back to {q} when no prefix
/// qualifies.
inline Community pprcs_search(const Graph& g, VertexId q, const PprParams& p) {
    PprState st = forward_push(g, q, p);

    std::vector<VertexId> order;
    order.reserve(st.touched.size());
    for (VertexId v : st.touched)
        if (v != q && st.pi_hat[v] > 0.0) order.push_back(v);
    std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
        double ya = st.pi_hat[a] / static_cast<double>(g.degree(a));
        double yb = st.pi_hat[b] / static_cast<double>(g.degree(b));
        if (ya != yb) return ya > yb;
        return a < b;
    });
    order.insert(order.begin(), q);

    detail::UnionFind uf(g.vertex_count());
    std::vector<std::uint8_t> in_prefix(g.vertex_count(), 0);
    std::uint64_t cut = 0, vol = 0;
    std::size_t components = 0;
    // best prefix tracked as the exact fraction cut / min_vol; strict
    // improvement only, so the first (smallest) optimal prefix wins
    std::uint64_t best_cut = 0, best_min_vol = 0;
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        VertexId u = order[i];
        in_prefix[u] = 1;
        ++components;
        vol += g.degree(u);
        std::uint64_t internal = 0;
        for (VertexId w : g.neighbors(u)) {
            if (!in_prefix[w]) continue;
            ++internal;
            if (uf.unite(u, w)) --components;
        }
        cut += g.degree(u) - 2 * internal;
        if (components != 1) continue;          // prefix not connected
        if (vol >= g.volume()) continue;        // degenerate cut, skip
        std::uint64_t min_vol = std::min(vol, g.volume() - vol);
        if (best_len == 0 ||
            detail::compare_frac(cut, min_vol, best_cut, best_min_vol) < 0) {
            best_cut = cut;
            best_min_vol = min_vol;
            best_len = i + 1;
        }
    }

    std::vector<VertexId> members;
    if (best_len == 0) {
        members.push_back(q);  // no valid connected prefix at all
    } else {
        members.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_len));
    }
    return Community(g, std::move(members), q);
}

}  // namespace ccs

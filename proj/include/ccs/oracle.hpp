#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ccs/graph.hpp"
#include "ccs/metrics.hpp"

namespace ccs {

struct OracleResult {
    std::vector<VertexId> best_set;
    double best_conductance = 0.0;
    std::uint64_t best_cut = 0;
    std::uint64_t best_min_volume = 0;
    std::uint64_t optima_count = 0;  // connected candidates attaining the optimum
};

namespace detail {

inline bool mask_connected(const std::vector<std::uint32_t>& adj_mask,
                           std::uint32_t mask, VertexId q) {
    std::uint32_t seen = 1u << q;
    std::uint32_t frontier = seen;
    while (frontier != 0) {
        std::uint32_t next = 0;
        std::uint32_t f = frontier;
        while (f != 0) {
            int v = std::countr_zero(f);
            f &= f - 1;
            next |= adj_mask[static_cast<std::size_t>(v)] & mask;
        }
        frontier = next & ~seen;
        seen |= next;
    }
    return seen == mask;
}

/// For equal popcounts, the sorted member list of `a` precedes that of `b`
/// exactly when `a` owns the lowest differing bit.
inline bool mask_lex_less(std::uint32_t a, std::uint32_t b) {
    std::uint32_t diff = a ^ b;
    if (diff == 0) return false;
    return (a >> std::countr_zero(diff)) & 1u;
}

}  // namespace detail

/// Exhaustive conductance-minimizing connected subset containing q, over
/// proper subsets with a positive minimum volume. Graphs above 20 vertices
/// are rejected. Ties resolve toward fewer vertices, then the
/// lexicographically smallest member list.
inline OracleResult brute_force_ccs(const Graph& g, VertexId q) {
    const std::size_t n = g.vertex_count();
    if (q >= n) throw std::invalid_argument("query vertex out of range");
    if (n > 20) throw std::invalid_argument("graph too large for exhaustive search");

    std::vector<std::uint32_t> adj_mask(n, 0);
    for (VertexId u = 0; u < n; ++u)
        for (VertexId w : g.neighbors(u)) adj_mask[u] |= 1u << w;

    const std::uint64_t two_m = 2 * g.edge_count();
    const std::uint32_t q_bit = 1u << q;
    const std::uint32_t low_mask = q_bit - 1;

    OracleResult best;
    bool have = false;

    const std::uint32_t rest_count =
        n >= 1 ? (1u << (n - 1)) : 0;  // masks over the other n-1 vertices
    for (std::uint32_t rest = 0; rest < rest_count; ++rest) {
        std::uint32_t mask =
            ((rest & ~low_mask) << 1) | q_bit | (rest & low_mask);
        if (std::popcount(mask) == static_cast<int>(n)) continue;  // S = V

        std::uint64_t vol = 0;
        std::uint64_t cut = 0;
        std::uint32_t bits = mask;
        while (bits != 0) {
            int v = std::countr_zero(bits);
            bits &= bits - 1;
            vol += g.degree(static_cast<VertexId>(v));
            cut += static_cast<std::uint64_t>(
                std::popcount(adj_mask[static_cast<std::size_t>(v)] & ~mask));
        }
        std::uint64_t min_vol = std::min(vol, two_m - vol);
        if (min_vol == 0) continue;
        if (!detail::mask_connected(adj_mask, mask, q)) continue;

        if (have) {
            int cmp = detail::compare_frac(cut, min_vol, best.best_cut,
                                           best.best_min_volume);
            if (cmp > 0) continue;
            if (cmp == 0) {
                ++best.optima_count;
                int sz = std::popcount(mask);
                int best_sz = static_cast<int>(best.best_set.size());
                if (sz > best_sz) continue;
                if (sz == best_sz) {
                    std::uint32_t best_mask = 0;
                    for (VertexId v : best.best_set) best_mask |= 1u << v;
                    if (!detail::mask_lex_less(mask, best_mask)) continue;
                }
            } else {
                best.optima_count = 1;
            }
        } else {
            have = true;
            best.optima_count = 1;
        }

        best.best_cut = cut;
        best.best_min_volume = min_vol;
        best.best_set.clear();
        std::uint32_t bits2 = mask;
        while (bits2 != 0) {
            int v = std::countr_zero(bits2);
            bits2 &= bits2 - 1;
            best.best_set.push_back(static_cast<VertexId>(v));
        }
    }

    if (!have) throw std::runtime_error("no valid candidate subset exists");
    best.best_conductance =
        static_cast<double>(best.best_cut) / static_cast<double>(best.best_min_volume);
    return best;
}

}  // namespace ccs

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ccs/graph.hpp"

namespace ccs {

namespace detail {

/// Compares a/b against c/d exactly (non-negative numerators, positive
/// denominators). Returns -1, 0, or +1. All counters here fit easily in
/// 64 bits, so the 128-bit cross product cannot overflow.
inline int compare_frac(std::uint64_t a, std::uint64_t b,
                        std::uint64_t c, std::uint64_t d) {
    using u128 = unsigned __int128;
    u128 lhs = static_cast<u128>(a) * d;
    u128 rhs = static_cast<u128>(c) * b;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

}  // namespace detail

/// Link counts between a community S and a candidate batch, feeding the
/// incremental quality updates:
///   d_in_cross = 2 * (links(S, batch) + links(batch, batch))
///   e_out_s    = links(S, batch)
///   e_out_sbar = links(batch, V \ (S ∪ batch))
/// For removal batches the counts are taken with S replaced by S \ batch,
/// i.e. e_out_s = links(S \ batch, batch) and e_out_sbar = links(V \ S, batch).
struct BatchStats {
    std::uint64_t d_in_cross = 0;
    std::uint64_t e_out_s = 0;
    std::uint64_t e_out_sbar = 0;
};

/// A candidate community S over a host graph, with cached counters
/// d_in = 2 * |E(S,S)| and e_out = |E(S, S̄)|. The anchor (query vertex)
/// is a permanent member. Mutation happens only through apply_add /
/// apply_remove with stats produced for the matching batch, which keeps the
/// caches equal to a from-scratch recount at all times.
class Community {
public:
    Community() = default;

    Community(const Graph& g, std::vector<VertexId> members, VertexId anchor)
        : members_(std::move(members)), anchor_(anchor) {
        if (members_.empty()) throw std::invalid_argument("community must be nonempty");
        std::sort(members_.begin(), members_.end());
        if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
            throw std::invalid_argument("duplicate community member");
        if (members_.back() >= g.vertex_count())
            throw std::invalid_argument("community member out of range");
        in_members_.assign(g.vertex_count(), 0);
        for (VertexId v : members_) in_members_[v] = 1;
        if (!in_members_[anchor_])
            throw std::invalid_argument("anchor must be a community member");
        for (VertexId v : members_) {
            for (VertexId w : g.neighbors(v)) {
                if (in_members_[w]) ++d_in_;
                else ++e_out_;
            }
        }
    }

    const std::vector<VertexId>& members() const { return members_; }  // ascending
    std::size_t size() const { return members_.size(); }
    VertexId anchor() const { return anchor_; }

    bool contains(VertexId v) const {
        return v < in_members_.size() && in_members_[v] != 0;
    }

    std::uint64_t d_in() const { return d_in_; }
    std::uint64_t e_out() const { return e_out_; }
    /// vol(S) = d_in + e_out.
    std::uint64_t volume() const { return d_in_ + e_out_; }

    /// Commits an addition batch. `b` must come from batch_stats_add on the
    /// same (graph, community, batch).
    void apply_add(std::span<const VertexId> batch, const BatchStats& b) {
        for (VertexId v : batch) {
            if (v >= in_members_.size()) throw std::invalid_argument("batch vertex out of range");
            if (contains(v)) throw std::invalid_argument("batch overlaps community");
        }
        if (b.e_out_s > e_out_)
            throw std::invalid_argument("batch stats inconsistent with community");
        std::vector<VertexId> sorted_batch(batch.begin(), batch.end());
        std::sort(sorted_batch.begin(), sorted_batch.end());
        if (std::adjacent_find(sorted_batch.begin(), sorted_batch.end()) != sorted_batch.end())
            throw std::invalid_argument("duplicate batch vertex");
        for (VertexId v : batch) in_members_[v] = 1;
        std::vector<VertexId> merged;
        merged.reserve(members_.size() + sorted_batch.size());
        std::merge(members_.begin(), members_.end(), sorted_batch.begin(),
                   sorted_batch.end(), std::back_inserter(merged));
        members_ = std::move(merged);
        d_in_ += b.d_in_cross;
        e_out_ = e_out_ - b.e_out_s + b.e_out_sbar;
    }

    /// Commits a removal batch. `b` must come from batch_stats_remove on the
    /// same (graph, community, batch). The anchor cannot be removed.
    void apply_remove(std::span<const VertexId> batch, const BatchStats& b) {
        for (VertexId v : batch) {
            if (!contains(v)) throw std::invalid_argument("removal batch not inside community");
            if (v == anchor_) throw std::invalid_argument("cannot remove the anchor");
        }
        if (b.d_in_cross > d_in_ || b.e_out_sbar > e_out_)
            throw std::invalid_argument("batch stats inconsistent with community");
        std::vector<VertexId> sorted_batch(batch.begin(), batch.end());
        std::sort(sorted_batch.begin(), sorted_batch.end());
        if (std::adjacent_find(sorted_batch.begin(), sorted_batch.end()) != sorted_batch.end())
            throw std::invalid_argument("duplicate batch vertex");
        for (VertexId v : batch) in_members_[v] = 0;
        std::vector<VertexId> remaining;
        remaining.reserve(members_.size() - sorted_batch.size());
        std::set_difference(members_.begin(), members_.end(), sorted_batch.begin(),
                            sorted_batch.end(), std::back_inserter(remaining));
        members_ = std::move(remaining);
        d_in_ -= b.d_in_cross;
        e_out_ = e_out_ - b.e_out_sbar + b.e_out_s;
    }

private:
    std::vector<VertexId> members_;
    std::vector<std::uint8_t> in_members_;
    VertexId anchor_ = 0;
    std::uint64_t d_in_ = 0;
    std::uint64_t e_out_ = 0;
};

/// Whole-graph conductance φ(S) = |E(S,S̄)| / min(vol(S), 2m − vol(S)).
inline double conductance(const Graph& g, std::span<const VertexId> s) {
    if (s.empty()) throw std::invalid_argument("conductance of empty set");
    std::vector<std::uint8_t> in_set(g.vertex_count(), 0);
    std::vector<VertexId> unique;
    unique.reserve(s.size());
    for (VertexId v : s) {
        if (v >= g.vertex_count()) throw std::invalid_argument("vertex out of range");
        if (!in_set[v]) {
            in_set[v] = 1;
            unique.push_back(v);
        }
    }
    std::uint64_t cut = 0, vol = 0;
    for (VertexId v : unique) {
        vol += g.degree(v);
        for (VertexId w : g.neighbors(v))
            if (!in_set[w]) ++cut;
    }
    std::uint64_t denom = std::min(vol, g.volume() - vol);
    if (denom == 0)
        throw std::invalid_argument("degenerate cut: one side has zero volume");
    return static_cast<double>(cut) / static_cast<double>(denom);
}

/// Sample-local conductance φ_S(S) = e_out / vol(S) (no min with the
/// complement side).
inline double subgraph_conductance(const Community& c) {
    if (c.volume() == 0) throw std::invalid_argument("community has zero volume");
    return static_cast<double>(c.e_out()) / static_cast<double>(c.volume());
}

/// Quality score f(S) = d_in / (d_in + e_out) = 1 − φ_S(S).
inline double quality_score(const Community& c) {
    if (c.volume() == 0) throw std::invalid_argument("community has zero volume");
    return static_cast<double>(c.d_in()) / static_cast<double>(c.volume());
}

/// Link counts for adding `batch` (disjoint from S) to the community.
/// Cost O(sum of batch degrees).
inline BatchStats batch_stats_add(const Graph& g, const Community& c,
                                  std::span<const VertexId> batch) {
    std::vector<std::uint8_t> in_batch(g.vertex_count(), 0);
    for (VertexId v : batch) {
        if (v >= g.vertex_count()) throw std::invalid_argument("batch vertex out of range");
        if (c.contains(v)) throw std::invalid_argument("batch overlaps community");
        if (in_batch[v]) throw std::invalid_argument("duplicate batch vertex");
        in_batch[v] = 1;
    }
    std::uint64_t s_links = 0, aa_ordered = 0, out_links = 0;
    for (VertexId v : batch) {
        for (VertexId w : g.neighbors(v)) {
            if (c.contains(w)) ++s_links;
            else if (in_batch[w]) ++aa_ordered;  // each batch-batch edge counted twice
            else ++out_links;
        }
    }
    return BatchStats{2 * s_links + aa_ordered, s_links, out_links};
}

/// Link counts for removing `batch` (subset of S, anchor excluded), taken
/// with S replaced by S \ batch as the update formulas require.
inline BatchStats batch_stats_remove(const Graph& g, const Community& c,
                                     std::span<const VertexId> batch) {
    std::vector<std::uint8_t> in_batch(g.vertex_count(), 0);
    for (VertexId v : batch) {
        if (!c.contains(v)) throw std::invalid_argument("removal batch not inside community");
        if (v == c.anchor()) throw std::invalid_argument("removal batch contains the anchor");
        if (in_batch[v]) throw std::invalid_argument("duplicate batch vertex");
        in_batch[v] = 1;
    }
    std::uint64_t s_links = 0, bb_ordered = 0, out_links = 0;
    for (VertexId v : batch) {
        for (VertexId w : g.neighbors(v)) {
            if (in_batch[w]) ++bb_ordered;
            else if (c.contains(w)) ++s_links;  // w in S \ batch
            else ++out_links;
        }
    }
    return BatchStats{2 * s_links + bb_ordered, s_links, out_links};
}

namespace detail {

// Stats consistent with an addition batch always satisfy e_out_s ≤ e_out
// (every S→batch link is a cut edge); for a removal batch d_in_cross ≤ d_in
// and e_out_sbar ≤ e_out. Violations mean the stats belong to another
// community, so fail loudly instead of wrapping around unsigned arithmetic.
inline void check_add_stats(const Community& c, const BatchStats& b) {
    if (b.e_out_s > c.e_out())
        throw std::invalid_argument("batch stats inconsistent with community");
}
inline void check_remove_stats(const Community& c, const BatchStats& b) {
    if (b.d_in_cross > c.d_in() || b.e_out_sbar > c.e_out())
        throw std::invalid_argument("batch stats inconsistent with community");
}

inline std::uint64_t after_add_num(const Community& c, const BatchStats& b) {
    return c.d_in() + b.d_in_cross;
}
inline std::uint64_t after_add_den(const Community& c, const BatchStats& b) {
    return c.d_in() + (c.e_out() - b.e_out_s) + b.d_in_cross + b.e_out_sbar;
}
inline std::uint64_t after_remove_num(const Community& c, const BatchStats& b) {
    return c.d_in() - b.d_in_cross;
}
inline std::uint64_t after_remove_den(const Community& c, const BatchStats& b) {
    return (c.d_in() - b.d_in_cross) + (c.e_out() - b.e_out_sbar) + b.e_out_s;
}

inline void require_volume(const Community& c) {
    if (c.volume() == 0) throw std::invalid_argument("community has zero volume");
}

}  // namespace detail

/// f(S ∪ batch) from cached counters in O(1):
///   (d_in + d_in_cross) / (d_in + e_out + d_in_cross + e_out_sbar − e_out_s)
inline double quality_after_add(const Community& c, const BatchStats& b) {
    detail::check_add_stats(c, b);
    std::uint64_t num = detail::after_add_num(c, b);
    std::uint64_t den = detail::after_add_den(c, b);
    if (den == 0) throw std::invalid_argument("degenerate quality denominator");
    return static_cast<double>(num) / static_cast<double>(den);
}

/// f(S \ batch) from cached counters in O(1):
///   (d_in − d_in_cross) / (d_in + e_out − d_in_cross − (e_out_sbar − e_out_s))
inline double quality_after_remove(const Community& c, const BatchStats& b) {
    detail::check_remove_stats(c, b);
    std::uint64_t num = detail::after_remove_num(c, b);
    std::uint64_t den = detail::after_remove_den(c, b);
    if (den == 0) throw std::invalid_argument("degenerate quality denominator");
    return static_cast<double>(num) / static_cast<double>(den);
}

/// Δf = f(S ∪ batch) − f(S), in double precision.
inline double gain_add(const Community& c, const BatchStats& b) {
    detail::require_volume(c);
    return quality_after_add(c, b) - quality_score(c);
}

/// Δf = f(S \ batch) − f(S), in double precision.
inline double gain_remove(const Community& c, const BatchStats& b) {
    detail::require_volume(c);
    return quality_after_remove(c, b) - quality_score(c);
}

/// Exact sign of gain_add (-1, 0, +1) via integer cross-multiplication.
/// The search loops branch on Δf ≥ 0 / Δf > 0; doing the comparison in
/// exact arithmetic removes any floating-point ambiguity near zero.
inline int gain_add_sign(const Community& c, const BatchStats& b) {
    detail::require_volume(c);
    detail::check_add_stats(c, b);
    std::uint64_t den = detail::after_add_den(c, b);
    if (den == 0) throw std::invalid_argument("degenerate quality denominator");
    return detail::compare_frac(detail::after_add_num(c, b), den, c.d_in(), c.volume());
}

/// Exact sign of gain_remove (-1, 0, +1).
inline int gain_remove_sign(const Community& c, const BatchStats& b) {
    detail::require_volume(c);
    detail::check_remove_stats(c, b);
    std::uint64_t den = detail::after_remove_den(c, b);
    if (den == 0) throw std::invalid_argument("degenerate quality denominator");
    return detail::compare_frac(detail::after_remove_num(c, b), den, c.d_in(), c.volume());
}

}  // namespace ccs

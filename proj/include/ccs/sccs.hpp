#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "ccs/graph.hpp"
#include "ccs/metrics.hpp"
#include "ccs/sampler.hpp"

namespace ccs {

struct SccsParams {
    SamplingParams sampling;
    std::uint32_t count = 2;       // max batch size per expansion attempt, >= 1
    std::uint32_t max_rounds = 100;// cap on expansion/verification alternations
};

/// Audit trail of the search: one event per committed expansion batch and
/// per verification removal, carrying the exact cache snapshot afterwards
/// so monotonicity of f = d_in / (d_in + e_out) can be checked in integer
/// arithmetic.
struct TraceEvent {
    enum class Kind { Commit, Removal };
    Kind kind;
    std::uint64_t d_in;
    std::uint64_t e_out;
};

struct SccsTrace {
    std::vector<TraceEvent> events;
    std::uint32_t rounds = 0;
    std::uint32_t sample_vertices = 0;
    std::uint64_t sample_edges = 0;
    std::uint64_t initial_d_in = 0;
    std::uint64_t initial_e_out = 0;
};

namespace detail {

inline std::vector<VertexId> intersect_sorted(std::span<const VertexId> a,
                                              std::span<const VertexId> b) {
    std::vector<VertexId> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(out));
    return out;
}

/// Bron–Kerbosch with pivoting, tracking the best clique seen: larger wins,
/// equal size resolved toward the lexicographically smallest sorted member
/// list. Branches that cannot reach the current best size are pruned, but
/// equal-size branches are kept alive for the lexicographic tie-break.
struct CliqueSearch {
    const Graph& g;
    std::vector<VertexId> current;
    std::vector<VertexId> best;

    explicit CliqueSearch(const Graph& graph) : g(graph) {}

    void consider_current() {
        std::vector<VertexId> cand = current;
        std::sort(cand.begin(), cand.end());
        if (cand.size() > best.size() ||
            (cand.size() == best.size() &&
             std::lexicographical_compare(cand.begin(), cand.end(),
                                          best.begin(), best.end())))
            best = std::move(cand);
    }

    void expand(std::vector<VertexId> p, std::vector<VertexId> x) {
        if (p.empty() && x.empty()) {
            consider_current();
            return;
        }
        if (current.size() + p.size() < best.size()) return;

        // pivot: the vertex of P ∪ X covering the most of P
        VertexId pivot = 0;
        std::size_t pivot_cover = 0;
        bool have_pivot = false;
        auto consider_pivot = [&](VertexId u) {
            std::size_t cover = 0;
            auto nb = g.neighbors(u);
            for (VertexId v : p)
                if (std::binary_search(nb.begin(), nb.end(), v)) ++cover;
            if (!have_pivot || cover > pivot_cover) {
                have_pivot = true;
                pivot = u;
                pivot_cover = cover;
            }
        };
        for (VertexId u : p) consider_pivot(u);
        for (VertexId u : x) consider_pivot(u);

        std::vector<VertexId> branch;
        auto pivot_nb = g.neighbors(pivot);
        for (VertexId v : p)
            if (!std::binary_search(pivot_nb.begin(), pivot_nb.end(), v))
                branch.push_back(v);  // p is sorted, so branch order is ascending

        for (VertexId v : branch) {
            auto nb = g.neighbors(v);
            current.push_back(v);
            expand(intersect_sorted(p, nb), intersect_sorted(x, nb));
            current.pop_back();
            p.erase(std::lower_bound(p.begin(), p.end(), v));
            x.insert(std::lower_bound(x.begin(), x.end(), v), v);
        }
    }
};

}  // namespace detail

/// Maximum-cardinality clique containing q, restricted to {q} ∪ N(q).
/// Ties resolve to the lexicographically smallest member list. An isolated
/// q yields the singleton {q}.
inline std::vector<VertexId> max_clique_containing(const Graph& g, VertexId q) {
    if (q >= g.vertex_count()) throw std::invalid_argument("query vertex out of range");
    detail::CliqueSearch search(g);
    search.current.push_back(q);
    auto nb = g.neighbors(q);
    search.expand(std::vector<VertexId>(nb.begin(), nb.end()), {});
    if (search.best.empty()) search.best.push_back(q);  // isolated query
    return search.best;
}

/// Seed community for the search: the maximum clique containing the query
/// inside the sample. `parent_q` is a parent-graph id; the returned
/// community lives in the sample's local id space.
inline Community initial_community(const SampledSubgraph& sg, VertexId parent_q) {
    auto local = sg.local_id(parent_q);
    if (!local) throw std::invalid_argument("query vertex not present in sample");
    std::vector<VertexId> clique = max_clique_containing(sg.graph, *local);
    return Community(sg.graph, std::move(clique), *local);
}

/// Gain-driven batch expansion. Repeatedly picks, among neighbors of the
/// tentative set S′ = S ∪ A, the vertex maximizing the cumulative quality
/// f(S ∪ A ∪ {v}) relative to the committed S (exact fraction comparison,
/// ties to the smaller id). A batch is committed as soon as its cumulative
/// gain is ≥ 0; otherwise vertices stay tentative until `count` of them
/// accumulate without a commit, at which point the suffix is discarded.
/// Returns whether any batch was committed.
inline bool expansion(const Graph& g, Community& c, std::uint32_t count,
                      SccsTrace* trace = nullptr) {
    if (count < 1) throw std::invalid_argument("count must be at least 1");

    std::vector<VertexId> batch;
    std::vector<std::uint8_t> in_batch(g.vertex_count(), 0);
    BatchStats bs{};

    std::set<VertexId> frontier;
    for (VertexId u : c.members())
        for (VertexId w : g.neighbors(u))
            if (!c.contains(w)) frontier.insert(w);

    bool changed = false;
    while (!frontier.empty() && batch.size() < count) {
        VertexId best_v = 0;
        BatchStats best_bs{};
        std::uint64_t best_num = 0, best_den = 1;
        bool have = false;
        for (VertexId v : frontier) {
            std::uint64_t c_s = 0, c_a = 0;
            for (VertexId w : g.neighbors(v)) {
                if (c.contains(w)) ++c_s;
                else if (in_batch[w]) ++c_a;
            }
            std::uint64_t c_outside = g.degree(v) - c_s - c_a;
            BatchStats nb{bs.d_in_cross + 2 * c_s + 2 * c_a,
                          bs.e_out_s + c_s,
                          bs.e_out_sbar + c_outside - c_a};
            std::uint64_t num = detail::after_add_num(c, nb);
            std::uint64_t den = detail::after_add_den(c, nb);
            if (!have || detail::compare_frac(num, den, best_num, best_den) > 0) {
                have = true;
                best_v = v;
                best_bs = nb;
                best_num = num;
                best_den = den;
            }
        }

        batch.push_back(best_v);
        in_batch[best_v] = 1;
        bs = best_bs;
        frontier.erase(best_v);
        for (VertexId w : g.neighbors(best_v))
            if (!c.contains(w) && !in_batch[w]) frontier.insert(w);

        // commit when the whole tentative batch does not lower f(S)
        if (detail::compare_frac(best_num, best_den, c.d_in(), c.volume()) >= 0) {
            c.apply_add(batch, bs);
            for (VertexId v : batch) in_batch[v] = 0;
            batch.clear();
            bs = BatchStats{};
            changed = true;
            if (trace)
                trace->events.push_back(
                    {TraceEvent::Kind::Commit, c.d_in(), c.e_out()});
        }
    }
    return changed;  // any uncommitted suffix is simply dropped
}

namespace detail {

/// Connectivity of S \ {skip} via BFS from the anchor over members only.
inline bool connected_without(const Graph& g, const Community& c, VertexId skip) {
    std::vector<std::uint8_t> seen(g.vertex_count(), 0);
    std::vector<VertexId> queue{c.anchor()};
    seen[c.anchor()] = 1;
    std::size_t visited = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        VertexId u = queue[head];
        for (VertexId w : g.neighbors(u)) {
            if (seen[w] || !c.contains(w) || w == skip) continue;
            seen[w] = 1;
            ++visited;
            queue.push_back(w);
        }
    }
    return visited == c.size() - 1;
}

}  // namespace detail

/// Boundary pruning. The boundary (members other than the anchor with at
/// least one edge leaving S) is frozen at entry and scanned in ascending
/// id; a vertex is removed when that strictly raises f(S) and S stays
/// connected. Vertices exposed as boundary by earlier removals wait for
/// the next round. Returns whether anything was removed.
inline bool verification(const Graph& g, Community& c, SccsTrace* trace = nullptr) {
    std::vector<VertexId> boundary;
    for (VertexId v : c.members()) {
        if (v == c.anchor()) continue;
        for (VertexId w : g.neighbors(v)) {
            if (!c.contains(w)) {
                boundary.push_back(v);
                break;
            }
        }
    }

    bool changed = false;
    for (VertexId v : boundary) {
        std::uint64_t c_s = 0;
        for (VertexId w : g.neighbors(v))
            if (c.contains(w)) ++c_s;
        BatchStats bs{2 * c_s, c_s, g.degree(v) - c_s};
        std::uint64_t den = detail::after_remove_den(c, bs);
        if (den == 0) continue;  // removal would leave a zero-volume set
        if (detail::compare_frac(detail::after_remove_num(c, bs), den,
                                 c.d_in(), c.volume()) <= 0)
            continue;
        if (!detail::connected_without(g, c, v)) continue;
        VertexId one[1] = {v};
        c.apply_remove(one, bs);
        changed = true;
        if (trace)
            trace->events.push_back({TraceEvent::Kind::Removal, c.d_in(), c.e_out()});
    }
    return changed;
}

/// Full pipeline: sample around q, seed with the maximum clique containing
/// q, then alternate expansion and verification until a fixpoint (or
/// max_rounds). The result is remapped to parent ids with caches rebuilt
/// against the parent graph.
inline Community sccs_search(const Graph& g, VertexId q, const SccsParams& p,
                             SccsTrace* trace = nullptr) {
    if (p.count < 1) throw std::invalid_argument("count must be at least 1");
    if (p.max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");

    SampledSubgraph sg = sample_subgraph(g, q, p.sampling);
    Community local = initial_community(sg, q);
    if (trace) {
        trace->sample_vertices = sg.graph.vertex_count();
        trace->sample_edges = sg.graph.edge_count();
        trace->initial_d_in = local.d_in();
        trace->initial_e_out = local.e_out();
    }

    std::uint32_t round = 0;
    while (round < p.max_rounds) {
        ++round;
        bool grew = expansion(sg.graph, local, p.count, trace);
        bool shrank = verification(sg.graph, local, trace);
        if (!grew && !shrank) break;
    }
    if (trace) trace->rounds = round;

    std::vector<VertexId> parent_members;
    parent_members.reserve(local.size());
    for (VertexId v : local.members()) parent_members.push_back(sg.to_parent[v]);
    return Community(g, std::move(parent_members), q);
}

}  // namespace ccs

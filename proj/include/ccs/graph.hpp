#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ccs {

using VertexId = std::uint32_t;

/// Immutable undirected simple graph in compressed (CSR) adjacency form.
/// Vertex ids are dense in [0, n); neighbor lists are sorted ascending so
/// every downstream iteration order is deterministic and membership tests
/// are O(log d). `external_ids` maps dense ids back to the ids that appeared
/// in the source file.
class Graph {
public:
    Graph() = default;

    /// Builds a graph over exactly `n` vertices from dense-id edge pairs.
    /// Self-loops and duplicate edges (either orientation) are dropped.
    /// Isolated vertices are allowed. If `external_ids` is empty the
    /// identity mapping is used; otherwise it must have size n.
    static Graph from_edges(VertexId n,
                            const std::vector<std::pair<VertexId, VertexId>>& edges,
                            std::vector<std::uint64_t> external_ids = {});

    VertexId vertex_count() const { return n_; }
    std::uint64_t edge_count() const { return m_; }
    /// Total volume 2m = sum of all degrees.
    std::uint64_t volume() const { return 2 * m_; }

    std::uint32_t degree(VertexId u) const {
        return static_cast<std::uint32_t>(offsets_[u + 1] - offsets_[u]);
    }

    std::span<const VertexId> neighbors(VertexId u) const {
        return {neighbors_.data() + offsets_[u],
                neighbors_.data() + offsets_[u + 1]};
    }

    bool has_edge(VertexId u, VertexId v) const {
        auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    std::uint64_t external_id(VertexId u) const { return external_ids_[u]; }

    const std::vector<std::uint64_t>& external_ids() const { return external_ids_; }

    /// Dense id for a source-file id, if that vertex exists.
    std::optional<VertexId> find_external(std::uint64_t ext) const {
        auto it = external_to_dense_.find(ext);
        if (it == external_to_dense_.end()) return std::nullopt;
        return it->second;
    }

private:
    VertexId n_ = 0;
    std::uint64_t m_ = 0;
    std::vector<std::uint64_t> offsets_;  // size n+1
    std::vector<VertexId> neighbors_;     // size 2m, each list sorted
    std::vector<std::uint64_t> external_ids_;
    std::unordered_map<std::uint64_t, VertexId> external_to_dense_;
};

inline Graph Graph::from_edges(VertexId n,
                               const std::vector<std::pair<VertexId, VertexId>>& edges,
                               std::vector<std::uint64_t> external_ids) {
    Graph g;
    g.n_ = n;
    if (!external_ids.empty() && external_ids.size() != n)
        throw std::invalid_argument("external id table size does not match vertex count");

    // normalize: drop self-loops, dedup via (min,max) keys
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(edges.size() * 2);
    std::vector<std::pair<VertexId, VertexId>> kept;
    kept.reserve(edges.size());
    for (auto [u, v] : edges) {
        if (u >= n || v >= n)
            throw std::invalid_argument("edge endpoint out of range");
        if (u == v) continue;
        VertexId a = std::min(u, v), b = std::max(u, v);
        std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
        if (!seen.insert(key).second) continue;
        kept.emplace_back(a, b);
    }
    g.m_ = kept.size();

    g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (auto [a, b] : kept) {
        ++g.offsets_[a + 1];
        ++g.offsets_[b + 1];
    }
    for (std::size_t i = 1; i < g.offsets_.size(); ++i)
        g.offsets_[i] += g.offsets_[i - 1];

    g.neighbors_.resize(2 * g.m_);
    std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (auto [a, b] : kept) {
        g.neighbors_[cursor[a]++] = b;
        g.neighbors_[cursor[b]++] = a;
    }
    for (VertexId u = 0; u < n; ++u)
        std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u]),
                  g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u + 1]));

    if (external_ids.empty()) {
        g.external_ids_.resize(n);
        for (VertexId u = 0; u < n; ++u) g.external_ids_[u] = u;
    } else {
        g.external_ids_ = std::move(external_ids);
    }
    g.external_to_dense_.reserve(n);
    for (VertexId u = 0; u < n; ++u) {
        if (!g.external_to_dense_.emplace(g.external_ids_[u], u).second)
            throw std::invalid_argument("duplicate external vertex id");
    }
    return g;
}

namespace detail {

inline bool parse_u64(std::string_view token, std::uint64_t& out) {
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = first + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace detail

/// Parses "<u><whitespace><v>" edge lines. '#'-prefixed lines and blank
/// lines are ignored; self-loop lines are dropped before ids are assigned,
/// so a vertex appearing only in self-loops does not exist in the result.
/// External ids are remapped to dense [0, n) in order of first appearance.
inline Graph load_edge_list(std::istream& in) {
    std::unordered_map<std::uint64_t, VertexId> dense;
    std::vector<std::uint64_t> external_ids;
    std::vector<std::pair<VertexId, VertexId>> edges;
    auto intern = [&](std::uint64_t ext) {
        auto it = dense.find(ext);
        if (it != dense.end()) return it->second;
        VertexId id = static_cast<VertexId>(external_ids.size());
        dense.emplace(ext, id);
        external_ids.push_back(ext);
        return id;
    };

    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;

        std::string_view rest(line.data() + pos, line.size() - pos);
        std::uint64_t ids[2];
        for (int k = 0; k < 2; ++k) {
            std::size_t end = rest.find_first_of(" \t\r");
            std::string_view token = rest.substr(0, end);
            if (!detail::parse_u64(token, ids[k]))
                throw std::runtime_error("edge list parse error at line " +
                                         std::to_string(line_no));
            rest = (end == std::string_view::npos) ? std::string_view{}
                                                   : rest.substr(end);
            std::size_t next = rest.find_first_not_of(" \t\r");
            rest = (next == std::string_view::npos) ? std::string_view{}
                                                    : rest.substr(next);
        }
        if (!rest.empty())
            throw std::runtime_error("edge list parse error at line " +
                                     std::to_string(line_no) +
                                     ": expected exactly two ids");
        if (ids[0] == ids[1]) continue;  // self-loop: drop before interning
        VertexId u = intern(ids[0]);  // interning order defines the dense ids,
        VertexId v = intern(ids[1]);  // so keep it left to right explicitly
        edges.emplace_back(u, v);
    }
    if (edges.empty())
        throw std::runtime_error("edge list contains no usable edges");
    auto n = static_cast<VertexId>(external_ids.size());
    return Graph::from_edges(n, edges, std::move(external_ids));
}

inline Graph load_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list file: " + path);
    return load_edge_list(in);
}

/// Hop distances from a single source; unreachable vertices carry an
/// explicit sentinel rather than a numeric infinity.
struct DepthMap {
    static constexpr std::uint32_t kUnreachable =
        std::numeric_limits<std::uint32_t>::max();

    std::vector<std::uint32_t> depth;

    bool reachable(VertexId v) const { return depth[v] != kUnreachable; }
    std::uint32_t operator[](VertexId v) const { return depth[v]; }
};

inline DepthMap bfs_depths(const Graph& g, VertexId q) {
    if (q >= g.vertex_count()) throw std::invalid_argument("source out of range");
    DepthMap dm;
    dm.depth.assign(g.vertex_count(), DepthMap::kUnreachable);
    dm.depth[q] = 0;
    std::vector<VertexId> queue{q};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        VertexId u = queue[head];
        for (VertexId w : g.neighbors(u)) {
            if (dm.depth[w] != DepthMap::kUnreachable) continue;
            dm.depth[w] = dm.depth[u] + 1;
            queue.push_back(w);
        }
    }
    return dm;
}

/// True iff the subgraph induced by `s` is connected (BFS restricted to s).
inline bool is_connected_subset(const Graph& g, std::span<const VertexId> s) {
    if (s.empty()) throw std::invalid_argument("empty vertex set");
    std::vector<std::uint8_t> in_set(g.vertex_count(), 0);
    std::size_t unique = 0;
    for (VertexId v : s) {
        if (v >= g.vertex_count()) throw std::invalid_argument("vertex out of range");
        if (!in_set[v]) {
            in_set[v] = 1;
            ++unique;
        }
    }
    std::vector<VertexId> queue{s[0]};
    std::vector<std::uint8_t> seen(g.vertex_count(), 0);
    seen[s[0]] = 1;
    std::size_t visited = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        VertexId u = queue[head];
        for (VertexId w : g.neighbors(u)) {
            if (!in_set[w] || seen[w]) continue;
            seen[w] = 1;
            ++visited;
            queue.push_back(w);
        }
    }
    return visited == unique;
}

struct InducedSubgraph {
    Graph graph;
    std::vector<VertexId> to_parent;  // sorted ascending; local id i → parent id
};

/// Induced subgraph on `s`: exactly the parent edges with both endpoints in
/// s. Local ids follow ascending parent id; the local graph keeps the
/// parent's external ids so reports still speak source-file ids.
inline InducedSubgraph induced_subgraph(const Graph& g, std::span<const VertexId> s) {
    if (s.empty()) throw std::invalid_argument("empty vertex set");
    std::vector<VertexId> members(s.begin(), s.end());
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.back() >= g.vertex_count())
        throw std::invalid_argument("vertex out of range");

    auto local_of = [&](VertexId parent) {
        auto it = std::lower_bound(members.begin(), members.end(), parent);
        return static_cast<VertexId>(it - members.begin());
    };

    std::vector<std::pair<VertexId, VertexId>> edges;
    std::vector<std::uint64_t> externals(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        VertexId p = members[i];
        externals[i] = g.external_id(p);
        for (VertexId w : g.neighbors(p)) {
            if (w <= p) continue;  // count each edge once
            auto it = std::lower_bound(members.begin(), members.end(), w);
            if (it != members.end() && *it == w)
                edges.emplace_back(static_cast<VertexId>(i), local_of(w));
        }
    }
    InducedSubgraph out;
    out.graph = Graph::from_edges(static_cast<VertexId>(members.size()), edges,
                                  std::move(externals));
    out.to_parent = std::move(members);
    return out;
}

}  // namespace ccs

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccs/graph.hpp"
#include "ccs/metrics.hpp"
#include "ccs/pprcs.hpp"
#include "ccs/rng.hpp"
#include "ccs/sccs.hpp"

namespace ccs {

struct GroundTruth {
    std::vector<std::vector<VertexId>> communities;  // sorted internal ids
    std::vector<std::vector<std::uint32_t>> index;   // vertex -> community indices
    std::uint64_t skipped_members = 0;               // ids absent from the graph
    std::uint64_t dropped_communities = 0;           // fewer than 3 mapped members
};

/// One community per line, whitespace-separated external vertex ids.
/// Unknown ids are skipped (counted); communities with fewer than 3 mapped
/// members are dropped (counted).
inline GroundTruth load_ground_truth(std::istream& in, const Graph& g) {
    GroundTruth gt;
    gt.index.resize(g.vertex_count());
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<VertexId> members;
        std::string token;
        while (ls >> token) {
            std::uint64_t ext = 0;
            std::size_t pos = 0;
            try {
                ext = std::stoull(token, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != token.size())
                throw std::runtime_error("ground truth parse error at line " +
                                         std::to_string(line_no));
            if (auto v = g.find_external(ext))
                members.push_back(*v);
            else
                ++gt.skipped_members;
        }
        if (members.empty()) continue;  // blank line
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        if (members.size() < 3) {
            ++gt.dropped_communities;
            continue;
        }
        auto idx = static_cast<std::uint32_t>(gt.communities.size());
        for (VertexId v : members) gt.index[v].push_back(idx);
        gt.communities.push_back(std::move(members));
    }
    return gt;
}

inline GroundTruth load_ground_truth_file(const std::string& path, const Graph& g) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ground truth file: " + path);
    return load_ground_truth(in, g);
}

struct F1Scores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

inline F1Scores f1_score(std::span<const VertexId> found,
                         std::span<const VertexId> truth) {
    if (found.empty() || truth.empty())
        throw std::invalid_argument("f1_score on empty set");
    std::vector<VertexId> a(found.begin(), found.end());
    std::vector<VertexId> b(truth.begin(), truth.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    std::size_t inter = 0;
    for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else { ++inter; ++i; ++j; }
    }
    F1Scores s;
    s.precision = static_cast<double>(inter) / static_cast<double>(a.size());
    s.recall = static_cast<double>(inter) / static_cast<double>(b.size());
    if (inter > 0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

struct QueryPick {
    VertexId vertex;
    std::uint32_t community_index;
};

/// k distinct communities chosen uniformly (partial Fisher–Yates), one
/// uniformly chosen member each. Fully determined by the seed.
inline std::vector<QueryPick> select_queries(const GroundTruth& gt, std::uint32_t k,
                                             std::uint64_t seed) {
    if (k > gt.communities.size())
        throw std::invalid_argument("requested more queries than communities");
    std::vector<std::uint32_t> order(gt.communities.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    std::vector<QueryPick> picks;
    picks.reserve(k);
    for (std::uint32_t i = 0; i < k; ++i) {
        std::uint64_t j = i + rng.next_below(order.size() - i);
        std::swap(order[i], order[j]);
        const auto& comm = gt.communities[order[i]];
        VertexId v = comm[rng.next_below(comm.size())];
        picks.push_back({v, order[i]});
    }
    return picks;
}

struct PlantedParams {
    std::uint32_t blocks = 2;
    std::uint32_t block_size = 16;
    double p_in = 0.5;
    double p_out = 0.02;
    std::uint64_t seed = 0;
};

struct PlantedPartition {
    Graph graph;
    GroundTruth truth;
    bool connected = false;
};

/// Planted-partition generator: each intra-block pair is an edge with
/// probability p_in, each inter-block pair with p_out; blocks become the
/// ground truth. A disconnected result is reported via the flag, not an
/// error; an empty edge set raises the loader's error.
inline PlantedPartition generate_planted_partition(const PlantedParams& p) {
    if (p.blocks < 1) throw std::invalid_argument("blocks must be at least 1");
    if (p.block_size < 3) throw std::invalid_argument("block_size must be at least 3");
    if (p.p_in < 0.0 || p.p_in > 1.0 || p.p_out < 0.0 || p.p_out > 1.0)
        throw std::invalid_argument("probabilities must lie in [0, 1]");
    std::uint64_t n64 = static_cast<std::uint64_t>(p.blocks) * p.block_size;
    if (n64 > (1ull << 31)) throw std::invalid_argument("graph too large");
    auto n = static_cast<VertexId>(n64);

    Rng rng(p.seed);
    std::vector<std::pair<VertexId, VertexId>> edges;
    for (VertexId u = 0; u < n; ++u) {
        std::uint32_t bu = u / p.block_size;
        for (VertexId v = u + 1; v < n; ++v) {
            double prob = (bu == v / p.block_size) ? p.p_in : p.p_out;
            if (rng.next_double() < prob) edges.emplace_back(u, v);
        }
    }
    if (edges.empty())
        throw std::runtime_error("edge list contains no usable edges");

    PlantedPartition out;
    out.graph = Graph::from_edges(n, edges);
    out.truth.index.resize(n);
    for (std::uint32_t b = 0; b < p.blocks; ++b) {
        std::vector<VertexId> comm(p.block_size);
        for (std::uint32_t i = 0; i < p.block_size; ++i) {
            VertexId v = b * p.block_size + i;
            comm[i] = v;
            out.truth.index[v].push_back(b);
        }
        out.truth.communities.push_back(std::move(comm));
    }
    auto depths = bfs_depths(out.graph, 0);
    out.connected = std::none_of(
        depths.depth.begin(), depths.depth.end(),
        [](std::uint32_t d) { return d == DepthMap::kUnreachable; });
    return out;
}

enum class Algorithm { pprcs, sccs };

inline const char* algorithm_name(Algorithm a) {
    return a == Algorithm::pprcs ? "pprcs" : "sccs";
}

inline Algorithm parse_algorithm(const std::string& name) {
    if (name == "pprcs") return Algorithm::pprcs;
    if (name == "sccs") return Algorithm::sccs;
    throw std::invalid_argument("unknown algorithm: " + name);
}

struct SearchParams {
    PprParams ppr;
    SccsParams sccs;
};

struct EvalReport {
    std::uint64_t query = 0;  // external id
    std::string algorithm;
    std::vector<std::uint64_t> community;  // external ids, ascending
    std::optional<double> conductance;     // absent when the cut is degenerate
    std::optional<double> quality;         // absent when vol(S) = 0
    std::uint64_t size = 0;
    double runtime_ms = 0.0;
    std::optional<double> precision;       // absent without ground truth
    std::optional<double> recall;
    std::optional<double> f1;
};

/// Runs one query through the named algorithm and scores it. With a truth
/// index the F1 fields compare against that community (the sampled-from
/// convention); without one but with ground truth, against the
/// best-matching community containing the query (ties to the lowest
/// index). Without ground truth the F1 fields stay empty.
inline EvalReport evaluate_query(const Graph& g, const GroundTruth* gt,
                                 Algorithm algo, const SearchParams& params,
                                 VertexId query,
                                 std::optional<std::uint32_t> truth_index = std::nullopt,
                                 bool timing = true) {
    if (query >= g.vertex_count())
        throw std::invalid_argument("query vertex out of range");

    auto start = std::chrono::steady_clock::now();
    Community found = algo == Algorithm::pprcs
                          ? pprcs_search(g, query, params.ppr)
                          : sccs_search(g, query, params.sccs);
    auto stop = std::chrono::steady_clock::now();

    if (!found.contains(query))
        throw std::logic_error("search result does not contain the query");
    if (!is_connected_subset(g, found.members()))
        throw std::logic_error("search result is not connected");

    EvalReport r;
    r.query = g.external_ids()[query];
    r.algorithm = algorithm_name(algo);
    r.community.reserve(found.size());
    for (VertexId v : found.members()) r.community.push_back(g.external_ids()[v]);
    std::sort(r.community.begin(), r.community.end());
    r.size = found.size();
    if (timing)
        r.runtime_ms =
            std::chrono::duration<double, std::milli>(stop - start).count();

    std::uint64_t vol = found.volume();
    std::uint64_t min_vol = std::min(vol, g.volume() - vol);
    if (min_vol > 0)
        r.conductance =
            static_cast<double>(found.e_out()) / static_cast<double>(min_vol);
    if (vol > 0) r.quality = quality_score(found);

    if (gt != nullptr) {
        const auto& containing = gt->index[query];
        if (containing.empty())
            throw std::invalid_argument(
                "query " + std::to_string(r.query) +
                " belongs to no ground-truth community");
        F1Scores best{};
        bool have = false;
        if (truth_index) {
            if (*truth_index >= gt->communities.size())
                throw std::invalid_argument("truth community index out of range");
            best = f1_score(found.members(), gt->communities[*truth_index]);
            have = true;
        } else {
            for (std::uint32_t idx : containing) {
                F1Scores s = f1_score(found.members(), gt->communities[idx]);
                if (!have || s.f1 > best.f1) {
                    have = true;
                    best = s;
                }
            }
        }
        if (have) {
            r.precision = best.precision;
            r.recall = best.recall;
            r.f1 = best.f1;
        }
    }
    return r;
}

struct ReportSummary {
    std::uint64_t queries = 0;
    std::optional<double> mean_conductance;  // over reports where defined
    std::optional<double> mean_quality;
    double mean_size = 0.0;
    double mean_runtime_ms = 0.0;
    std::optional<double> mean_f1;
};

inline ReportSummary summarize(const std::vector<EvalReport>& reports) {
    ReportSummary s;
    s.queries = reports.size();
    if (reports.empty()) return s;
    double cond = 0.0, qual = 0.0, f1 = 0.0;
    std::uint64_t n_cond = 0, n_qual = 0, n_f1 = 0;
    for (const auto& r : reports) {
        s.mean_size += static_cast<double>(r.size);
        s.mean_runtime_ms += r.runtime_ms;
        if (r.conductance) { cond += *r.conductance; ++n_cond; }
        if (r.quality) { qual += *r.quality; ++n_qual; }
        if (r.f1) { f1 += *r.f1; ++n_f1; }
    }
    auto count = static_cast<double>(reports.size());
    s.mean_size /= count;
    s.mean_runtime_ms /= count;
    if (n_cond > 0) s.mean_conductance = cond / static_cast<double>(n_cond);
    if (n_qual > 0) s.mean_quality = qual / static_cast<double>(n_qual);
    if (n_f1 > 0) s.mean_f1 = f1 / static_cast<double>(n_f1);
    return s;
}

inline nlohmann::ordered_json report_to_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["query"] = r.query;
    j["algorithm"] = r.algorithm;
    j["community"] = r.community;
    j["conductance"] = r.conductance ? nlohmann::ordered_json(*r.conductance)
                                     : nlohmann::ordered_json(nullptr);
    j["quality"] = r.quality ? nlohmann::ordered_json(*r.quality)
                             : nlohmann::ordered_json(nullptr);
    j["size"] = r.size;
    j["runtime_ms"] = r.runtime_ms;
    if (r.precision) j["precision"] = *r.precision;
    if (r.recall) j["recall"] = *r.recall;
    if (r.f1) j["f1"] = *r.f1;
    return j;
}

inline nlohmann::ordered_json summary_to_json(const ReportSummary& s) {
    nlohmann::ordered_json j;
    j["summary"] = true;
    j["queries"] = s.queries;
    j["mean_conductance"] = s.mean_conductance
                                ? nlohmann::ordered_json(*s.mean_conductance)
                                : nlohmann::ordered_json(nullptr);
    j["mean_quality"] = s.mean_quality ? nlohmann::ordered_json(*s.mean_quality)
                                       : nlohmann::ordered_json(nullptr);
    j["mean_size"] = s.mean_size;
    j["mean_runtime_ms"] = s.mean_runtime_ms;
    if (s.mean_f1) j["mean_f1"] = *s.mean_f1;
    return j;
}

inline void write_reports_jsonl(std::ostream& out,
                                const std::vector<EvalReport>& reports,
                                bool with_summary) {
    for (const auto& r : reports) out << report_to_json(r).dump() << '\n';
    if (with_summary) out << summary_to_json(summarize(reports)).dump() << '\n';
}

namespace detail {

inline std::string tsv_number(double v) {
    nlohmann::json j = v;  // shortest round-trip formatting, same as JSONL
    return j.dump();
}

}  // namespace detail

/// Same field order as the JSONL writer; empty cell where JSONL has null
/// or omits the field. The community column joins ids with commas.
inline void write_reports_tsv(std::ostream& out,
                              const std::vector<EvalReport>& reports,
                              bool with_summary) {
    out << "query\talgorithm\tcommunity\tconductance\tquality\tsize\t"
           "runtime_ms\tprecision\trecall\tf1\n";
    for (const auto& r : reports) {
        out << r.query << '\t' << r.algorithm << '\t';
        for (std::size_t i = 0; i < r.community.size(); ++i) {
            if (i) out << ',';
            out << r.community[i];
        }
        out << '\t';
        if (r.conductance) out << detail::tsv_number(*r.conductance);
        out << '\t';
        if (r.quality) out << detail::tsv_number(*r.quality);
        out << '\t' << r.size << '\t' << detail::tsv_number(r.runtime_ms) << '\t';
        if (r.precision) out << detail::tsv_number(*r.precision);
        out << '\t';
        if (r.recall) out << detail::tsv_number(*r.recall);
        out << '\t';
        if (r.f1) out << detail::tsv_number(*r.f1);
        out << '\n';
    }
    if (with_summary) {
        ReportSummary s = summarize(reports);
        out << "summary\t\t\t";
        if (s.mean_conductance) out << detail::tsv_number(*s.mean_conductance);
        out << '\t';
        if (s.mean_quality) out << detail::tsv_number(*s.mean_quality);
        out << '\t' << detail::tsv_number(s.mean_size) << '\t'
            << detail::tsv_number(s.mean_runtime_ms) << "\t\t\t";
        if (s.mean_f1) out << detail::tsv_number(*s.mean_f1);
        out << '\n';
    }
}

}  // namespace ccs

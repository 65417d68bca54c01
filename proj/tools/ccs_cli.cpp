#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccs/ccs.hpp"

namespace {

struct CommonOpts {
    std::string graph_path;
    std::string truth_path;
    std::string algorithm = "sccs";
    double alpha = 0.15;
    std::string r_max = "auto";
    std::uint32_t dp = 3;
    std::uint32_t l = 300;
    std::uint32_t h = 5000;
    std::uint32_t count = 2;
    std::uint32_t max_rounds = 100;
    std::vector<std::uint64_t> queries;
    std::uint32_t k = 0;
    std::uint64_t seed = 0;
    std::string output_path;
    std::string format = "jsonl";
    bool no_timing = false;
    std::uint32_t threads = 1;
};

ccs::SearchParams build_params(const CommonOpts& o) {
    ccs::SearchParams p;
    p.ppr.alpha = o.alpha;
    if (o.r_max == "auto") {
        p.ppr.r_max = 0.0;  // resolved to 1/n against the loaded graph
    } else {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(o.r_max, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != o.r_max.size() || !(v > 0.0))
            throw std::invalid_argument("r_max must be a positive number or 'auto'");
        p.ppr.r_max = v;
    }
    if (!(o.alpha > 0.0 && o.alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1)");
    p.sccs.sampling.dp = o.dp;
    p.sccs.sampling.l = o.l;
    p.sccs.sampling.h = o.h;
    p.sccs.count = o.count;
    p.sccs.max_rounds = o.max_rounds;
    return p;
}

ccs::VertexId map_query(const ccs::Graph& g, std::uint64_t ext) {
    if (auto v = g.find_external(ext)) return *v;
    throw std::invalid_argument("unknown vertex id: " + std::to_string(ext));
}

struct QueryPlan {
    std::vector<ccs::VertexId> vertices;
    std::vector<std::optional<std::uint32_t>> truth_index;
};

QueryPlan plan_queries(const ccs::Graph& g, const ccs::GroundTruth* gt,
                       const CommonOpts& o, bool require_some) {
    QueryPlan plan;
    if (!o.queries.empty() && o.k > 0)
        throw std::invalid_argument("give either explicit queries or k, not both");
    if (!o.queries.empty()) {
        for (std::uint64_t ext : o.queries) {
            plan.vertices.push_back(map_query(g, ext));
            plan.truth_index.push_back(std::nullopt);
        }
    } else if (o.k > 0) {
        if (gt == nullptr)
            throw std::invalid_argument("sampled queries require a ground truth file");
        for (const auto& pick : ccs::select_queries(*gt, o.k, o.seed)) {
            plan.vertices.push_back(pick.vertex);
            plan.truth_index.push_back(pick.community_index);
        }
    } else if (require_some) {
        throw std::invalid_argument("no queries given (use --queries or --k)");
    }
    return plan;
}

void write_text(const std::string& output_path, const std::string& text) {
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + output_path);
    out << text;
}

nlohmann::ordered_json params_block(const CommonOpts& o, const ccs::Graph& g,
                                    const ccs::SearchParams& p) {
    nlohmann::ordered_json j;
    if (o.algorithm == "pprcs") {
        j["alpha"] = p.ppr.alpha;
        j["r_max"] = p.ppr.r_max > 0.0
                         ? p.ppr.r_max
                         : 1.0 / static_cast<double>(g.vertex_count());
    } else {
        j["dp"] = p.sccs.sampling.dp;
        j["l"] = p.sccs.sampling.l;
        j["h"] = p.sccs.sampling.h;
        j["count"] = p.sccs.count;
        j["max_rounds"] = p.sccs.max_rounds;
    }
    return j;
}

int cmd_query(const CommonOpts& o) {
    ccs::Graph g = ccs::load_edge_list_file(o.graph_path);
    ccs::SearchParams params = build_params(o);
    std::optional<ccs::GroundTruth> gt;
    if (!o.truth_path.empty()) gt = ccs::load_ground_truth_file(o.truth_path, g);
    if (o.queries.size() != 1)
        throw std::invalid_argument("query mode takes exactly one --query id");

    ccs::VertexId q = map_query(g, o.queries[0]);
    ccs::EvalReport r =
        ccs::evaluate_query(g, gt ? &*gt : nullptr, ccs::parse_algorithm(o.algorithm),
                            params, q, std::nullopt, !o.no_timing);
    nlohmann::ordered_json j = ccs::report_to_json(r);
    j["params"] = params_block(o, g, params);

    if (o.format == "tsv") {
        std::ostringstream s;
        ccs::write_reports_tsv(s, {r}, false);
        write_text(o.output_path, s.str());
    } else {
        write_text(o.output_path, j.dump() + "\n");
    }
    return 0;
}

int cmd_batch(const CommonOpts& o) {
    ccs::Graph g = ccs::load_edge_list_file(o.graph_path);
    ccs::SearchParams params = build_params(o);
    if (o.truth_path.empty())
        throw std::invalid_argument("batch mode requires --truth");
    ccs::GroundTruth gt = ccs::load_ground_truth_file(o.truth_path, g);
    QueryPlan plan = plan_queries(g, &gt, o, true);
    ccs::Algorithm algo = ccs::parse_algorithm(o.algorithm);

    std::vector<ccs::EvalReport> reports(plan.vertices.size());
    std::uint32_t workers =
        std::max<std::uint32_t>(1, std::min<std::uint32_t>(
                                       o.threads, plan.vertices.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < plan.vertices.size(); ++i)
            reports[i] = ccs::evaluate_query(g, &gt, algo, params, plan.vertices[i],
                                             plan.truth_index[i], !o.no_timing);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::string first_error;
        std::mutex error_mu;
        for (std::uint32_t w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= plan.vertices.size() || failed.load()) return;
                    try {
                        reports[i] = ccs::evaluate_query(g, &gt, algo, params,
                                                         plan.vertices[i],
                                                         plan.truth_index[i],
                                                         !o.no_timing);
                    } catch (const std::exception& e) {
                        std::lock_guard<std::mutex> lock(error_mu);
                        if (!failed.exchange(true)) first_error = e.what();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failed.load()) throw std::runtime_error(first_error);
    }

    std::ostringstream s;
    if (o.format == "tsv") ccs::write_reports_tsv(s, reports, true);
    else ccs::write_reports_jsonl(s, reports, true);
    write_text(o.output_path, s.str());
    return 0;
}

int cmd_sample_stats(const CommonOpts& o) {
    ccs::Graph g = ccs::load_edge_list_file(o.graph_path);
    ccs::SearchParams params = build_params(o);
    if (o.truth_path.empty())
        throw std::invalid_argument("sample-stats mode requires --truth");
    ccs::GroundTruth gt = ccs::load_ground_truth_file(o.truth_path, g);
    QueryPlan plan = plan_queries(g, &gt, o, true);

    struct Row {
        std::uint64_t query;
        double coverage;
        double rate;
        double sampling_ms;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < plan.vertices.size(); ++i) {
        ccs::VertexId q = plan.vertices[i];
        std::uint32_t truth_idx;
        if (plan.truth_index[i]) {
            truth_idx = *plan.truth_index[i];
        } else {
            const auto& containing = gt.index[q];
            if (containing.empty())
                throw std::invalid_argument(
                    "query " + std::to_string(g.external_ids()[q]) +
                    " belongs to no ground-truth community");
            truth_idx = containing.front();
        }
        auto start = std::chrono::steady_clock::now();
        ccs::SampledSubgraph sg = ccs::sample_subgraph(g, q, params.sccs.sampling);
        auto stop = std::chrono::steady_clock::now();

        const auto& truth = gt.communities[truth_idx];
        std::size_t inter = 0;
        for (ccs::VertexId v : truth)
            if (sg.local_id(v)) ++inter;
        Row row;
        row.query = g.external_ids()[q];
        row.coverage = static_cast<double>(inter) / static_cast<double>(truth.size());
        row.rate = static_cast<double>(sg.graph.vertex_count()) /
                   static_cast<double>(g.vertex_count());
        row.sampling_ms =
            o.no_timing
                ? 0.0
                : std::chrono::duration<double, std::milli>(stop - start).count();
        rows.push_back(row);
    }

    std::ostringstream s;
    double mc = 0.0, mr = 0.0, mt = 0.0;
    for (const auto& r : rows) {
        mc += r.coverage;
        mr += r.rate;
        mt += r.sampling_ms;
    }
    auto cnt = static_cast<double>(rows.empty() ? 1 : rows.size());
    if (o.format == "tsv") {
        s << "query\tcoverage\trate\tsampling_ms\n";
        for (const auto& r : rows) {
            nlohmann::json c = r.coverage, ra = r.rate, t = r.sampling_ms;
            s << r.query << '\t' << c.dump() << '\t' << ra.dump() << '\t'
              << t.dump() << '\n';
        }
        nlohmann::json c = mc / cnt, ra = mr / cnt, t = mt / cnt;
        s << "summary\t" << c.dump() << '\t' << ra.dump() << '\t' << t.dump()
          << '\n';
    } else {
        for (const auto& r : rows) {
            nlohmann::ordered_json j;
            j["query"] = r.query;
            j["coverage"] = r.coverage;
            j["rate"] = r.rate;
            j["sampling_ms"] = r.sampling_ms;
            s << j.dump() << '\n';
        }
        nlohmann::ordered_json j;
        j["summary"] = true;
        j["queries"] = rows.size();
        j["mean_coverage"] = mc / cnt;
        j["mean_rate"] = mr / cnt;
        j["mean_sampling_ms"] = mt / cnt;
        s << j.dump() << '\n';
    }
    write_text(o.output_path, s.str());
    return 0;
}

struct GenerateOpts {
    std::uint32_t blocks = 2;
    std::uint32_t block_size = 16;
    double p_in = 0.5;
    double p_out = 0.02;
    std::uint64_t seed = 0;
    std::string edges_out;
    std::string truth_out;
};

int cmd_generate(const GenerateOpts& o) {
    ccs::PlantedParams p;
    p.blocks = o.blocks;
    p.block_size = o.block_size;
    p.p_in = o.p_in;
    p.p_out = o.p_out;
    p.seed = o.seed;
    ccs::PlantedPartition pp = ccs::generate_planted_partition(p);

    std::ostringstream edges;
    const ccs::Graph& g = pp.graph;
    for (ccs::VertexId u = 0; u < g.vertex_count(); ++u)
        for (ccs::VertexId v : g.neighbors(u))
            if (u < v)
                edges << g.external_ids()[u] << ' ' << g.external_ids()[v] << '\n';

    std::ostringstream truth;
    for (const auto& comm : pp.truth.communities) {
        for (std::size_t i = 0; i < comm.size(); ++i) {
            if (i) truth << ' ';
            truth << g.external_ids()[comm[i]];
        }
        truth << '\n';
    }

    write_text(o.edges_out, edges.str());
    write_text(o.truth_out, truth.str());

    nlohmann::ordered_json j;
    j["vertices"] = g.vertex_count();
    j["edges"] = g.edge_count();
    j["connected"] = pp.connected;
    std::cout << j.dump() << '\n';
    return 0;
}

int cmd_oracle(const CommonOpts& o) {
    ccs::Graph g = ccs::load_edge_list_file(o.graph_path);
    if (o.queries.size() != 1)
        throw std::invalid_argument("oracle mode takes exactly one --query id");
    ccs::VertexId q = map_query(g, o.queries[0]);
    ccs::OracleResult res = ccs::brute_force_ccs(g, q);

    nlohmann::ordered_json j;
    j["query"] = g.external_ids()[q];
    std::vector<std::uint64_t> ext;
    for (ccs::VertexId v : res.best_set) ext.push_back(g.external_ids()[v]);
    std::sort(ext.begin(), ext.end());
    j["best_set"] = ext;
    j["conductance"] = res.best_conductance;
    j["cut"] = res.best_cut;
    j["min_volume"] = res.best_min_volume;
    j["optima_count"] = res.optima_count;
    write_text(o.output_path, j.dump() + "\n");
    return 0;
}

void add_search_flags(CLI::App* cmd, CommonOpts& o, bool with_algorithm) {
    // long-only help so the sampling cap can keep its natural name --h
    cmd->set_help_flag("--help", "print this help message and exit");
    cmd->add_option("--graph", o.graph_path, "edge list file")->required();
    if (with_algorithm)
        cmd->add_option("--algorithm", o.algorithm, "pprcs or sccs")
            ->check(CLI::IsMember({"pprcs", "sccs"}));
    cmd->add_option("--alpha", o.alpha, "teleport probability");
    cmd->add_option("--r-max", o.r_max, "push threshold, or 'auto' for 1/n");
    cmd->add_option("--dp", o.dp, "sampling depth bound");
    cmd->add_option("--l", o.l, "sampling lower vertex target");
    cmd->add_option("--h", o.h, "sampling vertex cap");
    cmd->add_option("--count", o.count, "expansion batch bound");
    cmd->add_option("--max-rounds", o.max_rounds, "expansion/verification rounds cap");
    cmd->add_option("--output", o.output_path, "output file (default stdout)");
    cmd->add_option("--format", o.format, "jsonl or tsv")
        ->check(CLI::IsMember({"jsonl", "tsv"}));
    cmd->add_flag("--no-timing", o.no_timing, "zero runtime fields for reproducible bytes");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conductance community search"};
    app.require_subcommand(1);

    CommonOpts qo;
    CLI::App* query = app.add_subcommand("query", "run one search");
    add_search_flags(query, qo, true);
    query->add_option("--truth", qo.truth_path, "ground truth file");
    query->add_option("--query", qo.queries, "query vertex (external id)");

    CommonOpts bo;
    CLI::App* batch = app.add_subcommand("batch", "run many searches");
    add_search_flags(batch, bo, true);
    batch->add_option("--truth", bo.truth_path, "ground truth file")->required();
    batch->add_option("--queries", bo.queries, "explicit query vertices");
    batch->add_option("--k", bo.k, "number of sampled queries");
    batch->add_option("--seed", bo.seed, "query sampling seed");
    batch->add_option("--threads", bo.threads, "worker threads");

    CommonOpts so;
    CLI::App* stats = app.add_subcommand("sample-stats", "sampling diagnostics");
    add_search_flags(stats, so, false);
    stats->add_option("--truth", so.truth_path, "ground truth file")->required();
    stats->add_option("--queries", so.queries, "explicit query vertices");
    stats->add_option("--k", so.k, "number of sampled queries");
    stats->add_option("--seed", so.seed, "query sampling seed");

    GenerateOpts go;
    CLI::App* gen = app.add_subcommand("generate", "planted partition synthesis");
    gen->add_option("--blocks", go.blocks, "number of blocks")->required();
    gen->add_option("--block-size", go.block_size, "vertices per block")->required();
    gen->add_option("--p-in", go.p_in, "intra-block edge probability")->required();
    gen->add_option("--p-out", go.p_out, "inter-block edge probability")->required();
    gen->add_option("--seed", go.seed, "generator seed");
    gen->add_option("--edges-out", go.edges_out, "edge list output file")->required();
    gen->add_option("--truth-out", go.truth_out, "ground truth output file")->required();

    CommonOpts oo;
    CLI::App* oracle = app.add_subcommand("oracle", "exhaustive optimum (n <= 20)");
    oracle->add_option("--graph", oo.graph_path, "edge list file")->required();
    oracle->add_option("--query", oo.queries, "query vertex (external id)");
    oracle->add_option("--output", oo.output_path, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (query->parsed()) return cmd_query(qo);
        if (batch->parsed()) return cmd_batch(bo);
        if (stats->parsed()) return cmd_sample_stats(so);
        if (gen->parsed()) return cmd_generate(go);
        if (oracle->parsed()) return cmd_oracle(oo);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

// rotsync: CRB and simulation toolkit for synchronization of rotations.
//
// Exit codes: 0 ok, 2 parse error, 3 quadrature failure, 4 ill-posed
// problem, 5 bad dimension, 6 sampler failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rotsync/crb.hpp"
#include "rotsync/embed.hpp"
#include "rotsync/graphio.hpp"
#include "rotsync/sync.hpp"

namespace {

using nlohmann::json;
using namespace rotsync;

constexpr int kExitParse = 2;
constexpr int kExitQuadrature = 3;
constexpr int kExitIllPosed = 4;
constexpr int kExitDimension = 5;
constexpr int kExitSampler = 6;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + path);
    out << content;
}

std::vector<std::pair<int, int>> parse_pairs(const std::string& arg, int num_nodes) {
    std::vector<std::pair<int, int>> pairs;
    if (arg.empty()) return pairs;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ParseError("pairs: expected i:j entries");
        const int i = std::stoi(item.substr(0, colon));
        const int j = std::stoi(item.substr(colon + 1));
        if (i < 1 || j < 1 || i > num_nodes || j > num_nodes || i == j) {
            throw ParseError("pairs: invalid pair " + item);
        }
        pairs.emplace_back(i - 1, j - 1);
    }
    return pairs;
}

int env_threads() {
    const char* env = std::getenv("ROTSYNC_THREADS");
    if (env == nullptr) return 1;
    const int t = std::atoi(env);
    return t >= 1 ? t : 1;
}

json report_to_json(const crb::CrbReport& rep,
                    const std::vector<std::pair<int, int>>& pairs) {
    json j;
    j["mode"] = rep.mode == crb::CrbMode::Anchored ? "anchored" : "anchor_free";
    j["n"] = rep.n;
    j["nodes"] = rep.num_nodes;
    j["d"] = rep.d;
    j["corrected"] = rep.corrected;
    j["total"] = rep.total;
    j["snr"] = rep.snr;
    j["baseline"] = rep.baseline;
    j["within_validity"] = rep.within_validity;
    if (rep.mode == crb::CrbMode::Anchored) {
        j["per_node"] = rep.per_node;
        // RMS angle per node for readability (theta = dist / sqrt(2)).
        if (rep.n <= 3) {
            std::vector<double> rms;
            rms.reserve(rep.per_node.size());
            for (double b : rep.per_node) rms.push_back(std::sqrt(b / 2.0));
            j["per_node_rms_angle"] = rms;
        }
    } else {
        json pj = json::array();
        for (const auto& [i, jnode] : pairs) {
            pj.push_back(json{{"i", i + 1}, {"j", jnode + 1}, {"bound", rep.pair_bound(i, jnode)}});
        }
        j["pairs"] = std::move(pj);
    }
    return j;
}

int cmd_weights(const std::string& path, double tol, const std::string& out_path,
                bool as_json) {
    const auto file = graphio::load_graph(path);
    noise::QuadratureSpec spec;
    spec.abs_tol = tol;
    std::ostringstream csv;
    json rows = json::array();
    csv << "i,j,kind,kappa,p,weight\n";
    for (const auto& e : file.graph.edges) {
        const double w = noise::info_weight(e.model, spec);
        const auto nj = graphio::noise_to_json(e.model);
        csv << (e.i + 1) << ',' << (e.j + 1) << ',' << nj["kind"].get<std::string>() << ','
            << fmt(e.model.kappa) << ',' << fmt(e.model.p) << ',' << fmt(w) << '\n';
        rows.push_back(json{{"i", e.i + 1}, {"j", e.j + 1}, {"noise", nj}, {"weight", w}});
    }
    write_output(out_path, as_json ? rows.dump(2) + "\n" : csv.str());
    return 0;
}

int cmd_crb(const std::string& path, bool anchored, bool corrected, const std::string& pairs_arg,
            double tol, const std::string& out_path) {
    const auto file = graphio::load_graph(path);
    noise::QuadratureSpec spec;
    spec.abs_tol = tol;
    const auto pairs = parse_pairs(pairs_arg, file.graph.num_nodes);
    const auto rep = anchored ? crb::crb_anchored(file.graph, corrected, spec)
                              : crb::crb_anchorfree(file.graph, corrected, spec);
    write_output(out_path, report_to_json(rep, pairs).dump(2) + "\n");
    return 0;
}

struct RandomGraphOpts {
    std::string model = "complete";
    int nodes = 0;
    double q = 0.5;
    int clusters = 2;
    double p_in = 0.8;
    double p_out = 0.05;
    std::string noise_json;
    int n = 3;
    int anchors = 0;
};

graphcore::MeasurementGraph make_random_graph(const RandomGraphOpts& opts, std::uint64_t seed) {
    json nj;
    try {
        nj = json::parse(opts.noise_json);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("--noise: ") + e.what());
    }
    const auto model = graphio::noise_from_json(nj, opts.n);
    sync::GraphParams params;
    if (opts.model == "complete") {
        params.model = sync::GraphModel::Complete;
    } else if (opts.model == "erdos_renyi") {
        params.model = sync::GraphModel::ErdosRenyi;
        params.q = opts.q;
    } else if (opts.model == "clustered") {
        params.model = sync::GraphModel::Clustered;
        params.clusters = opts.clusters;
        params.p_in = opts.p_in;
        params.p_out = opts.p_out;
    } else {
        throw ParseError("--model: expected complete | erdos_renyi | clustered");
    }
    params.num_nodes = opts.nodes;
    auto g = sync::random_graph(params, model, seed);
    for (int a = 0; a < opts.anchors && a < g.num_nodes; ++a) g.anchors.push_back(a);
    return g;
}

int cmd_simulate(const std::string& path, const RandomGraphOpts& random_opts, int trials,
                 std::uint64_t seed, const std::string& estimator, bool anchored, bool corrected,
                 bool noiseless, const std::string& pairs_arg, double tol,
                 const std::string& out_path, bool as_json) {
    if (estimator != "eig") throw ParseError("--estimator: only \"eig\" is available");
    graphcore::MeasurementGraph g;
    if (!path.empty()) {
        g = graphio::load_graph(path).graph;
    } else if (random_opts.nodes > 0) {
        g = make_random_graph(random_opts, seed);
    } else {
        throw ParseError("simulate: provide a graph file or --random with --nodes");
    }
    noise::QuadratureSpec spec;
    spec.abs_tol = tol;

    sync::ExperimentConfig config;
    config.trials = trials;
    config.seed = seed;
    config.anchored = anchored;
    config.corrected = corrected;
    config.noiseless = noiseless;
    config.threads = env_threads();
    config.pairs = parse_pairs(pairs_arg, g.num_nodes);
    const auto res = sync::run_experiment(g, config, spec);

    const double n_free = anchored ? g.num_nodes - static_cast<double>(g.anchors.size())
                                   : g.num_nodes - 1.0;
    if (as_json) {
        json j;
        j["trials"] = res.trials;
        j["seed"] = seed;
        j["crb_total"] = res.report.total;
        j["emp_mse_total"] = res.mean_total_sq;
        j["emp_stderr_total"] = res.stderr_total_sq;
        j["baseline"] = res.baseline;
        j["snr"] = res.report.snr;
        j["within_validity"] = res.report.within_validity;
        j["per_node_emp"] = res.mean_per_node_sq;
        json pj = json::array();
        for (const auto& [key, v] : res.mean_pair_sq) {
            pj.push_back(json{{"i", key.first + 1},
                              {"j", key.second + 1},
                              {"emp", v},
                              {"bound", res.report.mode == crb::CrbMode::AnchorFree
                                            ? res.report.pair_bound(key.first, key.second)
                                            : 0.0}});
        }
        j["pairs"] = std::move(pj);
        write_output(out_path, j.dump(2) + "\n");
    } else {
        std::ostringstream csv;
        csv << "kappa_or_p,crb_total,emp_mse,emp_stderr,baseline\n";
        const auto& edges = g.edges;
        const double label = edges.empty() ? 0.0
                             : edges.front().model.kind == noise::NoiseKind::LangevinOutlier
                                 ? edges.front().model.p
                                 : edges.front().model.kappa;
        csv << fmt(label) << ',' << fmt(res.report.total / n_free) << ','
            << fmt(res.mean_total_sq / n_free) << ',' << fmt(res.stderr_total_sq / n_free) << ','
            << fmt(res.baseline / n_free) << '\n';
        write_output(out_path, csv.str());
    }
    return 0;
}

int cmd_embed(const std::string& path, int dim, bool anchored, double tol,
              const std::string& out_path) {
    const auto file = graphio::load_graph(path);
    noise::QuadratureSpec spec;
    spec.abs_tol = tol;
    const auto lap = graphcore::build_laplacian(file.graph, spec);

    graphcore::SpectralKernel kernel =
        anchored ? graphcore::SpectralKernel::build(graphcore::mask_anchors(lap, file.graph.anchors))
                 : graphcore::SpectralKernel::build(lap);
    const auto emb = embed::ectd_embed(kernel, dim);

    std::vector<double> markers;
    if (anchored) {
        markers = embed::node_marker_sizes(crb::crb_anchored(file.graph, false, spec));
    }
    std::vector<bool> is_anchor(file.graph.num_nodes, false);
    for (int a : file.graph.anchors) is_anchor[a] = true;

    std::ostringstream csv;
    csv << "# explained_ratio=" << fmt(emb.explained_ratio) << '\n';
    csv << "node_id";
    for (int k = 0; k < dim; ++k) csv << ",x" << (k + 1);
    csv << ",marker_size,is_anchor\n";
    for (int i = 0; i < file.graph.num_nodes; ++i) {
        csv << (i + 1);
        for (int k = 0; k < dim; ++k) csv << ',' << fmt(emb.coordinates(i, k));
        csv << ',' << fmt(anchored ? markers[i] : 0.0) << ',' << (is_anchor[i] ? 1 : 0) << '\n';
    }
    write_output(out_path, csv.str());
    return 0;
}

int cmd_sample(const std::string& model_json, int n, long count, std::uint64_t seed,
               const std::string& out_path) {
    json mj;
    try {
        mj = json::parse(model_json);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("--model: ") + e.what());
    }
    const auto model = graphio::noise_from_json(mj, n);
    noise::Rng rng(seed);
    json rotations = json::array();
    double trace_sum = 0.0;
    for (long i = 0; i < count; ++i) {
        const auto z = noise::sample(model, rng);
        trace_sum += z.trace();
        rotations.push_back(graphio::matrix_to_json(z));
    }
    json j;
    j["model"] = mj;
    j["count"] = count;
    j["seed"] = seed;
    j["rotations"] = std::move(rotations);
    json summary;
    summary["mean_trace"] = count > 0 ? trace_sum / static_cast<double>(count) : 0.0;
    if (model.kind != noise::NoiseKind::Exact && n <= 4) {
        summary["expected_trace"] = noise::weyl_integrate(
            n, [&model](const Eigen::MatrixXd& z) { return z.trace() * noise::pdf(model, z); });
    }
    j["summary"] = std::move(summary);
    write_output(out_path, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cramer-Rao bounds and Monte Carlo validation for synchronization of rotations"};
    app.require_subcommand(1);

    std::string graph_path;
    std::string out_path;
    std::string pairs_arg;
    double tol = 1e-10;
    bool as_json = false;

    auto* weights = app.add_subcommand("weights", "Per-edge information weights");
    weights->add_option("graph", graph_path, "graph JSON file")->required();
    weights->add_option("--tol", tol, "quadrature tolerance");
    weights->add_option("-o,--output", out_path, "output path (default stdout)");
    weights->add_flag("--json", as_json, "emit JSON instead of CSV");

    bool anchored = false;
    bool anchor_free = false;
    bool corrected = false;
    auto* crb_cmd = app.add_subcommand("crb", "Cramer-Rao bound report");
    crb_cmd->add_option("graph", graph_path, "graph JSON file")->required();
    crb_cmd->add_flag("--anchored", anchored, "anchored bound");
    crb_cmd->add_flag("--anchor-free", anchor_free, "anchor-free bound (default)");
    crb_cmd->add_flag("--corrected", corrected, "apply n=3 curvature correction");
    crb_cmd->add_option("--pairs", pairs_arg, "comma-separated i:j pairs (1-based)");
    crb_cmd->add_option("--tol", tol, "quadrature tolerance");
    crb_cmd->add_option("-o,--output", out_path, "output path");

    int trials = 1;
    std::uint64_t seed = 0;
    std::string estimator = "eig";
    bool noiseless = false;
    bool use_random = false;
    RandomGraphOpts random_opts;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo CRB-vs-MSE experiment");
    simulate->add_option("graph", graph_path, "graph JSON file");
    simulate->add_flag("--random", use_random, "generate a random graph instead");
    simulate->add_option("--model", random_opts.model, "complete | erdos_renyi | clustered");
    simulate->add_option("--nodes", random_opts.nodes, "node count for --random");
    simulate->add_option("--q", random_opts.q, "edge density (erdos_renyi)");
    simulate->add_option("--clusters", random_opts.clusters, "cluster count (clustered)");
    simulate->add_option("--p-in", random_opts.p_in, "within-cluster density");
    simulate->add_option("--p-out", random_opts.p_out, "between-cluster density");
    simulate->add_option("--noise", random_opts.noise_json, "noise model JSON for --random");
    simulate->add_option("--dim", random_opts.n, "rotation dimension for --random");
    simulate->add_option("--anchor-count", random_opts.anchors, "anchors for --random");
    simulate->add_option("--trials", trials, "number of Monte Carlo trials");
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--estimator", estimator, "estimator id (eig)");
    simulate->add_flag("--anchored", anchored, "anchored evaluation");
    simulate->add_flag("--corrected", corrected, "corrected CRB");
    simulate->add_flag("--noiseless", noiseless, "exact measurements (Z = I)");
    simulate->add_option("--pairs", pairs_arg, "pair errors to track (1-based i:j)");
    simulate->add_option("--tol", tol, "quadrature tolerance");
    simulate->add_flag("--json", as_json, "emit JSON instead of CSV");
    simulate->add_option("-o,--output", out_path, "output path");

    int dim = 2;
    auto* embed_cmd = app.add_subcommand("embed", "ECTD/PCA embedding export");
    embed_cmd->add_option("graph", graph_path, "graph JSON file")->required();
    embed_cmd->add_option("--dim", dim, "embedding dimension");
    embed_cmd->add_flag("--anchored", anchored, "use the masked Laplacian");
    embed_cmd->add_option("--tol", tol, "quadrature tolerance");
    embed_cmd->add_option("-o,--output", out_path, "output path");

    std::string model_json;
    int sample_n = 3;
    long count = 1;
    auto* sample_cmd = app.add_subcommand("sample", "Draw rotations from a noise model");
    sample_cmd->add_option("--model", model_json, "noise model JSON")->required();
    sample_cmd->add_option("--n", sample_n, "rotation dimension");
    sample_cmd->add_option("--count", count, "number of draws");
    sample_cmd->add_option("--seed", seed, "seed");
    sample_cmd->add_option("-o,--output", out_path, "output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (weights->parsed()) return cmd_weights(graph_path, tol, out_path, as_json);
        if (crb_cmd->parsed()) {
            if (anchored && anchor_free) throw ParseError("crb: pick one of --anchored/--anchor-free");
            return cmd_crb(graph_path, anchored, corrected, pairs_arg, tol, out_path);
        }
        if (simulate->parsed()) {
            if (use_random) graph_path.clear();
            return cmd_simulate(graph_path, random_opts, trials, seed, estimator, anchored,
                                corrected, noiseless, pairs_arg, tol, out_path, as_json);
        }
        if (embed_cmd->parsed()) return cmd_embed(graph_path, dim, anchored, tol, out_path);
        if (sample_cmd->parsed()) return cmd_sample(model_json, sample_n, count, seed, out_path);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const QuadratureError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitQuadrature;
    } catch (const IllPosedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIllPosed;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDimension;
    } catch (const SamplerStuckError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSampler;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

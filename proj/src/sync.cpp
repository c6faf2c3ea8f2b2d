#include "rotsync/sync.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace rotsync::sync {

namespace {

constexpr double kPi = std::numbers::pi;

double sq(double x) { return x * x; }

/// Geodesic distance that saturates at the cut locus instead of throwing:
/// the angle of every rotation plane is at most pi, so the distance of an
/// n=2,3 rotation is capped at sqrt(2) pi.
double safe_dist(const Matrix& a, const Matrix& b, bool* saturated) {
    try {
        return songeom::geodesic_dist(a, b);
    } catch (const CutLocusError&) {
        if (saturated != nullptr) *saturated = true;
        const int n = static_cast<int>(a.rows());
        const int planes = n / 2;
        return std::sqrt(2.0 * planes) * kPi;
    }
}

}  // namespace

ProblemInstance synthesize(const MeasurementGraph& g, const RotationTuple& truth,
                           std::uint64_t seed, bool noiseless) {
    g.validate();
    if (static_cast<int>(truth.size()) != g.num_nodes) {
        throw DimensionError("synthesize: truth size must match node count");
    }
    for (const auto& r : truth) {
        if (r.rows() != g.n) throw DimensionError("synthesize: truth dimension mismatch");
        songeom::check_rotation(r);
    }
    ProblemInstance inst;
    inst.graph = g;
    inst.truth = truth;
    inst.seed = seed;
    // One derived stream per edge keeps the draw independent of edge order.
    for (size_t e = 0; e < g.edges.size(); ++e) {
        const auto& edge = g.edges[e];
        const int i = std::min(edge.i, edge.j);
        const int j = std::max(edge.i, edge.j);
        Matrix z;
        if (noiseless || edge.model.kind == noise::NoiseKind::Exact) {
            z = Matrix::Identity(g.n, g.n);
        } else {
            noise::Rng rng(noise::derive_seed(seed, e));
            z = noise::sample(edge.model, rng);
        }
        inst.measurements[{i, j}] = z * truth[i] * truth[j].transpose();
    }
    return inst;
}

ProblemInstance synthesize_random(const MeasurementGraph& g, std::uint64_t seed,
                                  bool noiseless) {
    noise::Rng rng(noise::derive_seed(seed, 0xD1CEULL));
    RotationTuple truth(g.num_nodes);
    for (auto& r : truth) r = noise::sample_uniform(g.n, rng);
    return synthesize(g, truth, seed, noiseless);
}

RotationTuple eig_sync(const ProblemInstance& inst, bool anchored) {
    const auto& g = inst.graph;
    if (!graphcore::is_connected(g)) {
        throw IllPosedError("eig_sync: measurement graph must be connected");
    }
    if (anchored && g.anchors.empty()) {
        throw IllPosedError("eig_sync: anchored mode needs anchors");
    }
    const int n = g.n;
    const int big = n * g.num_nodes;

    Matrix block = Matrix::Zero(big, big);
    for (const auto& [key, h] : inst.measurements) {
        const auto [i, j] = key;
        block.block(i * n, j * n, n, n) = h;
        block.block(j * n, i * n, n, n) = h.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(block);
    if (es.info() != Eigen::Success) throw Error("eig_sync: eigensolver failed");
    // Top n eigenvectors (solver sorts ascending).
    Matrix top = es.eigenvectors().rightCols(n);

    // The eigenbasis of the top eigenspace is only defined up to an O(n)
    // mixing; if it carries a reflection the blocks have negative
    // determinant. Flipping one column restores orientation.
    double det_majority = 0.0;
    for (int i = 0; i < g.num_nodes; ++i) {
        const double det = top.middleRows(i * n, n).determinant();
        det_majority += (det > 0.0) - (det < 0.0);
    }
    if (det_majority < 0.0) top.col(n - 1) *= -1.0;

    RotationTuple est(g.num_nodes);
    for (int i = 0; i < g.num_nodes; ++i) {
        est[i] = songeom::project_rotation(top.middleRows(i * n, n));
    }

    if (anchored) {
        // Single-rotation Procrustes over the anchor blocks fixes the gauge.
        Matrix sum = Matrix::Zero(n, n);
        for (int a : g.anchors) sum += est[a].transpose() * inst.truth[a];
        const Matrix q = songeom::project_rotation(sum);
        for (auto& r : est) r = r * q;
        for (int a : g.anchors) est[a] = inst.truth[a];
    }
    return est;
}

TrialResult evaluate(const ProblemInstance& inst, const RotationTuple& est, bool anchored,
                     const std::vector<std::pair<int, int>>& pairs) {
    const auto& g = inst.graph;
    if (static_cast<int>(est.size()) != g.num_nodes) {
        throw DimensionError("evaluate: estimate size must match node count");
    }
    TrialResult res;
    res.per_node_sq.assign(g.num_nodes, 0.0);

    RotationTuple aligned = est;
    if (!anchored) {
        const auto alignment = songeom::align_quotient(inst.truth, est);
        for (auto& r : aligned) r = r * alignment.q;
    }
    for (int i = 0; i < g.num_nodes; ++i) {
        res.per_node_sq[i] =
            sq(safe_dist(inst.truth[i], aligned[i], &res.cut_locus_saturated));
    }
    if (anchored) {
        for (int a : g.anchors) res.per_node_sq[a] = 0.0;
    }
    res.total_sq = 0.0;
    for (double v : res.per_node_sq) res.total_sq += v;

    for (const auto& [i, j] : pairs) {
        const Matrix rel_true = inst.truth[i] * inst.truth[j].transpose();
        const Matrix rel_est = est[i] * est[j].transpose();
        res.pair_sq[{i, j}] = sq(safe_dist(rel_true, rel_est, &res.cut_locus_saturated));
    }
    return res;
}

ExperimentResult run_experiment(const MeasurementGraph& g, const ExperimentConfig& config,
                                const noise::QuadratureSpec& spec) {
    if (config.trials < 1) throw Error("run_experiment: trials must be >= 1");

    ExperimentResult out;
    out.report = config.anchored ? crb::crb_anchored(g, config.corrected, spec)
                                 : crb::crb_anchorfree(g, config.corrected, spec);
    out.trials = config.trials;
    out.baseline = out.report.baseline;
    out.mean_per_node_sq.assign(g.num_nodes, 0.0);

    auto run_trial = [&g, &config](int t) {
        const std::uint64_t trial_seed = noise::derive_seed(config.seed, t);
        const auto inst = synthesize_random(g, trial_seed, config.noiseless);
        const auto est = eig_sync(inst, config.anchored);
        return evaluate(inst, est, config.anchored, config.pairs);
    };

    std::vector<TrialResult> results(config.trials);
    const int workers = std::clamp(config.threads, 1, config.trials);
    if (workers == 1) {
        for (int t = 0; t < config.trials; ++t) results[t] = run_trial(t);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (int t = next.fetch_add(1); t < config.trials; t = next.fetch_add(1)) {
                    results[t] = run_trial(t);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Fixed reduction order keeps the aggregate bitwise deterministic.
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& trial : results) {
        sum += trial.total_sq;
        sum_sq += sq(trial.total_sq);
        for (int i = 0; i < g.num_nodes; ++i) out.mean_per_node_sq[i] += trial.per_node_sq[i];
        for (const auto& [key, v] : trial.pair_sq) out.mean_pair_sq[key] += v;
    }
    const double trials = config.trials;
    out.mean_total_sq = sum / trials;
    for (auto& v : out.mean_per_node_sq) v /= trials;
    for (auto& [key, v] : out.mean_pair_sq) v /= trials;
    if (config.trials > 1) {
        const double var = std::max(0.0, sum_sq / trials - sq(out.mean_total_sq));
        out.stderr_total_sq = std::sqrt(var / (trials - 1.0));
    }
    if (config.noiseless) {
        // Exact measurements: report exact zeros instead of solver dust.
        auto snap = [](double& v) {
            if (v < 1e-16) v = 0.0;
        };
        snap(out.mean_total_sq);
        snap(out.stderr_total_sq);
        for (auto& v : out.mean_per_node_sq) snap(v);
        for (auto& [key, v] : out.mean_pair_sq) snap(v);
    }
    return out;
}

MeasurementGraph random_graph(const GraphParams& params, const noise::NoiseModel& model,
                              std::uint64_t seed, bool require_connected) {
    if (params.num_nodes < 2) throw DimensionError("random_graph: need at least two nodes");
    if (params.model == GraphModel::ErdosRenyi && (params.q < 0.0 || params.q > 1.0)) {
        throw Error("random_graph: q must be in [0, 1]");
    }
    if (params.model == GraphModel::Clustered &&
        (params.clusters < 1 || params.p_in < 0.0 || params.p_in > 1.0 || params.p_out < 0.0 ||
         params.p_out > 1.0)) {
        throw Error("random_graph: invalid clustered-graph parameters");
    }

    for (int attempt = 0; attempt < 100; ++attempt) {
        noise::Rng rng(noise::derive_seed(seed, attempt));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        MeasurementGraph g;
        g.num_nodes = params.num_nodes;
        g.n = model.n;
        for (int i = 0; i < params.num_nodes; ++i) {
            for (int j = i + 1; j < params.num_nodes; ++j) {
                double p_edge = 1.0;
                switch (params.model) {
                    case GraphModel::Complete:
                        p_edge = 1.0;
                        break;
                    case GraphModel::ErdosRenyi:
                        p_edge = params.q;
                        break;
                    case GraphModel::Clustered: {
                        const int ci = i * params.clusters / params.num_nodes;
                        const int cj = j * params.clusters / params.num_nodes;
                        p_edge = (ci == cj) ? params.p_in : params.p_out;
                        break;
                    }
                }
                if (p_edge >= 1.0 || unif(rng) < p_edge) {
                    g.edges.push_back({i, j, model});
                }
            }
        }
        if (!require_connected || graphcore::is_connected(g)) return g;
    }
    throw IllPosedError("random_graph: no connected sample in 100 attempts");
}

}  // namespace rotsync::sync

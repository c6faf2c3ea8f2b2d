#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "rotsync/crb.hpp"
#include "rotsync/graphcore.hpp"
#include "rotsync/songeom.hpp"

// Monte Carlo validation harness: problem synthesis, the spectral
// (eigenvector) synchronization estimator, aligned error measurement and
// CRB-vs-MSE aggregation.
namespace rotsync::sync {

using Matrix = Eigen::MatrixXd;
using graphcore::MeasurementGraph;
using songeom::RotationTuple;

struct ProblemInstance {
    MeasurementGraph graph;
    RotationTuple truth;
    /// H_ij for i < j keyed by (i, j); consumers derive H_ji = H_ij^T.
    std::map<std::pair<int, int>, Matrix> measurements;
    std::uint64_t seed = 0;
};

/// Draws Z_ij from each edge's model and sets H_ij = Z_ij R_i R_j^T.
/// Deterministic given seed. noiseless forces Z = I on every edge.
ProblemInstance synthesize(const MeasurementGraph& g, const RotationTuple& truth,
                           std::uint64_t seed, bool noiseless = false);

/// As above with Haar-uniform truth (anchors included; they are whatever
/// was drawn, and anchored consumers treat them as known).
ProblemInstance synthesize_random(const MeasurementGraph& g, std::uint64_t seed,
                                  bool noiseless = false);

/// Spectral (eigenvector) synchronization: top-n eigenvectors of the block
/// measurement matrix, blocks projected to SO(n). Anchored mode Procrustes-
/// aligns to the anchors and then overwrites them with their true values.
RotationTuple eig_sync(const ProblemInstance& inst, bool anchored);

struct TrialResult {
    std::vector<double> per_node_sq;                  ///< squared geodesic errors
    double total_sq = 0.0;                            ///< aligned (anchor-free) or summed
    std::map<std::pair<int, int>, double> pair_sq;    ///< relative-rotation errors
    bool cut_locus_saturated = false;                 ///< some distance clamped to pi-range
};

/// Per-node and per-pair squared errors. Anchor-free mode Karcher-aligns
/// the estimate to the truth first.
TrialResult evaluate(const ProblemInstance& inst, const RotationTuple& est, bool anchored,
                     const std::vector<std::pair<int, int>>& pairs = {});

struct ExperimentConfig {
    int trials = 1;
    std::uint64_t seed = 0;
    bool anchored = false;
    bool corrected = false;
    bool noiseless = false;
    int threads = 1;  ///< worker threads for trials; aggregation order is fixed
    std::vector<std::pair<int, int>> pairs;
};

struct ExperimentResult {
    crb::CrbReport report;
    int trials = 0;
    double mean_total_sq = 0.0;
    double stderr_total_sq = 0.0;
    std::vector<double> mean_per_node_sq;
    std::map<std::pair<int, int>, double> mean_pair_sq;
    double baseline = 0.0;  ///< N' * V_n
};

/// Runs independent trials (stream seeds derived from seed + trial index),
/// averaging empirical errors against the CRB report for the same graph.
ExperimentResult run_experiment(const MeasurementGraph& g, const ExperimentConfig& config,
                                const noise::QuadratureSpec& spec = {});

enum class GraphModel { Complete, ErdosRenyi, Clustered };

struct GraphParams {
    GraphModel model = GraphModel::Complete;
    int num_nodes = 0;
    double q = 1.0;      ///< edge probability (ErdosRenyi)
    int clusters = 1;    ///< Clustered
    double p_in = 1.0;   ///< within-cluster edge probability
    double p_out = 0.0;  ///< between-cluster edge probability
};

/// Random graph with the given noise model on every edge; resamples up to
/// 100 times if a connected graph is required but not obtained.
MeasurementGraph random_graph(const GraphParams& params, const noise::NoiseModel& model,
                              std::uint64_t seed, bool require_connected = true);

}  // namespace rotsync::sync

#pragma once

#include <optional>
#include <vector>

#include "rotsync/graphcore.hpp"

// Fisher information assembly and Cramer-Rao bound evaluation: anchored and
// anchor-free bounds, curvature corrections for n=3, SNR, the random-guess
// baseline, and the outlier-tolerance threshold.
namespace rotsync::crb {

using Matrix = Eigen::MatrixXd;
using graphcore::MeasurementGraph;

/// Implicit F = (1/d)(L (x) I_d); materialization for dN <= 3000.
struct FisherMatrix {
    int n = 0;
    int d = 0;
    int num_nodes = 0;
    bool anchored = false;
    Matrix laplacian;  ///< plain or masked factor

    Matrix materialize() const;
};

FisherMatrix fisher_matrix(const MeasurementGraph& g, bool anchored,
                           const noise::QuadratureSpec& spec = {});

enum class CrbMode { Anchored, AnchorFree };

struct CrbReport {
    CrbMode mode = CrbMode::AnchorFree;
    int n = 0;
    int num_nodes = 0;
    int d = 0;
    bool corrected = false;
    double total = 0.0;                 ///< squared geodesic units
    std::vector<double> per_node;       ///< anchored mode; anchors report 0
    double snr = 0.0;
    double baseline = 0.0;              ///< N' * V_n compactness ceiling
    bool within_validity = true;        ///< false when total exceeds baseline
    graphcore::SpectralKernel kernel;   ///< for pair-bound queries

    /// Anchor-free pair bound d^2 (e_i - e_j)^T L^dag (e_i - e_j);
    /// uncorrected (no corrected pair form is defined).
    double pair_bound(int i, int j) const;
};

/// Anchored CRB. Requires an anchor in every connected component.
/// corrected applies the n=3 curvature term (identically zero for n=2).
CrbReport crb_anchored(const MeasurementGraph& g, bool corrected,
                       const noise::QuadratureSpec& spec = {});

/// Anchor-free CRB. Requires a connected graph.
CrbReport crb_anchorfree(const MeasurementGraph& g, bool corrected,
                         const noise::QuadratureSpec& spec = {});

/// (N' * V_n) / (d^2 trace L^dag) with N' = N-1 (anchor-free) or N-|A|.
double snr_anchorfree(const MeasurementGraph& g, const noise::QuadratureSpec& spec = {});
double snr_anchored(const MeasurementGraph& g, const noise::QuadratureSpec& spec = {});

/// Variance of a uniformly-random guess: V_2 = 2 pi^2/3, V_3 = 2 pi^2/3 + 4;
/// other n by Weyl quadrature of dist^2(Z, I).
double baseline_variance(int n, const noise::QuadratureSpec& spec = {});

/// Minimal inlier probability p_eps = d / (sqrt(a_{n,kappa}) eps) * sqrt(N / (2M)).
double outlier_threshold(int n, double kappa, double eps, int num_nodes, long num_edges,
                         const noise::QuadratureSpec& spec = {});

}  // namespace rotsync::crb

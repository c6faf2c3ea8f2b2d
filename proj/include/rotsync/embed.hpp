#pragma once

#include <vector>

#include "rotsync/crb.hpp"
#include "rotsync/graphcore.hpp"

// ECTD/PCA embedding of measurement graphs: node coordinates whose
// Euclidean distances realize the commute-time distance, for export to
// plotting consumers.
namespace rotsync::embed {

using Matrix = Eigen::MatrixXd;

struct Embedding {
    Matrix coordinates;      ///< N x k; anchors at the origin when anchored
    double explained_ratio;  ///< sum of the leading lambda^dag over trace
    int dim;
};

/// X = (D^dag)^{1/2} V^T with rows ordered by decreasing lambda^dag,
/// truncated to dim rows. Axes are sign-fixed so the largest-magnitude
/// entry is positive (ties broken by ascending node index).
Embedding ectd_embed(const graphcore::SpectralKernel& kernel, int dim);

/// Per-node marker areas proportional to the anchored per-node bound.
std::vector<double> node_marker_sizes(const crb::CrbReport& report);

}  // namespace rotsync::embed

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rotsync/errors.hpp"
#include "rotsync/noise.hpp"

// The measurement graph and its spectral machinery: information-weighted
// Laplacian, anchor-masked Laplacian, pseudoinverse / trace / Fiedler
// queries and commute-time distances.
namespace rotsync::graphcore {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Edge {
    int i;  ///< 0-based, i < j
    int j;
    noise::NoiseModel model;
};

struct MeasurementGraph {
    int num_nodes = 0;
    int n = 3;  ///< rotation dimension shared by all edge models
    std::vector<Edge> edges;
    std::vector<int> anchors;  ///< sorted, 0-based

    /// Throws on self-loops, duplicate (unordered) edges, out-of-range
    /// indices, or edge models of mismatched dimension.
    void validate() const;

    std::vector<int> neighbors(int node) const;
};

/// Connected components as a component id per node.
std::vector<int> connected_components(const MeasurementGraph& g);
bool is_connected(const MeasurementGraph& g);
bool every_component_anchored(const MeasurementGraph& g);

struct WeightedLaplacian {
    Matrix matrix;
    std::vector<double> weights;  ///< one per edge, same order as g.edges
};

struct MaskedLaplacian {
    Matrix matrix;
    std::vector<int> anchors;
};

WeightedLaplacian build_laplacian(const MeasurementGraph& g,
                                  const noise::QuadratureSpec& spec = {});

/// Zeroes anchor rows and columns (L_A).
MaskedLaplacian mask_anchors(const WeightedLaplacian& lap, const std::vector<int>& anchors);

/// Cached symmetric eigendecomposition of a (possibly masked) Laplacian.
/// Immutable after construction; safe for concurrent reads.
class SpectralKernel {
public:
    SpectralKernel() = default;  ///< empty kernel; fill via build()

    static SpectralKernel build(const WeightedLaplacian& lap);
    static SpectralKernel build(const MaskedLaplacian& lap);

    int size() const { return static_cast<int>(eigenvalues_.size()); }
    bool masked() const { return masked_; }
    const std::vector<int>& anchors() const { return anchors_; }
    const Vector& eigenvalues() const { return eigenvalues_; }
    const Matrix& eigenvectors() const { return eigenvectors_; }
    double rank_cutoff() const { return cutoff_; }

    Matrix pinv() const;
    double pinv_entry(int i, int j) const;
    double trace_pinv() const;

    /// Second-smallest eigenvalue; plain Laplacian kernels only.
    double fiedler_value() const;
    Vector fiedler_vector() const;

    /// Squared ECTD quadratic form (e_i - e_j)^T L^dag (e_i - e_j).
    double ectd_quad(int i, int j) const;

    /// (L_A^dag)_ii for a non-anchor node of a masked kernel.
    /// Anchor nodes are zero by definition and rejected.
    double anchored_diag(int i) const;

private:
    static SpectralKernel decompose(const Matrix& m, bool masked, std::vector<int> anchors);

    Vector eigenvalues_;
    Matrix eigenvectors_;
    double cutoff_ = 0.0;
    bool masked_ = false;
    std::vector<int> anchors_;
};

}  // namespace rotsync::graphcore

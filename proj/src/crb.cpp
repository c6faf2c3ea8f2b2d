#include "rotsync/crb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rotsync/songeom.hpp"

namespace rotsync::crb {

namespace {

constexpr double kPi = std::numbers::pi;

void check_positive_weights(const graphcore::WeightedLaplacian& lap) {
    for (double w : lap.weights) {
        if (w <= 0.0) {
            throw IllPosedError("crb: an edge carries zero information weight "
                                "(uniform noise disconnects the graph)");
        }
    }
}

/// Per-node bounds for the curvature-corrected n=3 matrix bound
/// 3 (P - (1/4)(ddiag(P) P + P ddiag(P))) (x) I_3 with P the pseudoinverse.
std::vector<double> corrected_per_node_so3(const Matrix& pinv) {
    const int num = static_cast<int>(pinv.rows());
    const Eigen::VectorXd diag = pinv.diagonal();
    std::vector<double> out(num);
    for (int i = 0; i < num; ++i) {
        // Block trace of the i-th 3x3 block: 3 * 3 * (P_ii - (1/2) P_ii^2).
        out[i] = 9.0 * (diag(i) - 0.5 * diag(i) * diag(i));
    }
    return out;
}

}  // namespace

Matrix FisherMatrix::materialize() const {
    if (d * num_nodes > 3000) {
        throw DimensionError("FisherMatrix: materialization limited to d*N <= 3000");
    }
    Matrix f = Matrix::Zero(d * num_nodes, d * num_nodes);
    for (int i = 0; i < num_nodes; ++i) {
        for (int j = 0; j < num_nodes; ++j) {
            if (laplacian(i, j) != 0.0) {
                f.block(i * d, j * d, d, d) =
                    (laplacian(i, j) / d) * Matrix::Identity(d, d);
            }
        }
    }
    return f;
}

FisherMatrix fisher_matrix(const MeasurementGraph& g, bool anchored,
                           const noise::QuadratureSpec& spec) {
    const auto lap = graphcore::build_laplacian(g, spec);
    FisherMatrix f;
    f.n = g.n;
    f.d = songeom::lie_dim(g.n);
    f.num_nodes = g.num_nodes;
    f.anchored = anchored;
    if (anchored) {
        if (g.anchors.empty()) throw IllPosedError("fisher_matrix: anchored mode needs anchors");
        f.laplacian = graphcore::mask_anchors(lap, g.anchors).matrix;
    } else {
        f.laplacian = lap.matrix;
    }
    return f;
}

double CrbReport::pair_bound(int i, int j) const {
    if (mode != CrbMode::AnchorFree) {
        throw IllPosedError("pair_bound: defined for anchor-free reports");
    }
    return static_cast<double>(d) * d * kernel.ectd_quad(i, j);
}

CrbReport crb_anchored(const MeasurementGraph& g, bool corrected,
                       const noise::QuadratureSpec& spec) {
    g.validate();
    if (!graphcore::every_component_anchored(g)) {
        throw IllPosedError("crb_anchored: every connected component needs an anchor");
    }
    if (corrected && g.n > 3) {
        throw IllPosedError("crb_anchored: curvature correction implemented for n in {2,3}");
    }
    const auto lap = graphcore::build_laplacian(g, spec);
    check_positive_weights(lap);
    const auto masked = graphcore::mask_anchors(lap, g.anchors);

    CrbReport rep;
    rep.mode = CrbMode::Anchored;
    rep.n = g.n;
    rep.num_nodes = g.num_nodes;
    rep.d = songeom::lie_dim(g.n);
    rep.corrected = corrected && g.n == 3;  // n=2 correction is identically zero
    rep.kernel = graphcore::SpectralKernel::build(masked);

    if (rep.corrected) {
        rep.per_node = corrected_per_node_so3(rep.kernel.pinv());
    } else {
        rep.per_node.resize(g.num_nodes);
        for (int i = 0; i < g.num_nodes; ++i) {
            rep.per_node[i] =
                static_cast<double>(rep.d) * rep.d * rep.kernel.pinv_entry(i, i);
        }
    }
    for (int a : g.anchors) rep.per_node[a] = 0.0;
    rep.total = 0.0;
    for (double b : rep.per_node) rep.total += b;

    const double n_free = g.num_nodes - static_cast<double>(g.anchors.size());
    rep.baseline = n_free * baseline_variance(g.n, spec);
    const double tr = rep.kernel.trace_pinv();
    rep.snr = (tr > 0.0) ? n_free * baseline_variance(g.n, spec) /
                               (static_cast<double>(rep.d) * rep.d * tr)
                         : std::numeric_limits<double>::infinity();
    rep.within_validity = rep.total <= rep.baseline;
    return rep;
}

CrbReport crb_anchorfree(const MeasurementGraph& g, bool corrected,
                         const noise::QuadratureSpec& spec) {
    g.validate();
    if (!graphcore::is_connected(g)) {
        throw IllPosedError("crb_anchorfree: measurement graph must be connected");
    }
    if (corrected && g.n > 3) {
        throw IllPosedError("crb_anchorfree: curvature correction implemented for n in {2,3}");
    }
    const auto lap = graphcore::build_laplacian(g, spec);
    check_positive_weights(lap);

    CrbReport rep;
    rep.mode = CrbMode::AnchorFree;
    rep.n = g.n;
    rep.num_nodes = g.num_nodes;
    rep.d = songeom::lie_dim(g.n);
    rep.corrected = corrected && g.n == 3;
    rep.kernel = graphcore::SpectralKernel::build(lap);

    if (rep.corrected) {
        // Anchored correction reused with the plain pseudoinverse; the extra
        // quotient-curvature term decays as 1/N and is dropped.
        const auto per_node = corrected_per_node_so3(rep.kernel.pinv());
        rep.total = 0.0;
        for (double b : per_node) rep.total += b;
    } else {
        rep.total = static_cast<double>(rep.d) * rep.d * rep.kernel.trace_pinv();
    }

    rep.baseline = (g.num_nodes - 1) * baseline_variance(g.n, spec);
    rep.snr = (g.num_nodes - 1) * baseline_variance(g.n, spec) /
              (static_cast<double>(rep.d) * rep.d * rep.kernel.trace_pinv());
    rep.within_validity = rep.total <= rep.baseline;
    return rep;
}

double snr_anchorfree(const MeasurementGraph& g, const noise::QuadratureSpec& spec) {
    return crb_anchorfree(g, false, spec).snr;
}

double snr_anchored(const MeasurementGraph& g, const noise::QuadratureSpec& spec) {
    return crb_anchored(g, false, spec).snr;
}

double baseline_variance(int n, const noise::QuadratureSpec& spec) {
    if (n == 2) return 2.0 * kPi * kPi / 3.0;
    if (n == 3) return 2.0 * kPi * kPi / 3.0 + 4.0;
    // Weyl quadrature of dist^2(Z, I); computed from the eigenvalue angles
    // so the half-turn boundary of the torus parameterization is harmless.
    return noise::weyl_integrate(
        n,
        [](const Matrix& z) {
            Eigen::ComplexEigenSolver<Matrix> es(z, /*computeEigenvectors=*/false);
            double sq = 0.0;
            for (int i = 0; i < z.rows(); ++i) {
                const double angle = std::arg(es.eigenvalues()(i));
                sq += angle * angle;
            }
            return sq;
        },
        spec);
}

double outlier_threshold(int n, double kappa, double eps, int num_nodes, long num_edges,
                         const noise::QuadratureSpec& spec) {
    if (eps <= 0.0) throw Error("outlier_threshold: eps must be > 0");
    if (num_edges < 1) throw Error("outlier_threshold: need at least one edge");
    const double a = noise::outlier_slope(n, kappa, spec);
    const double d = songeom::lie_dim(n);
    return d / (std::sqrt(a) * eps) * std::sqrt(static_cast<double>(num_nodes) /
                                                (2.0 * static_cast<double>(num_edges)));
}

}  // namespace rotsync::crb

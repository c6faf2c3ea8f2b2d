#include "rotsync/embed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rotsync::embed {

Embedding ectd_embed(const graphcore::SpectralKernel& kernel, int dim) {
    if (dim < 1) throw DimensionError("ectd_embed: dim must be >= 1");
    const int num = kernel.size();
    const auto& lam = kernel.eigenvalues();
    const auto& vec = kernel.eigenvectors();

    // Axes sorted by decreasing lambda^dag (only eigenvalues above cutoff
    // contribute); the rank bounds the embedding dimension.
    std::vector<int> order;
    for (int i = 0; i < num; ++i) {
        if (lam(i) > kernel.rank_cutoff()) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&lam](int a, int b) { return lam(a) < lam(b); });
    const int rank = static_cast<int>(order.size());
    if (dim > rank) {
        throw DimensionError("ectd_embed: dim exceeds the kernel rank (" +
                             std::to_string(rank) + ")");
    }

    double trace_pinv = 0.0;
    for (int i : order) trace_pinv += 1.0 / lam(i);

    Embedding emb;
    emb.dim = dim;
    emb.coordinates = Matrix::Zero(num, dim);
    double leading = 0.0;
    for (int axis = 0; axis < dim; ++axis) {
        const int idx = order[axis];
        leading += 1.0 / lam(idx);
        Eigen::VectorXd col = vec.col(idx) / std::sqrt(lam(idx));
        // Sign fix: largest-magnitude entry positive, lowest index on ties.
        int arg = 0;
        for (int i = 1; i < num; ++i) {
            if (std::abs(col(i)) > std::abs(col(arg))) arg = i;
        }
        if (col(arg) < 0.0) col = -col;
        emb.coordinates.col(axis) = col;
    }
    emb.explained_ratio = leading / trace_pinv;

    if (kernel.masked()) {
        for (int a : kernel.anchors()) emb.coordinates.row(a).setZero();
    }
    return emb;
}

std::vector<double> node_marker_sizes(const crb::CrbReport& report) {
    if (report.mode != crb::CrbMode::Anchored) {
        throw IllPosedError("node_marker_sizes: requires an anchored report");
    }
    return report.per_node;
}

}  // namespace rotsync::embed

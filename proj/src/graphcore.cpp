#include "rotsync/graphcore.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace rotsync::graphcore {

namespace {

constexpr int kMaxDenseNodes = 5000;

void check_node(int node, int num_nodes, const char* op) {
    if (node < 0 || node >= num_nodes) {
        throw DimensionError(std::string(op) + ": node index out of range");
    }
}

}  // namespace

void MeasurementGraph::validate() const {
    if (num_nodes < 1) throw DimensionError("graph: need at least one node");
    if (n < 2) throw DimensionError("graph: rotation dimension must be >= 2");
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
        check_node(e.i, num_nodes, "graph edge");
        check_node(e.j, num_nodes, "graph edge");
        if (e.i == e.j) throw DimensionError("graph: self-loops are not allowed");
        const auto key = std::minmax(e.i, e.j);
        if (!seen.insert(key).second) {
            throw DimensionError("graph: duplicate edge between nodes " +
                                 std::to_string(key.first + 1) + " and " +
                                 std::to_string(key.second + 1));
        }
        if (e.model.n != n) throw DimensionError("graph: edge model dimension mismatch");
    }
    for (int a : anchors) check_node(a, num_nodes, "graph anchor");
}

std::vector<int> MeasurementGraph::neighbors(int node) const {
    check_node(node, num_nodes, "neighbors");
    std::vector<int> out;
    for (const auto& e : edges) {
        if (e.i == node) out.push_back(e.j);
        if (e.j == node) out.push_back(e.i);
    }
    return out;
}

std::vector<int> connected_components(const MeasurementGraph& g) {
    std::vector<std::vector<int>> adj(g.num_nodes);
    for (const auto& e : g.edges) {
        adj[e.i].push_back(e.j);
        adj[e.j].push_back(e.i);
    }
    std::vector<int> comp(g.num_nodes, -1);
    int next = 0;
    std::vector<int> stack;
    for (int s = 0; s < g.num_nodes; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : adj[u]) {
                if (comp[v] < 0) {
                    comp[v] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    return comp;
}

bool is_connected(const MeasurementGraph& g) {
    const auto comp = connected_components(g);
    return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

bool every_component_anchored(const MeasurementGraph& g) {
    if (g.anchors.empty()) return false;
    const auto comp = connected_components(g);
    std::set<int> anchored;
    for (int a : g.anchors) anchored.insert(comp[a]);
    for (int c : comp) {
        if (!anchored.count(c)) return false;
    }
    return true;
}

WeightedLaplacian build_laplacian(const MeasurementGraph& g, const noise::QuadratureSpec& spec) {
    g.validate();
    WeightedLaplacian lap;
    lap.matrix = Matrix::Zero(g.num_nodes, g.num_nodes);
    lap.weights.reserve(g.edges.size());
    for (const auto& e : g.edges) {
        const double w = noise::info_weight(e.model, spec);
        lap.weights.push_back(w);
        lap.matrix(e.i, e.j) -= w;
        lap.matrix(e.j, e.i) -= w;
        lap.matrix(e.i, e.i) += w;
        lap.matrix(e.j, e.j) += w;
    }
    return lap;
}

MaskedLaplacian mask_anchors(const WeightedLaplacian& lap, const std::vector<int>& anchors) {
    const int num_nodes = static_cast<int>(lap.matrix.rows());
    MaskedLaplacian out;
    out.matrix = lap.matrix;
    out.anchors = anchors;
    std::sort(out.anchors.begin(), out.anchors.end());
    for (int a : out.anchors) {
        check_node(a, num_nodes, "mask_anchors");
        out.matrix.row(a).setZero();
        out.matrix.col(a).setZero();
    }
    return out;
}

SpectralKernel SpectralKernel::decompose(const Matrix& m, bool masked, std::vector<int> anchors) {
    const int num_nodes = static_cast<int>(m.rows());
    if (num_nodes > kMaxDenseNodes) {
        throw DimensionError("spectral_kernel: dense eigendecomposition limited to N <= 5000");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success) throw Error("spectral_kernel: eigensolver failed");
    SpectralKernel k;
    k.eigenvalues_ = es.eigenvalues();
    k.eigenvectors_ = es.eigenvectors();
    const double lam_max = k.eigenvalues_.cwiseAbs().maxCoeff();
    k.cutoff_ = num_nodes * std::numeric_limits<double>::epsilon() * lam_max;
    k.masked_ = masked;
    k.anchors_ = std::move(anchors);
    return k;
}

SpectralKernel SpectralKernel::build(const WeightedLaplacian& lap) {
    return decompose(lap.matrix, false, {});
}

SpectralKernel SpectralKernel::build(const MaskedLaplacian& lap) {
    return decompose(lap.matrix, true, lap.anchors);
}

Matrix SpectralKernel::pinv() const {
    Vector inv = Vector::Zero(size());
    for (int i = 0; i < size(); ++i) {
        if (eigenvalues_(i) > cutoff_) inv(i) = 1.0 / eigenvalues_(i);
    }
    return eigenvectors_ * inv.asDiagonal() * eigenvectors_.transpose();
}

double SpectralKernel::pinv_entry(int i, int j) const {
    check_node(i, size(), "pinv_entry");
    check_node(j, size(), "pinv_entry");
    double sum = 0.0;
    for (int k = 0; k < size(); ++k) {
        if (eigenvalues_(k) > cutoff_) {
            sum += eigenvectors_(i, k) * eigenvectors_(j, k) / eigenvalues_(k);
        }
    }
    return sum;
}

double SpectralKernel::trace_pinv() const {
    double sum = 0.0;
    for (int k = 0; k < size(); ++k) {
        if (eigenvalues_(k) > cutoff_) sum += 1.0 / eigenvalues_(k);
    }
    return sum;
}

double SpectralKernel::fiedler_value() const {
    if (masked_) throw IllPosedError("fiedler_value: defined for plain Laplacian kernels only");
    if (size() < 2) throw DimensionError("fiedler_value: need at least two nodes");
    Vector sorted = eigenvalues_;
    std::sort(sorted.data(), sorted.data() + sorted.size());
    return sorted(1);
}

Vector SpectralKernel::fiedler_vector() const {
    if (masked_) throw IllPosedError("fiedler_vector: defined for plain Laplacian kernels only");
    if (size() < 2) throw DimensionError("fiedler_vector: need at least two nodes");
    // Eigenvalues are sorted ascending by the solver.
    return eigenvectors_.col(1);
}

double SpectralKernel::ectd_quad(int i, int j) const {
    check_node(i, size(), "ectd_quad");
    check_node(j, size(), "ectd_quad");
    if (i == j) throw DimensionError("ectd_quad: i and j must differ");
    double sum = 0.0;
    for (int k = 0; k < size(); ++k) {
        if (eigenvalues_(k) > cutoff_) {
            const double c = eigenvectors_(i, k) - eigenvectors_(j, k);
            sum += c * c / eigenvalues_(k);
        }
    }
    return sum;
}

double SpectralKernel::anchored_diag(int i) const {
    if (!masked_) throw IllPosedError("anchored_diag: requires a masked kernel");
    check_node(i, size(), "anchored_diag");
    if (std::binary_search(anchors_.begin(), anchors_.end(), i)) {
        throw IllPosedError("anchored_diag: node is an anchor (bound is zero by definition)");
    }
    return pinv_entry(i, i);
}

}  // namespace rotsync::graphcore

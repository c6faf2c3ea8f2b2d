#include "rotsync/songeom.hpp"

#include <cmath>
#include <numbers>

namespace rotsync::songeom {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCutLocusTol = 1e-8;

void check_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 2) {
        throw DimensionError(std::string(what) + ": expected square matrix of size >= 2");
    }
}

void check_same_size(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("matrix dimensions do not match");
    }
}

}  // namespace

int lie_dim(int n) {
    if (n < 2) throw DimensionError("lie_dim: n must be >= 2");
    return n * (n - 1) / 2;
}

Matrix skew_part(const Matrix& a) { return 0.5 * (a - a.transpose()); }

bool is_rotation(const Matrix& r, double tol) {
    if (r.rows() != r.cols()) return false;
    const int n = static_cast<int>(r.rows());
    if ((r.transpose() * r - Matrix::Identity(n, n)).norm() > tol) return false;
    return std::abs(r.determinant() - 1.0) <= tol;
}

bool is_skew(const Matrix& omega, double tol) {
    if (omega.rows() != omega.cols()) return false;
    return (omega + omega.transpose()).norm() <= tol;
}

void check_rotation(const Matrix& r, double tol) {
    check_square(r, "check_rotation");
    if (!is_rotation(r, tol)) {
        throw DimensionError("matrix is not a rotation within tolerance");
    }
}

Matrix project_tangent(const Matrix& q, const Matrix& h) {
    check_square(q, "project_tangent");
    check_same_size(q, h);
    return skew_part(q.transpose() * h);
}

Matrix exp_skew(const Matrix& omega) {
    check_square(omega, "exp_skew");
    const int n = static_cast<int>(omega.rows());
    if (n == 2) {
        const double theta = omega(1, 0);
        Matrix r(2, 2);
        r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        return r;
    }
    if (n == 3) {
        // Rodrigues: theta is the 2-norm of the axis vector, ||Omega||_F / sqrt(2).
        const double theta = omega.norm() / std::sqrt(2.0);
        if (theta < 1e-12) {
            return Matrix::Identity(3, 3) + omega + 0.5 * omega * omega;
        }
        const double a = std::sin(theta) / theta;
        const double b = (1.0 - std::cos(theta)) / (theta * theta);
        return Matrix::Identity(3, 3) + a * omega + b * (omega * omega);
    }
    // Skew matrices are normal: exponentiate via the complex eigendecomposition.
    Eigen::ComplexEigenSolver<Matrix> es(omega);
    if (es.info() != Eigen::Success) throw Error("exp_skew: eigendecomposition failed");
    const auto& v = es.eigenvectors();
    Eigen::VectorXcd lam = es.eigenvalues();
    for (int i = 0; i < n; ++i) lam(i) = std::exp(lam(i));
    Eigen::MatrixXcd r = v * lam.asDiagonal() * v.adjoint();
    return r.real();
}

Matrix log_rotation(const Matrix& r) {
    check_square(r, "log_rotation");
    const int n = static_cast<int>(r.rows());
    if (n == 2) {
        const double theta = std::atan2(r(1, 0), r(0, 0));
        if (kPi - std::abs(theta) < kCutLocusTol) {
            throw CutLocusError("log_rotation: rotation angle within 1e-8 of pi");
        }
        Matrix omega(2, 2);
        omega << 0.0, -theta, theta, 0.0;
        return omega;
    }
    if (n == 3) {
        const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
        const double theta = std::acos(c);
        if (kPi - theta < kCutLocusTol) {
            throw CutLocusError("log_rotation: rotation angle within 1e-8 of pi");
        }
        if (theta < 1e-7) {
            // log(R) ~ skew(R) to third order near the identity.
            return skew_part(r);
        }
        return theta / (2.0 * std::sin(theta)) * (r - r.transpose());
    }
    Eigen::ComplexEigenSolver<Matrix> es(r);
    if (es.info() != Eigen::Success) throw Error("log_rotation: eigendecomposition failed");
    const auto& v = es.eigenvectors();
    Eigen::VectorXcd lam = es.eigenvalues();
    for (int i = 0; i < n; ++i) {
        const double angle = std::arg(lam(i));
        if (kPi - std::abs(angle) < kCutLocusTol) {
            throw CutLocusError("log_rotation: rotation angle within 1e-8 of pi");
        }
        lam(i) = std::complex<double>(0.0, angle);
    }
    Eigen::MatrixXcd l = v * lam.asDiagonal() * v.adjoint();
    // Round off the symmetric residue of the complex arithmetic.
    return skew_part(l.real());
}

Matrix exp_map(const Matrix& q, const Matrix& omega) {
    check_same_size(q, omega);
    return q * exp_skew(omega);
}

Matrix log_map(const Matrix& q1, const Matrix& q2) {
    check_same_size(q1, q2);
    return log_rotation(q1.transpose() * q2);
}

double geodesic_dist(const Matrix& q1, const Matrix& q2) {
    return log_map(q1, q2).norm();
}

std::vector<Matrix> canonical_basis(int n) {
    const int d = lie_dim(n);
    std::vector<Matrix> basis;
    basis.reserve(d);
    const double v = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            // Alternating sign reproduces the standard (E1, E2, E3) for n=3.
            const double s = ((i + j) % 2 == 1) ? v : -v;
            Matrix e = Matrix::Zero(n, n);
            e(i, j) = s;
            e(j, i) = -s;
            basis.push_back(std::move(e));
        }
    }
    return basis;
}

double dist_anchored(const RotationTuple& ref, const RotationTuple& est,
                     const std::vector<int>& anchors) {
    if (ref.size() != est.size() || ref.empty()) {
        throw DimensionError("dist_anchored: tuples must be non-empty and of equal length");
    }
    std::vector<bool> anchored(ref.size(), false);
    for (int a : anchors) {
        if (a < 0 || a >= static_cast<int>(ref.size())) {
            throw DimensionError("dist_anchored: anchor index out of range");
        }
        if ((ref[a] - est[a]).norm() > 1e-12) {
            throw IllPosedError("dist_anchored: estimate disagrees with reference on an anchor");
        }
        anchored[a] = true;
    }
    double sq = 0.0;
    for (size_t i = 0; i < ref.size(); ++i) {
        if (anchored[i]) continue;
        const double di = geodesic_dist(ref[i], est[i]);
        sq += di * di;
    }
    return std::sqrt(sq);
}

Matrix project_rotation(const Matrix& m) {
    check_square(m, "project_rotation");
    const int n = static_cast<int>(m.rows());
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix u = svd.matrixU();
    Matrix v = svd.matrixV();
    Matrix r = u * v.transpose();
    if (r.determinant() < 0.0) {
        // Flip the last singular direction (smallest singular value).
        u.col(n - 1) *= -1.0;
        r = u * v.transpose();
    }
    return r;
}

Alignment align_quotient(const RotationTuple& ref, const RotationTuple& est) {
    if (ref.size() != est.size() || ref.empty()) {
        throw DimensionError("align_quotient: tuples must be non-empty and of equal length");
    }
    const int num = static_cast<int>(ref.size());
    const int n = static_cast<int>(ref[0].rows());

    // Karcher mean of A_i = Rhat_i^T R_i, initialized from the projected sum.
    std::vector<Matrix> a(ref.size());
    Matrix sum = Matrix::Zero(n, n);
    for (int i = 0; i < num; ++i) {
        a[i] = est[i].transpose() * ref[i];
        sum += a[i];
    }
    Matrix q = (sum.norm() > 1e-12) ? project_rotation(sum) : Matrix::Identity(n, n);

    constexpr int kMaxIter = 200;
    for (int iter = 1; iter <= kMaxIter; ++iter) {
        Matrix mean = Matrix::Zero(n, n);
        for (int i = 0; i < num; ++i) {
            mean += log_rotation(q.transpose() * a[i]);
        }
        mean /= static_cast<double>(num);
        q = q * exp_skew(mean);
        if (mean.norm() < 1e-10) {
            double sq = 0.0;
            for (int i = 0; i < num; ++i) {
                sq += log_rotation(q.transpose() * a[i]).squaredNorm();
            }
            return Alignment{q, std::sqrt(sq), iter};
        }
    }
    throw ConvergenceError("align_quotient: Karcher iteration did not converge in 200 steps");
}

Matrix signed_permutation(int k, int l, int n) {
    const int d = lie_dim(n);
    if (k < 0 || l < 0 || k >= d || l >= d || k == l) {
        throw DimensionError("signed_permutation: invalid basis indices");
    }
    const auto basis = canonical_basis(n);
    const Matrix& ek = basis[k];
    const Matrix& el = basis[l];

    // Entry pairs (i,j) and (p,q) of the two basis elements.
    auto entry_pair = [n](int idx) {
        int c = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (c == idx) return std::pair<int, int>{i, j};
                ++c;
            }
        }
        throw DimensionError("signed_permutation: index out of range");
    };
    const auto [i, j] = entry_pair(k);
    const auto [p, q] = entry_pair(l);

    // Permutation part: map support {i,j} onto {p,q}, identity elsewhere.
    Matrix t = Matrix::Identity(n, n);
    auto swap_cols = [&t](int a, int b) {
        if (a != b) t.col(a).swap(t.col(b));
    };
    if (i != p && i != q && j != p && j != q) {
        swap_cols(i, p);
        swap_cols(j, q);
    } else if (i == p) {
        swap_cols(j, q);
    } else if (i == q) {
        swap_cols(j, p);
    } else if (j == p) {
        swap_cols(i, q);
    } else {  // j == q
        swap_cols(i, p);
    }

    // Search diagonal sign flips to satisfy both identities exactly.
    for (int mask = 0; mask < (1 << n); ++mask) {
        Matrix s = Matrix::Identity(n, n);
        for (int b = 0; b < n; ++b) {
            if (mask & (1 << b)) s(b, b) = -1.0;
        }
        const Matrix p_cand = t * s;
        if ((p_cand.transpose() * ek * p_cand - el).norm() < 1e-14 &&
            (p_cand.transpose() * el * p_cand + ek).norm() < 1e-14) {
            return p_cand;
        }
    }
    throw Error("signed_permutation: construction failed");
}

}  // namespace rotsync::songeom

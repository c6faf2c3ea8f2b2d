#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rotsync/errors.hpp"

// Riemannian geometry of SO(n) and of tuples of rotations: projections,
// exponential/logarithm maps, geodesic distances, canonical tangent bases,
// and the Karcher alignment used for anchor-free error evaluation.
namespace rotsync::songeom {

using Matrix = Eigen::MatrixXd;

/// Ordered tuple of rotations of equal dimension.
using RotationTuple = std::vector<Matrix>;

/// Dimension of the Lie algebra so(n): n(n-1)/2.
int lie_dim(int n);

/// Skew-symmetric part (A - A^T)/2.
Matrix skew_part(const Matrix& a);

bool is_rotation(const Matrix& r, double tol = 1e-12);
bool is_skew(const Matrix& omega, double tol = 1e-12);

/// Throws DimensionError if r is not special-orthogonal within tol.
void check_rotation(const Matrix& r, double tol = 1e-9);

/// Tangent projection at Q, returned as the skew factor skew(Q^T H),
/// so that the tangent vector itself is Q * project_tangent(Q, H).
Matrix project_tangent(const Matrix& q, const Matrix& h);

/// Matrix exponential of a skew-symmetric matrix (closed form for n=2,3,
/// eigendecomposition otherwise). Result is a rotation.
Matrix exp_skew(const Matrix& omega);

/// Principal matrix logarithm of a rotation. Throws CutLocusError when
/// some rotation angle is within 1e-8 of pi.
Matrix log_rotation(const Matrix& r);

/// Exp_Q(Q Omega) = Q expm(Omega).
Matrix exp_map(const Matrix& q, const Matrix& omega);

/// Skew factor of Log_{Q1}(Q2): log(Q1^T Q2).
Matrix log_map(const Matrix& q1, const Matrix& q2);

/// Geodesic distance ||log(Q1^T Q2)||_F.
double geodesic_dist(const Matrix& q1, const Matrix& q2);

/// Orthonormal basis (E_1, ..., E_d) of so(n) under <A,B> = tr(A^T B).
/// For n=3 this is the standard {E1,E2,E3} basis with entries +-1/sqrt(2),
/// elements ordered by their (row, col) entry pair lexicographically.
std::vector<Matrix> canonical_basis(int n);

/// Geodesic distance on the anchored product manifold:
/// sqrt(sum_{i not in A} ||log(R_i^T Rhat_i)||_F^2). Anchors must agree
/// between ref and est within 1e-12.
double dist_anchored(const RotationTuple& ref, const RotationTuple& est,
                     const std::vector<int>& anchors);

struct Alignment {
    Matrix q;      ///< minimizer of sum_i ||log(R_i^T Rhat_i Q)||_F^2
    double dist;   ///< minimized square root
    int iterations;
};

/// Quotient-space alignment: Karcher mean of {Rhat_i^T R_i}.
/// Throws ConvergenceError after 200 iterations without convergence.
Alignment align_quotient(const RotationTuple& ref, const RotationTuple& est);

/// Nearest rotation to M (polar factor with determinant correction).
/// Deterministic tie-break: the correction is applied to the last
/// singular direction.
Matrix project_rotation(const Matrix& m);

/// Test-support helper: a signed permutation P in O(n) with
/// P^T E_k P = E_l and P^T E_l P = -E_k for the canonical basis.
Matrix signed_permutation(int k, int l, int n);

}  // namespace rotsync::songeom

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "rotsync/noise.hpp"
#include "rotsync/songeom.hpp"

using rotsync::CutLocusError;
using rotsync::DimensionError;
using rotsync::IllPosedError;
using Matrix = Eigen::MatrixXd;
namespace sg = rotsync::songeom;
namespace noise = rotsync::noise;

namespace {

constexpr double kPi = 3.14159265358979323846;

Matrix random_skew(int n, noise::Rng& rng, double scale) {
    std::normal_distribution<double> g;
    Matrix a = Matrix::NullaryExpr(n, n, [&] { return g(rng); });
    Matrix omega = sg::skew_part(a);
    const double norm = omega.norm();
    if (norm > 0) omega *= scale / norm;
    return omega;
}

Matrix rot2(double theta) {
    Matrix r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

}  // namespace

TEST_CASE("lie_dim and skew_part basics") {
    CHECK(sg::lie_dim(2) == 1);
    CHECK(sg::lie_dim(3) == 3);
    CHECK(sg::lie_dim(4) == 6);
    noise::Rng rng(11);
    std::normal_distribution<double> g;
    Matrix a = Matrix::NullaryExpr(4, 4, [&] { return g(rng); });
    Matrix s = sg::skew_part(a);
    CHECK((s + s.transpose()).norm() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK((s - 0.5 * (a - a.transpose())).norm() < 1e-15);
}

TEST_CASE("exp_skew produces rotations and matches series") {
    noise::Rng rng(42);
    for (int n : {2, 3, 4, 5}) {
        for (int rep = 0; rep < 50; ++rep) {
            Matrix omega = random_skew(n, rng, 0.3 + 0.2 * rep / 50.0);
            Matrix r = sg::exp_skew(omega);
            CHECK(sg::is_rotation(r, 1e-10));
            // Independent oracle: truncated exponential series.
            Matrix series = Matrix::Identity(n, n);
            Matrix term = Matrix::Identity(n, n);
            for (int k = 1; k < 30; ++k) {
                term = term * omega / static_cast<double>(k);
                series += term;
            }
            CHECK((r - series).norm() < 1e-12);
        }
    }
}

TEST_CASE("log roundtrips exp below the cut locus") {
    noise::Rng rng(7);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int n : {2, 3, 4, 5}) {
        for (int rep = 0; rep < 250; ++rep) {
            // Frobenius radius of the injectivity domain is sqrt(2)*pi for a
            // single rotation plane; stay safely inside for every n.
            Matrix omega = random_skew(n, rng, u(rng) * std::sqrt(2.0) * kPi * 0.95);
            if (n >= 4) omega *= 0.6;  // multiple planes share the budget
            Matrix r = sg::exp_skew(omega);
            Matrix back = sg::log_rotation(r);
            CHECK((back - omega).norm() < 1e-8);
        }
    }
}

TEST_CASE("log_rotation throws at the cut locus") {
    Matrix r2 = rot2(kPi);
    CHECK_THROWS_AS(sg::log_rotation(r2), CutLocusError);
    Matrix r3 = Matrix::Identity(3, 3);
    r3(0, 0) = -1.0;
    r3(1, 1) = -1.0;  // rotation by pi about the z-axis
    CHECK_THROWS_AS(sg::log_rotation(r3), CutLocusError);
}

TEST_CASE("geodesic distance is sqrt(2) * angle for n = 2, 3") {
    noise::Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int rep = 0; rep < 200; ++rep) {
        const double theta = u(rng);
        CHECK(sg::geodesic_dist(Matrix::Identity(2, 2), rot2(theta)) ==
              doctest::Approx(std::sqrt(2.0) * theta).epsilon(1e-10));
        Matrix axis = random_skew(3, rng, std::sqrt(2.0));  // unit angle generator
        Matrix r = sg::exp_skew(theta * axis / std::sqrt(2.0) * std::sqrt(2.0));
        // angle of exp(theta * K) with ||K||_F = sqrt(2) is theta
        CHECK(sg::geodesic_dist(Matrix::Identity(3, 3), sg::exp_skew(theta * axis)) ==
              doctest::Approx(std::sqrt(2.0) * theta).epsilon(1e-9));
    }
}

TEST_CASE("metric properties and bi-invariance") {
    noise::Rng rng(99);
    for (int n : {2, 3, 4}) {
        for (int rep = 0; rep < 100; ++rep) {
            Matrix r1 = noise::sample_uniform(n, rng);
            Matrix r2 = noise::sample_uniform(n, rng);
            Matrix r3 = noise::sample_uniform(n, rng);
            Matrix q = noise::sample_uniform(n, rng);
            double d12 = 0.0;
            try {
                d12 = sg::geodesic_dist(r1, r2);
            } catch (const CutLocusError&) {
                continue;  // measure-zero event; skip the draw
            }
            CHECK(d12 >= 0.0);
            CHECK(sg::geodesic_dist(r1, r1) < 1e-12);
            try {
                CHECK(sg::geodesic_dist(r2, r1) == doctest::Approx(d12).epsilon(1e-9));
                // bi-invariance
                CHECK(sg::geodesic_dist(q * r1, q * r2) == doctest::Approx(d12).epsilon(1e-8));
                CHECK(sg::geodesic_dist(r1 * q, r2 * q) == doctest::Approx(d12).epsilon(1e-8));
                // triangle inequality
                const double d13 = sg::geodesic_dist(r1, r3);
                const double d32 = sg::geodesic_dist(r3, r2);
                CHECK(d12 <= d13 + d32 + 1e-9);
            } catch (const CutLocusError&) {
                continue;
            }
        }
    }
}

TEST_CASE("canonical basis is orthonormal and matches the n = 3 convention") {
    for (int n : {2, 3, 4, 5}) {
        auto basis = sg::canonical_basis(n);
        REQUIRE(static_cast<int>(basis.size()) == sg::lie_dim(n));
        for (size_t a = 0; a < basis.size(); ++a) {
            CHECK(sg::is_skew(basis[a], 1e-15));
            for (size_t b = 0; b < basis.size(); ++b) {
                const double ip = (basis[a].transpose() * basis[b]).trace();
                CHECK(ip == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-14));
            }
        }
    }
    auto b3 = sg::canonical_basis(3);
    const double s = 1.0 / std::sqrt(2.0);
    Matrix e1(3, 3), e2(3, 3), e3(3, 3);
    e1 << 0, s, 0, -s, 0, 0, 0, 0, 0;
    e2 << 0, 0, -s, 0, 0, 0, s, 0, 0;
    e3 << 0, 0, 0, 0, 0, s, 0, -s, 0;
    CHECK((b3[0] - e1).norm() < 1e-15);
    CHECK((b3[1] - e2).norm() < 1e-15);
    CHECK((b3[2] - e3).norm() < 1e-15);
}

TEST_CASE("project_tangent returns the skew factor and fixes tangent vectors") {
    noise::Rng rng(5);
    std::normal_distribution<double> g;
    for (int n : {2, 3, 4}) {
        Matrix q = noise::sample_uniform(n, rng);
        Matrix h = Matrix::NullaryExpr(n, n, [&] { return g(rng); });
        Matrix omega = sg::project_tangent(q, h);
        CHECK(sg::is_skew(omega, 1e-12));
        // Already-tangent input: Q * Omega0 projects to Omega0.
        Matrix omega0 = random_skew(n, rng, 0.7);
        CHECK((sg::project_tangent(q, q * omega0) - omega0).norm() < 1e-13);
    }
}

TEST_CASE("project_rotation recovers a perturbed rotation") {
    noise::Rng rng(13);
    std::normal_distribution<double> g;
    for (int n : {2, 3, 4}) {
        for (int rep = 0; rep < 50; ++rep) {
            Matrix r = noise::sample_uniform(n, rng);
            Matrix noise_m = Matrix::NullaryExpr(n, n, [&] { return 1e-4 * g(rng); });
            Matrix p = sg::project_rotation(r + noise_m);
            CHECK(sg::is_rotation(p, 1e-10));
            CHECK((p - r).norm() < 1e-3);
            // Projection with a flipped sign still lands on SO(n).
            Matrix m = Matrix::NullaryExpr(n, n, [&] { return g(rng); });
            CHECK(sg::is_rotation(sg::project_rotation(m), 1e-10));
        }
    }
}

TEST_CASE("dist_anchored decomposes over non-anchors") {
    noise::Rng rng(21);
    const int n = 3;
    sg::RotationTuple ref, est;
    for (int i = 0; i < 5; ++i) {
        ref.push_back(noise::sample_uniform(n, rng));
        est.push_back(noise::sample_uniform(n, rng));
    }
    std::vector<int> anchors = {0, 3};
    for (int a : anchors) est[a] = ref[a];
    double expect_sq = 0.0;
    for (int i : {1, 2, 4}) {
        const double d = sg::geodesic_dist(ref[i], est[i]);
        expect_sq += d * d;
    }
    CHECK(sg::dist_anchored(ref, est, anchors) ==
          doctest::Approx(std::sqrt(expect_sq)).epsilon(1e-10));
    // Disagreeing anchors are rejected.
    est[0] = noise::sample_uniform(n, rng);
    CHECK_THROWS_AS(sg::dist_anchored(ref, est, anchors), IllPosedError);
}

TEST_CASE("align_quotient undoes a global rotation exactly") {
    noise::Rng rng(31);
    const int n = 3;
    sg::RotationTuple ref;
    for (int i = 0; i < 6; ++i) ref.push_back(noise::sample_uniform(n, rng));
    Matrix q0 = noise::sample_uniform(n, rng);
    sg::RotationTuple est;
    for (const auto& r : ref) est.push_back(r * q0);
    auto al = sg::align_quotient(ref, est);
    CHECK(al.dist < 1e-8);
}

TEST_CASE("align_quotient distance is gauge invariant") {
    noise::Rng rng(37);
    const int n = 3;
    for (int rep = 0; rep < 20; ++rep) {
        sg::RotationTuple ref, est;
        for (int i = 0; i < 5; ++i) {
            ref.push_back(noise::sample_uniform(n, rng));
            // est = small perturbation of ref
            est.push_back(ref.back() * sg::exp_skew(random_skew(n, rng, 0.2)));
        }
        auto base = sg::align_quotient(ref, est);
        Matrix q = noise::sample_uniform(n, rng);
        sg::RotationTuple shifted;
        for (const auto& r : est) shifted.push_back(r * q);
        auto moved = sg::align_quotient(ref, shifted);
        CHECK(moved.dist == doctest::Approx(base.dist).epsilon(1e-7));
    }
}

TEST_CASE("signed_permutation conjugates basis elements as specified") {
    for (int n : {3, 4, 5}) {
        auto basis = sg::canonical_basis(n);
        const int d = sg::lie_dim(n);
        for (int k = 0; k < d; ++k) {
            for (int l = 0; l < d; ++l) {
                if (k == l) continue;
                Matrix p = sg::signed_permutation(k, l, n);
                CHECK((p.transpose() * p - Matrix::Identity(n, n)).norm() < 1e-14);
                CHECK((p.transpose() * basis[k] * p - basis[l]).norm() < 1e-13);
                CHECK((p.transpose() * basis[l] * p + basis[k]).norm() < 1e-13);
            }
        }
    }
}

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>

#include "rotsync/errors.hpp"
#include "rotsync/quadrature.hpp"

// Probability distributions on SO(n): densities, normalization constants,
// Haar/Weyl integration, samplers, score maps and the information weights
// they induce on measurement-graph edges.
namespace rotsync::noise {

using Matrix = Eigen::MatrixXd;
using quadrature::QuadratureSpec;

using Rng = std::mt19937_64;

/// Derives an independent stream seed from (master, index); trials run in
/// parallel must each construct their Rng from a distinct derived seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

enum class NoiseKind { Uniform, Langevin, LangevinOutlier, Exact };

/// Edge noise model. Exact is a noiseless surrogate (Z = I) used by the
/// simulation harness; it has no density and carries no information weight.
struct NoiseModel {
    NoiseKind kind = NoiseKind::Uniform;
    int n = 3;
    double kappa = 0.0;  ///< concentration (Langevin kinds)
    double p = 1.0;      ///< inlier probability (LangevinOutlier)

    static NoiseModel uniform(int n);
    static NoiseModel langevin(int n, double kappa);
    static NoiseModel langevin_outlier(int n, double kappa, double p);
    static NoiseModel exact(int n);
};

/// Integral of a class function g over SO(n) w.r.t. normalized Haar measure,
/// via the torus reduction (1-D for n=2,3; 2-D for n=4).
double weyl_integrate(int n, const std::function<double(const Matrix&)>& g,
                      const QuadratureSpec& spec = {});

/// Modified Bessel function of the first kind I_nu(x), nu >= 0 integer.
double bessel_i(int nu, double x);

/// exp(-x) * I_nu(x); safe for large x where I_nu itself overflows.
double bessel_i_scaled(int nu, double x);

/// Normalization constant c_n(kappa) for the Langevin density, n in {2,3,4}.
double normalizer(const NoiseModel& model);

/// log c_n(kappa); overflow-safe for large kappa.
double log_normalizer(const NoiseModel& model);

/// Density w.r.t. normalized Haar measure (spectral: depends on tr Z only).
double pdf(const NoiseModel& model, const Matrix& z);

/// Score map G(Z) in so(n) with grad log f(Z) = Z G(Z)^T.
Matrix score(const NoiseModel& model, const Matrix& z);

/// Information weight E||grad log f(Z)||^2: closed forms for Langevin
/// n=2,3; 1-D quadrature for LangevinOutlier n=2,3; Weyl quadrature for n=4.
double info_weight(const NoiseModel& model, const QuadratureSpec& spec = {});

/// Quadratic coefficient a_{n,kappa} of the small-p expansion
/// w(p) = a_{n,kappa} p^2 + O(p^3) of the outlier information weight.
double outlier_slope(int n, double kappa, const QuadratureSpec& spec = {});

/// Haar-uniform rotation (Gaussian QR with sign fix and det correction).
Matrix sample_uniform(int n, Rng& rng);

/// Draw from the model. Langevin uses an inverse-CDF angle table for
/// n=2,3 and acceptance-rejection for n>=4 (SamplerStuckError after 1e7
/// rejected proposals).
Matrix sample(const NoiseModel& model, Rng& rng);

}  // namespace rotsync::noise

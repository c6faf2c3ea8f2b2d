#include "rotsync/noise.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <vector>

#include "rotsync/songeom.hpp"

namespace rotsync::noise {

namespace {

constexpr double kPi = std::numbers::pi;

Matrix rot2(double theta) {
    Matrix r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

Matrix rot3(double theta) {
    Matrix r = Matrix::Identity(3, 3);
    r.topLeftCorner<2, 2>() = rot2(theta);
    return r;
}

Matrix rot4(double t1, double t2) {
    Matrix r = Matrix::Zero(4, 4);
    r.topLeftCorner<2, 2>() = rot2(t1);
    r.bottomRightCorner<2, 2>() = rot2(t2);
    return r;
}

void require_langevin_kind(const NoiseModel& m, const char* op) {
    if (m.kind != NoiseKind::Langevin && m.kind != NoiseKind::LangevinOutlier) {
        throw Error(std::string(op) + ": requires a Langevin-type model");
    }
}

// Scaled normalizer c_n(kappa) * exp(-n*kappa), n in {2,3,4}; stays O(1)..O(kappa^-3/2).
double scaled_normalizer(int n, double kappa) {
    const double i0 = bessel_i_scaled(0, 2.0 * kappa);
    const double i1 = bessel_i_scaled(1, 2.0 * kappa);
    switch (n) {
        case 2:
            return i0;
        case 3:
            return i0 - i1;
        case 4:
            return i0 * i0 - 2.0 * i1 * i1 + i0 * bessel_i_scaled(2, 2.0 * kappa);
        default:
            throw DimensionError("normalizer: closed form only for n in {2,3,4}");
    }
}

// Inverse-CDF table for the Langevin rotation-angle density on [0, pi].
// Grid is quadratic in the parameter so resolution concentrates near 0,
// where the density peaks at large kappa.
struct AngleTable {
    std::vector<double> theta;
    std::vector<double> cdf;  // normalized, cdf.front() = 0, cdf.back() = 1

    double draw(double u) const {
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.begin()) return theta.front();
        const size_t hi = static_cast<size_t>(it - cdf.begin());
        const size_t lo = hi - 1;
        const double span = cdf[hi] - cdf[lo];
        const double t = (span > 0.0) ? (u - cdf[lo]) / span : 0.0;
        return theta[lo] + t * (theta[hi] - theta[lo]);
    }
};

std::shared_ptr<const AngleTable> angle_table(int n, double kappa) {
    thread_local std::map<std::pair<int, double>, std::shared_ptr<const AngleTable>> cache;
    const auto key = std::make_pair(n, kappa);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    constexpr int kPoints = 4096;
    auto table = std::make_shared<AngleTable>();
    table->theta.resize(kPoints + 1);
    table->cdf.resize(kPoints + 1);
    // Density up to normalization, with exp scaling by e^{-2 kappa}:
    // n=2: exp(2k(cos t - 1));  n=3: (1 - cos t) exp(2k(cos t - 1)).
    auto density = [n, kappa](double t) {
        const double e = std::exp(2.0 * kappa * (std::cos(t) - 1.0));
        return (n == 2) ? e : (1.0 - std::cos(t)) * e;
    };
    double acc = 0.0;
    double prev_t = 0.0;
    double prev_f = density(0.0);
    table->theta[0] = 0.0;
    table->cdf[0] = 0.0;
    for (int i = 1; i <= kPoints; ++i) {
        const double s = static_cast<double>(i) / kPoints;
        const double t = kPi * s * s;
        const double f = density(t);
        acc += 0.5 * (prev_f + f) * (t - prev_t);
        table->theta[i] = t;
        table->cdf[i] = acc;
        prev_t = t;
        prev_f = f;
    }
    for (auto& c : table->cdf) c /= acc;
    cache[key] = table;
    return table;
}

Matrix axis_angle_rotation3(const Eigen::Vector3d& axis, double theta) {
    Matrix omega = Matrix::Zero(3, 3);
    const Eigen::Vector3d v = axis * theta;
    omega << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return songeom::exp_skew(omega);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 over the pair; distinct indices give independent streams.
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

NoiseModel NoiseModel::uniform(int n) { return {NoiseKind::Uniform, n, 0.0, 1.0}; }

NoiseModel NoiseModel::langevin(int n, double kappa) {
    if (kappa < 0.0) throw Error("NoiseModel: kappa must be >= 0");
    return {NoiseKind::Langevin, n, kappa, 1.0};
}

NoiseModel NoiseModel::langevin_outlier(int n, double kappa, double p) {
    if (kappa < 0.0) throw Error("NoiseModel: kappa must be >= 0");
    if (p < 0.0 || p > 1.0) throw Error("NoiseModel: p must be in [0, 1]");
    return {NoiseKind::LangevinOutlier, n, kappa, p};
}

NoiseModel NoiseModel::exact(int n) { return {NoiseKind::Exact, n, 0.0, 1.0}; }

double weyl_integrate(int n, const std::function<double(const Matrix&)>& g,
                      const QuadratureSpec& spec) {
    switch (n) {
        case 2:
            return quadrature::integrate([&g](double t) { return g(rot2(t)); }, -kPi, kPi,
                                         spec) /
                   (2.0 * kPi);
        case 3:
            return quadrature::integrate(
                       [&g](double t) { return g(rot3(t)) * (1.0 - std::cos(t)); }, -kPi, kPi,
                       spec) /
                   (2.0 * kPi);
        case 4: {
            auto inner = [&](double t1) {
                return quadrature::integrate(
                    [&](double t2) {
                        const double w = (2.0 - 2.0 * std::cos(t1 - t2)) *
                                         (2.0 - 2.0 * std::cos(t1 + t2));
                        return g(rot4(t1, t2)) * w;
                    },
                    -kPi, kPi, spec);
            };
            return quadrature::integrate(inner, -kPi, kPi, spec) /
                   (4.0 * (2.0 * kPi) * (2.0 * kPi));
        }
        default:
            throw DimensionError("weyl_integrate: supported dimensions are 2, 3, 4");
    }
}

double bessel_i(int nu, double x) {
    if (x > 700.0) throw Error("bessel_i: overflow; use bessel_i_scaled");
    return bessel_i_scaled(nu, x) * std::exp(x);
}

double bessel_i_scaled(int nu, double x) {
    if (nu < 0) throw Error("bessel_i_scaled: order must be >= 0");
    if (x < 0.0) throw Error("bessel_i_scaled: argument must be >= 0");
    if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
    if (x <= 500.0) {
        // Power series; all terms positive, no cancellation.
        double term = 1.0;
        for (int k = 1; k <= nu; ++k) term *= 0.5 * x / k;
        double sum = term;
        const double q = 0.25 * x * x;
        for (int k = 1; k < 3000; ++k) {
            term *= q / (static_cast<double>(k) * (k + nu));
            sum += term;
            if (term < sum * 1e-17) break;
        }
        return sum * std::exp(-x);
    }
    // Large-argument asymptotic expansion, truncated at the smallest term.
    const double mu = 4.0 * static_cast<double>(nu) * nu;
    double term = 1.0;
    double sum = 1.0;
    double prev = std::abs(term);
    for (int k = 1; k < 40; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * k * x);
        if (std::abs(term) >= prev) break;
        sum += term;
        prev = std::abs(term);
    }
    return sum / std::sqrt(2.0 * kPi * x);
}

double normalizer(const NoiseModel& model) {
    require_langevin_kind(model, "normalizer");
    if (model.kappa == 0.0) return 1.0;
    return scaled_normalizer(model.n, model.kappa) * std::exp(model.n * model.kappa);
}

double log_normalizer(const NoiseModel& model) {
    require_langevin_kind(model, "log_normalizer");
    if (model.kappa == 0.0) return 0.0;
    return model.n * model.kappa + std::log(scaled_normalizer(model.n, model.kappa));
}

double pdf(const NoiseModel& model, const Matrix& z) {
    switch (model.kind) {
        case NoiseKind::Uniform:
            return 1.0;
        case NoiseKind::Langevin:
            return std::exp(model.kappa * z.trace() - log_normalizer(model));
        case NoiseKind::LangevinOutlier:
            return model.p * std::exp(model.kappa * z.trace() - log_normalizer(model)) +
                   (1.0 - model.p);
        case NoiseKind::Exact:
            throw Error("pdf: the exact surrogate has no density");
    }
    throw Error("pdf: unknown model kind");
}

Matrix score(const NoiseModel& model, const Matrix& z) {
    switch (model.kind) {
        case NoiseKind::Uniform:
            return Matrix::Zero(z.rows(), z.cols());
        case NoiseKind::Langevin:
            return model.kappa * songeom::skew_part(z);
        case NoiseKind::LangevinOutlier: {
            const double lang = std::exp(model.kappa * z.trace() - log_normalizer(model));
            const double ratio =
                model.p * lang / (model.p * lang + (1.0 - model.p));
            return ratio * model.kappa * songeom::skew_part(z);
        }
        case NoiseKind::Exact:
            throw Error("score: the exact surrogate has no score");
    }
    throw Error("score: unknown model kind");
}

double info_weight(const NoiseModel& model, const QuadratureSpec& spec) {
    const double kappa = model.kappa;
    switch (model.kind) {
        case NoiseKind::Uniform:
            return 0.0;
        case NoiseKind::Exact:
            throw IllPosedError("info_weight: exact edges have no finite weight");
        case NoiseKind::Langevin: {
            if (kappa == 0.0) return 0.0;
            const double i0 = bessel_i_scaled(0, 2.0 * kappa);
            const double i1 = bessel_i_scaled(1, 2.0 * kappa);
            if (model.n == 2) return kappa * i1 / i0;
            if (model.n == 3) {
                const double i3 = bessel_i_scaled(3, 2.0 * kappa);
                return 0.5 * kappa * ((2.0 - kappa) * i1 + kappa * i3) / (i0 - i1);
            }
            if (model.n == 4) {
                const double c4s = scaled_normalizer(4, kappa);
                auto g = [kappa, c4s](const Matrix& z) {
                    const double f = std::exp(kappa * (z.trace() - 4.0)) / c4s;
                    return 0.25 * kappa * kappa * (z - z.transpose()).squaredNorm() * f;
                };
                return weyl_integrate(4, g, spec);
            }
            throw DimensionError("info_weight: supported dimensions are 2, 3, 4");
        }
        case NoiseKind::LangevinOutlier: {
            const double p = model.p;
            if (kappa == 0.0 || p == 0.0) return 0.0;
            // 1-D forms with all exponents shifted to be <= 0.
            if (model.n == 2) {
                const double c2s = scaled_normalizer(2, kappa);
                auto f = [kappa, p, c2s](double t) {
                    const double e = std::exp(4.0 * kappa * (std::cos(t) - 1.0));
                    const double den =
                        p * std::exp(2.0 * kappa * (std::cos(t) - 1.0)) + (1.0 - p) * c2s;
                    return (1.0 - std::cos(2.0 * t)) * e / den;
                };
                return p * p * kappa * kappa / (c2s * kPi) *
                       quadrature::integrate(f, 0.0, kPi, spec);
            }
            if (model.n == 3) {
                const double b3 = scaled_normalizer(3, kappa);
                auto f = [kappa, p, b3](double t) {
                    const double e = std::exp(4.0 * kappa * (std::cos(t) - 1.0));
                    const double den =
                        p * std::exp(2.0 * kappa * (std::cos(t) - 1.0)) + (1.0 - p) * b3;
                    return (1.0 - std::cos(2.0 * t)) * (1.0 - std::cos(t)) * e / den;
                };
                return p * p * kappa * kappa / (b3 * kPi) *
                       quadrature::integrate(f, 0.0, kPi, spec);
            }
            if (model.n == 4) {
                auto g = [&model](const Matrix& z) {
                    return score(model, z).squaredNorm() * pdf(model, z);
                };
                return weyl_integrate(4, g, spec);
            }
            throw DimensionError("info_weight: supported dimensions are 2, 3, 4");
        }
    }
    throw Error("info_weight: unknown model kind");
}

double outlier_slope(int n, double kappa, const QuadratureSpec& spec) {
    if (kappa <= 0.0) throw Error("outlier_slope: kappa must be > 0");
    if (n == 2) {
        const double c2s = scaled_normalizer(2, kappa);
        auto f = [kappa](double t) {
            return (1.0 - std::cos(2.0 * t)) * std::exp(4.0 * kappa * (std::cos(t) - 1.0));
        };
        return kappa * kappa / (kPi * c2s * c2s) * quadrature::integrate(f, 0.0, kPi, spec);
    }
    if (n == 3) {
        const double b3 = scaled_normalizer(3, kappa);
        auto f = [kappa](double t) {
            return (1.0 - std::cos(2.0 * t)) * (1.0 - std::cos(t)) *
                   std::exp(4.0 * kappa * (std::cos(t) - 1.0));
        };
        return kappa * kappa / (kPi * b3 * b3) * quadrature::integrate(f, 0.0, kPi, spec);
    }
    throw DimensionError("outlier_slope: supported dimensions are 2 and 3");
}

Matrix sample_uniform(int n, Rng& rng) {
    if (n < 2) throw DimensionError("sample_uniform: n must be >= 2");
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (true) {
        Matrix a(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
        }
        Eigen::HouseholderQR<Matrix> qr(a);
        Matrix q = qr.householderQ();
        const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        bool singular = false;
        for (int i = 0; i < n; ++i) {
            if (r(i, i) == 0.0) {
                singular = true;
                break;
            }
            if (r(i, i) < 0.0) q.col(i) *= -1.0;
        }
        if (singular) continue;  // probability-zero event; redraw
        if (q.determinant() < 0.0) q.col(0).swap(q.col(1));
        return q;
    }
}

Matrix sample(const NoiseModel& model, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    switch (model.kind) {
        case NoiseKind::Exact:
            return Matrix::Identity(model.n, model.n);
        case NoiseKind::Uniform:
            return sample_uniform(model.n, rng);
        case NoiseKind::LangevinOutlier: {
            if (unif(rng) < model.p) return sample(NoiseModel::langevin(model.n, model.kappa), rng);
            return sample_uniform(model.n, rng);
        }
        case NoiseKind::Langevin: {
            if (model.kappa == 0.0) return sample_uniform(model.n, rng);
            if (model.n == 2) {
                const double theta = angle_table(2, model.kappa)->draw(unif(rng));
                return rot2(unif(rng) < 0.5 ? theta : -theta);
            }
            if (model.n == 3) {
                const double theta = angle_table(3, model.kappa)->draw(unif(rng));
                std::normal_distribution<double> gauss(0.0, 1.0);
                Eigen::Vector3d axis(gauss(rng), gauss(rng), gauss(rng));
                while (axis.norm() < 1e-12) axis = {gauss(rng), gauss(rng), gauss(rng)};
                return axis_angle_rotation3(axis.normalized(), theta);
            }
            // Acceptance-rejection against the uniform proposal.
            constexpr long kMaxProposals = 10'000'000;
            for (long i = 0; i < kMaxProposals; ++i) {
                const Matrix z = sample_uniform(model.n, rng);
                const double accept = std::exp(model.kappa * (z.trace() - model.n));
                if (unif(rng) < accept) return z;
            }
            throw SamplerStuckError("sample: rejection sampler exceeded 1e7 proposals");
        }
    }
    throw Error("sample: unknown model kind");
}

}  // namespace rotsync::noise

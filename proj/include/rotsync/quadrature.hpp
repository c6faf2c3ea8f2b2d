#pragma once

#include <functional>

#include "rotsync/errors.hpp"

namespace rotsync::quadrature {

enum class Rule { AdaptiveSimpson, GaussLegendre };

/// Tolerance and budget for 1-D integration. The tolerance is absolute on
/// the scale of the integral: it is inflated by the magnitude of a coarse
/// estimate so that large smooth integrands still converge in relative terms.
struct QuadratureSpec {
    Rule rule = Rule::AdaptiveSimpson;
    double abs_tol = 1e-10;
    int max_subdivisions = 1 << 20;
};

/// Integrates f over [a, b]. Throws QuadratureError if the budget is
/// exhausted before the tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

}  // namespace rotsync::quadrature

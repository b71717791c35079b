#pragma once

#include <utility>

#include "drifttrack/core.hpp"

// Localized bump losses g_u(theta) = (mu/2)||theta||^2
//                                    - u * mu * a * <theta, e1> * psi_r(theta).
// The cutoff psi is a radial C^2 smoothstep: 1 on ||x|| <= 1/2, 0 on
// ||x|| >= 1, quintic in between; psi_r(theta) = psi(theta / r).

namespace drifttrack::hard {

/// Radial profile psi(s) and its first two radial derivatives.
double psi_value(double s);
double psi_d1(double s);
double psi_d2(double s);

/// max over the radial band of ||grad psi|| and ||hess psi||_op, computed
/// on a fine radial grid. Cached after the first call.
double compute_c_psi(int grid_points = 200001);

/// Gradient of g_u at theta for raw parameters, no convexity checks. Used
/// by the variation-budget quadrature where a/r is deliberately large.
Vec bump_gradient_raw(double mu, double a, double r, int u, const Vec& theta);
double bump_value_raw(double mu, double a, double r, int u, const Vec& theta);

struct BumpLoss {
    double mu = 1.0;
    double a = 0.0;
    double r = 1.0;
    int u = +1;
    int d = 1;
    double C_psi = 0.0;

    /// Validates a <= r/4 and a/r <= c1 = 1/(12 C_psi), the regime where
    /// g_u is mu/4-strongly convex and 2mu-smooth with minimizer u*a*e1.
    static BumpLoss make(double mu, double a, double r, int u, int d);

    double c1() const { return 1.0 / (12.0 * C_psi); }
    Vec minimizer() const;
    double min_value() const;

    double value(const Vec& theta) const;
    Vec gradient(const Vec& theta) const;
};

/// Value and analytic gradient in one pass.
std::pair<double, Vec> bump_value_and_gradient(const BumpLoss& loss, const Vec& theta);

}  // namespace drifttrack::hard

#include "drifttrack/bump.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace drifttrack::hard {

namespace {

// Quintic smoothstep S(w) = 6w^5 - 15w^4 + 10w^3 on [0, 1].
double smoothstep(double w) { return ((6.0 * w - 15.0) * w + 10.0) * w * w * w; }
double smoothstep_d1(double w) { return ((30.0 * w - 60.0) * w + 30.0) * w * w; }
double smoothstep_d2(double w) { return ((120.0 * w - 180.0) * w + 60.0) * w; }

}  // namespace

double psi_value(double s) {
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    return 1.0 - smoothstep(2.0 * (s - 0.5));
}

double psi_d1(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    return -2.0 * smoothstep_d1(2.0 * (s - 0.5));
}

double psi_d2(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    return -4.0 * smoothstep_d2(2.0 * (s - 0.5));
}

double compute_c_psi(int grid_points) {
    static std::mutex mu;
    static double cached = 0.0;
    static int cached_pts = 0;
    std::lock_guard<std::mutex> lock(mu);
    if (cached_pts == grid_points) return cached;

    // For a radial profile f(s), grad norm = |f'(s)| and
    // ||hess||_op = max(|f''(s)|, |f'(s)|/s).
    double c = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double s = 0.5 + 0.5 * static_cast<double>(i) / (grid_points - 1);
        const double g = std::fabs(psi_d1(s));
        const double h = std::max(std::fabs(psi_d2(s)), s > 0.0 ? g / s : 0.0);
        c = std::max({c, g, h});
    }
    cached = c;
    cached_pts = grid_points;
    return c;
}

double bump_value_raw(double mu, double a, double r, int u, const Vec& theta) {
    const double s = theta.norm() / r;
    const double quad = 0.5 * mu * theta.squared_norm();
    if (s >= 1.0) return quad;
    return quad - static_cast<double>(u) * mu * a * theta[0] * psi_value(s);
}

Vec bump_gradient_raw(double mu, double a, double r, int u, const Vec& theta) {
    Vec g = theta;
    g *= mu;
    const double nrm = theta.norm();
    const double s = nrm / r;
    if (s >= 1.0) return g;  // psi_r and its gradient vanish: grad = mu * theta
    const double p = psi_value(s);
    const double coeff = static_cast<double>(u) * mu * a;
    // grad psi_r(theta) = psi'(s) / (r * ||theta||) * theta
    if (p != 0.0) g[0] -= coeff * p;
    const double dp = psi_d1(s);
    if (dp != 0.0 && nrm > 0.0) {
        const double scale = coeff * theta[0] * dp / (r * nrm);
        g.axpy(-scale, theta);
    }
    return g;
}

BumpLoss BumpLoss::make(double mu, double a, double r, int u, int d) {
    if (mu <= 0.0 || a <= 0.0 || r <= 0.0) throw parameter_error("BumpLoss: mu, a, r must be positive");
    if (u != 1 && u != -1) throw parameter_error("BumpLoss: u must be +1 or -1");
    if (d < 1) throw parameter_error("BumpLoss: dimension must be >= 1");
    BumpLoss loss;
    loss.mu = mu;
    loss.a = a;
    loss.r = r;
    loss.u = u;
    loss.d = d;
    loss.C_psi = compute_c_psi();
    if (a > r / 4.0) throw parameter_error("BumpLoss: requires a <= r/4");
    if (a / r > loss.c1()) {
        throw parameter_error("BumpLoss: a/r exceeds 1/(12 C_psi); strong convexity not certified");
    }
    return loss;
}

Vec BumpLoss::minimizer() const {
    Vec m(static_cast<std::size_t>(d));
    m[0] = static_cast<double>(u) * a;
    return m;
}

double BumpLoss::min_value() const { return value(minimizer()); }

double BumpLoss::value(const Vec& theta) const {
    if (theta.size() != static_cast<std::size_t>(d)) throw parameter_error("BumpLoss::value: dimension mismatch");
    return bump_value_raw(mu, a, r, u, theta);
}

Vec BumpLoss::gradient(const Vec& theta) const {
    if (theta.size() != static_cast<std::size_t>(d)) throw parameter_error("BumpLoss::gradient: dimension mismatch");
    return bump_gradient_raw(mu, a, r, u, theta);
}

std::pair<double, Vec> bump_value_and_gradient(const BumpLoss& loss, const Vec& theta) {
    return {loss.value(theta), loss.gradient(theta)};
}

}  // namespace drifttrack::hard

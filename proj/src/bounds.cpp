#include "drifttrack/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace drifttrack::bounds {

void RegimeParams::validate() const {
    if (mu <= 0.0) throw parameter_error("RegimeParams: mu must be > 0");
    if (L < mu) throw parameter_error("RegimeParams: L must be >= mu");
    if (beta < 0.0 || beta >= 1.0) throw parameter_error("RegimeParams: beta must lie in [0, 1)");
    if (sigma < 0.0 || Delta < 0.0) throw parameter_error("RegimeParams: sigma, Delta must be >= 0");
}

double cap_sgd(const RegimeParams& p) { return std::min(p.mu / (p.L * p.L), 1.0 / p.L); }

double cap_mom(const RegimeParams& p) {
    const double omb = 1.0 - p.beta;
    return p.mu * omb * omb / (4.0 * p.L * p.L);
}

double sgd_floor_at(const RegimeParams& p, double gamma) {
    return p.sigma * p.sigma * gamma / p.mu +
           4.0 * p.Delta * p.Delta / (p.mu * p.mu * gamma * gamma);
}

double momentum_floor_at(const RegimeParams& p, double gamma) {
    const double two_plus = 2.0 + p.beta;
    return 192.0 * two_plus * two_plus * p.Delta * p.Delta / (p.mu * p.mu * gamma * gamma) +
           96.0 * p.sigma * p.sigma * gamma / (p.mu * (1.0 - p.beta));
}

namespace {

/// Minimize A / g^2 + B g over (0, cap]. Interior optimum at (2A/B)^{1/3}.
FloorResult minimize_floor(double A, double B, double cap) {
    FloorResult r;
    if (A == 0.0 && B == 0.0) {
        r.floor = 0.0;
        r.gamma_star = cap;
        r.degenerate = true;
        return r;
    }
    if (A == 0.0) {
        // Pure noise: E decreases as gamma -> 0+, floor 0 at gamma* = 0.
        r.floor = 0.0;
        r.gamma_star = 0.0;
        r.degenerate = true;
        return r;
    }
    if (B == 0.0) {
        // Pure drift: E decreases in gamma, optimum at the cap.
        r.gamma_star = cap;
        r.floor = A / (cap * cap);
        r.boundary = true;
        return r;
    }
    const double interior = std::cbrt(2.0 * A / B);
    if (interior <= cap) {
        r.gamma_star = interior;
        r.floor = A / (interior * interior) + B * interior;
    } else {
        r.gamma_star = cap;
        r.floor = A / (cap * cap) + B * cap;
        r.boundary = true;
    }
    return r;
}

}  // namespace

FloorResult sgd_floor_and_gamma(const RegimeParams& p) {
    p.validate();
    const double cap = 1.0 / (2.0 * p.L);
    const double A = 4.0 * p.Delta * p.Delta / (p.mu * p.mu);
    const double B = p.sigma * p.sigma / p.mu;
    return minimize_floor(A, B, cap);
}

FloorResult momentum_floor_and_gamma(const RegimeParams& p) {
    p.validate();
    const double cap = cap_mom(p);
    const double two_plus = 2.0 + p.beta;
    const double A = 192.0 * two_plus * two_plus * p.Delta * p.Delta / (p.mu * p.mu);
    const double B = 96.0 * p.sigma * p.sigma / (p.mu * (1.0 - p.beta));
    return minimize_floor(A, B, cap);
}

GammaMatrix stability_matrix_Gamma(const RegimeParams& p, double beta1, double beta2) {
    p.validate();
    if (beta1 * beta2 != 0.0) throw parameter_error("stability_matrix_Gamma: beta1 * beta2 must be 0");
    if (std::fabs(beta1 + beta2 - p.beta) > 1e-12) {
        throw parameter_error("stability_matrix_Gamma: beta1 + beta2 must equal beta");
    }
    const double omb = 1.0 - p.beta;
    const double beta_prime = p.beta * beta1 + beta2;
    const double bp2 = beta_prime * beta_prime;
    const double L2 = p.L * p.L;
    GammaMatrix m;
    m.a = 1.0 - p.gamma * p.mu / omb;
    m.b = p.gamma * bp2 * L2 / (p.mu * omb);
    m.c = 2.0 * p.gamma * p.gamma * L2 / (omb * omb * omb);
    m.d = p.beta + 2.0 * p.gamma * p.gamma * bp2 * L2 / (omb * omb * omb);
    // Nonnegative 2x2: the Perron root is the larger eigenvalue.
    const double tr = m.a + m.d;
    const double disc = (m.a - m.d) * (m.a - m.d) + 4.0 * m.b * m.c;
    m.spectral_radius = 0.5 * (tr + std::sqrt(std::max(0.0, disc)));
    if (m.a < 0.0) {
        // gamma far above the cap; fall back to |.| of both eigenvalues.
        const double lo = 0.5 * (tr - std::sqrt(std::max(0.0, disc)));
        m.spectral_radius = std::max(std::fabs(m.spectral_radius), std::fabs(lo));
    }
    return m;
}

BoundRhs expectation_bound_rhs(const RegimeParams& p, double e0_sq, long long t) {
    p.validate();
    if (e0_sq < 0.0) throw parameter_error("expectation_bound_rhs: e0_sq must be >= 0");
    const double s2 = p.sigma * p.sigma;
    const double D2 = p.Delta * p.Delta;
    const double g = p.gamma;
    BoundRhs r;
    r.sgd_valid = g <= cap_sgd(p);
    r.mom_valid = g <= cap_mom(p);

    const double contraction = std::pow(1.0 - g * p.mu / 2.0, static_cast<double>(t + 1));
    r.sgd = contraction * e0_sq + 4.0 * D2 / (g * g * p.mu * p.mu) + s2 * g / p.mu;

    const double omb = 1.0 - p.beta;
    const double c_gb = std::exp(-g * p.mu * static_cast<double>(t + 1) / omb);
    const double two_plus = 2.0 + p.beta;
    r.mom = 48.0 / (omb * omb) * c_gb * e0_sq +
            192.0 * two_plus * two_plus * D2 / (g * g * p.mu * p.mu) + 96.0 * s2 * g / (p.mu * omb);
    return r;
}

namespace {

long long ceil_positive(double x) {
    if (!(x > 0.0)) return 0;
    return static_cast<long long>(std::ceil(x));
}

}  // namespace

BurnIn burn_in_times(const RegimeParams& p, double e0_sq) {
    p.validate();
    if (e0_sq < 0.0) throw parameter_error("burn_in_times: e0_sq must be >= 0");
    BurnIn out;

    const FloorResult fs = sgd_floor_and_gamma(p);
    const FloorResult fm = momentum_floor_and_gamma(p);
    const double omb = 1.0 - p.beta;

    if (fs.gamma_star > 0.0 && fs.floor > 0.0 && e0_sq > fs.floor) {
        out.t_sgd = std::log(e0_sq / fs.floor) / (p.mu * fs.gamma_star);
    }
    const double mom_scale = omb * omb * fm.floor;
    if (fm.gamma_star > 0.0 && mom_scale > 0.0 && e0_sq > mom_scale) {
        out.t_mom = omb * std::log(e0_sq / mom_scale) / (p.mu * fm.gamma_star);
    }

    // Step-decay schedule toward gamma_star with halving epoch step sizes.
    {
        optim::Schedule s;
        s.kind = optim::ScheduleKind::step_decay_sgd;
        s.gamma0 = 1.0 / (2.0 * p.L);
        s.gamma_star = fs.gamma_star > 0.0 ? fs.gamma_star : s.gamma0;
        // Guard the ceiling against representation noise at exact powers of 2.
        const long long K = 1 + static_cast<long long>(
                                    std::ceil(std::max(0.0, std::log2(s.gamma0 / s.gamma_star)) - 1e-9));
        double gk = s.gamma0;
        for (long long k = 0; k < K; ++k) {
            if (k > 0) gk = 0.5 * (gk + s.gamma_star);
            s.epoch_gamma.push_back(gk);
            long long Tk;
            if (k == 0) {
                const double floor0 = sgd_floor_at(p, s.gamma0);
                Tk = floor0 > 0.0 ? ceil_positive(2.0 / (p.mu * s.gamma0) *
                                                  std::log(2.0 * e0_sq / floor0))
                                  : 0;
            } else {
                Tk = ceil_positive(2.0 * std::log(4.0) / (p.mu * gk));
            }
            s.epoch_len.push_back(std::max<long long>(Tk, 1));
        }
        s.gamma = s.epoch_gamma.back();
        out.schedule_sgd = std::move(s);
    }
    {
        optim::Schedule s;
        s.kind = optim::ScheduleKind::step_decay_momentum;
        s.gamma0 = cap_mom(p);
        s.gamma_star = fm.gamma_star > 0.0 ? fm.gamma_star : s.gamma0;
        const long long K = 1 + static_cast<long long>(
                                    std::ceil(std::max(0.0, std::log2(s.gamma0 / s.gamma_star)) - 1e-9));
        double gk = s.gamma0;
        for (long long k = 0; k < K; ++k) {
            if (k > 0) gk = 0.5 * (gk + s.gamma_star);
            s.epoch_gamma.push_back(gk);
            long long Tk;
            if (k == 0) {
                const double floor0 = momentum_floor_at(p, s.gamma0);
                const double denom = omb * omb * floor0;
                Tk = denom > 0.0 ? ceil_positive(omb / (p.mu * s.gamma0) *
                                                 std::log(2.0 * e0_sq / denom))
                                 : 0;
            } else {
                Tk = ceil_positive(omb * std::log(4.0) / (p.mu * gk));
            }
            s.epoch_len.push_back(std::max<long long>(Tk, 1));
        }
        s.gamma = s.epoch_gamma.back();
        out.schedule_mom = std::move(s);
    }
    return out;
}

DriftFunctionals drift_functionals(const std::vector<double>& sq_increments,
                                   const RegimeParams& p) {
    p.validate();
    const double rho = 1.0 - p.gamma * p.mu / 2.0;
    const double omb = 1.0 - p.beta;
    const double rho_tilde = 1.0 - p.gamma * p.gamma * p.mu * p.mu / (4.0 * omb * omb);
    DriftFunctionals f;
    // Forward recurrences: S_{t+1} = rho * S_t + s_t gives the weights
    // rho^{T-l-1} exactly.
    for (double s : sq_increments) {
        f.D = rho * f.D + s;
        f.D2 = rho * rho * f.D2 + s;
        f.Dmom = rho_tilde * f.Dmom + s;
        f.Dmom2 = rho_tilde * rho_tilde * f.Dmom2 + s;
    }
    return f;
}

namespace {

std::vector<double> forcing_impl(const drift::MinimizerPath& path, const RegimeParams& p,
                                 double beta1, double gamma,
                                 const std::vector<double>& hdiag) {
    p.validate();
    if (path.points.size() < 3) throw parameter_error("forcing_vectors: path length must be >= 3");
    const std::size_t d = path.points[0].size();
    if (hdiag.size() != d) throw parameter_error("forcing_vectors: Hessian diagonal dimension mismatch");
    const long T = path.horizon();
    std::vector<double> out(static_cast<std::size_t>(T), 0.0);
    // Delta_t = theta*_t - theta*_{t+1}; Delta before time 0 is zero, so
    // b_0 = 0 and b_1 has no Delta_{-1} term.
    for (long l = 1; l < T; ++l) {
        const Vec& dm1a = path.points[static_cast<std::size_t>(l - 1)];
        const Vec& dm1b = path.points[static_cast<std::size_t>(l)];
        double sq = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double delta_lm1 = dm1a[i] - dm1b[i];
            double bi = -(1.0 - gamma * hdiag[i]) * delta_lm1;
            if (l >= 2) {
                const double delta_lm2 = path.points[static_cast<std::size_t>(l - 2)][i] -
                                         path.points[static_cast<std::size_t>(l - 1)][i];
                const double k = -p.beta + gamma * beta1 * hdiag[i];
                bi -= k * delta_lm2;
            }
            sq += bi * bi;
        }
        out[static_cast<std::size_t>(l)] = sq;
    }
    return out;
}

}  // namespace

std::vector<double> forcing_vectors(const drift::MinimizerPath& path, const RegimeParams& p,
                                    double beta1, double gamma,
                                    const std::vector<double>& hessian_diag) {
    return forcing_impl(path, p, beta1, gamma, hessian_diag);
}

std::vector<double> forcing_vectors(const drift::MinimizerPath& path, const RegimeParams& p,
                                    double beta1, double gamma, double hessian_scalar) {
    if (path.points.empty()) throw parameter_error("forcing_vectors: empty path");
    std::vector<double> hdiag(path.points[0].size(), hessian_scalar);
    return forcing_impl(path, p, beta1, gamma, hdiag);
}

HbVariance hb_stationary_variance(double mu, double gamma, double beta, double sigma2) {
    if (mu <= 0.0 || gamma <= 0.0) throw parameter_error("hb_stationary_variance: mu, gamma must be > 0");
    if (beta < 0.0 || beta >= 1.0) throw parameter_error("hb_stationary_variance: beta must lie in [0, 1)");
    if (sigma2 < 0.0) throw parameter_error("hb_stationary_variance: sigma2 must be >= 0");
    const double a = 1.0 + beta - gamma * mu;
    // Roots of lambda^2 - a lambda + beta.
    const double disc = a * a - 4.0 * beta;
    double radius;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        radius = std::max(std::fabs(0.5 * (a + s)), std::fabs(0.5 * (a - s)));
    } else {
        radius = std::sqrt(beta);
    }
    if (radius >= 1.0 || gamma * mu >= 2.0 * (1.0 + beta)) {
        throw stability_error("hb_stationary_variance: companion matrix unstable (radius " +
                              format_double(radius) + ")");
    }
    HbVariance out;
    out.v = (1.0 + beta) * gamma * sigma2 / ((1.0 - beta) * mu * (2.0 * (1.0 + beta) - gamma * mu));
    out.cov = a * out.v / (1.0 + beta);

    // Residual of Sigma = A Sigma A^T + sigma2 B B^T with
    // Sigma = [[v, c], [c, v]], A = [[a, -beta], [1, 0]], B = (-gamma, 0).
    const double v = out.v, c = out.cov;
    const double r11 = v - (a * a * v - 2.0 * a * beta * c + beta * beta * v) - sigma2 * gamma * gamma;
    const double r12 = c - (a * v - beta * c);
    const double r22 = v - v;
    out.lyapunov_residual = std::max({std::fabs(r11), std::fabs(r12), std::fabs(r22)});

    if (gamma * mu <= 1.0 + beta) {
        out.lower_bound_ok = out.v >= gamma * sigma2 / (4.0 * mu * (1.0 - beta)) - 1e-15;
    } else {
        out.lower_bound_ok = true;  // lower-bound clause not applicable
    }
    return out;
}

ResponseTime response_time(double mu, double gamma, double beta, double c) {
    if (mu <= 0.0 || gamma <= 0.0) throw parameter_error("response_time: mu, gamma must be > 0");
    if (beta < 0.0 || beta >= 1.0) throw parameter_error("response_time: beta must lie in [0, 1)");
    const double gm = gamma * mu;
    const double omb = 1.0 - beta;
    const double sqb = std::sqrt(beta);
    const double cap = std::min((1.0 - sqb) * (1.0 - sqb), omb / 4.0);
    if (!(gm > 0.0) || gm > cap) {
        throw regime_error("response_time: requires 0 < gamma mu <= min((1-sqrt(beta))^2, (1-beta)/4)");
    }
    const double ratio = 1.0 - c * gm / omb;
    ResponseTime out;
    out.proxy = omb * std::log(2.0) / (c * gm);
    if (ratio <= 0.0) {
        out.tau = 1;
        return out;
    }
    // Smallest integer t with ratio^t <= 1/2; nudge the continuous solution
    // to be robust to rounding at exact boundaries.
    const double t_cont = std::log(0.5) / std::log(ratio);
    long long t = static_cast<long long>(std::ceil(t_cont - 1e-12));
    if (t < 0) t = 0;
    while (std::pow(ratio, static_cast<double>(t)) > 0.5) ++t;
    while (t > 0 && std::pow(ratio, static_cast<double>(t - 1)) <= 0.5) --t;
    out.tau = t;
    return out;
}

BoundReport bound_report(const RegimeParams& p, double beta1, double beta2, double e0_sq) {
    p.validate();
    BoundReport r;
    const FloorResult fs = sgd_floor_and_gamma(p);
    const FloorResult fm = momentum_floor_and_gamma(p);
    r.floor_sgd = fs.floor;
    r.gamma_star_sgd = fs.gamma_star;
    r.sgd_boundary = fs.boundary;
    r.floor_mom = fm.floor;
    r.gamma_star_mom = fm.gamma_star;
    r.mom_boundary = fm.boundary;
    r.cap_sgd = cap_sgd(p);
    r.cap_mom = cap_mom(p);
    const BurnIn b = burn_in_times(p, e0_sq);
    r.burn_in_sgd = b.t_sgd;
    r.burn_in_mom = b.t_mom;
    const double omb = 1.0 - p.beta;
    r.rho = 1.0 - p.gamma * p.mu / (2.0 * omb);
    r.rho_tilde = 1.0 - p.gamma * p.gamma * p.mu * p.mu / (4.0 * omb * omb);
    r.spectral_radius_Gamma = stability_matrix_Gamma(p, beta1, beta2).spectral_radius;
    r.gamma_within_cap = p.gamma <= r.cap_mom;
    return r;
}

namespace {

void kv(std::ostringstream& os, const char* key, const std::string& val) {
    os << key;
    for (std::size_t i = std::string(key).size(); i < 24; ++i) os << ' ';
    os << val << '\n';
}

// Human-readable rounding for the aligned text report; the JSON form keeps
// the exact shortest-round-trip representation.
std::string fmt10(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

}  // namespace

std::string render_report(const BoundReport& r) {
    std::ostringstream os;
    kv(os, "floor_sgd", fmt10(r.floor_sgd));
    kv(os, "gamma_star_sgd", fmt10(r.gamma_star_sgd) + (r.sgd_boundary ? " (boundary)" : ""));
    kv(os, "floor_mom", fmt10(r.floor_mom));
    kv(os, "gamma_star_mom", fmt10(r.gamma_star_mom) + (r.mom_boundary ? " (boundary)" : ""));
    kv(os, "cap_sgd", fmt10(r.cap_sgd));
    kv(os, "cap_mom", fmt10(r.cap_mom));
    kv(os, "burn_in_sgd", fmt10(r.burn_in_sgd));
    kv(os, "burn_in_mom", fmt10(r.burn_in_mom));
    kv(os, "rho", fmt10(r.rho));
    kv(os, "rho_tilde", fmt10(r.rho_tilde));
    kv(os, "spectral_radius_Gamma", fmt10(r.spectral_radius_Gamma));
    kv(os, "gamma_within_cap", r.gamma_within_cap ? "true" : "false");
    return os.str();
}

std::string report_to_json(const BoundReport& r) {
    std::ostringstream os;
    os << "{\n"
       << "  \"floor_sgd\": " << format_double(r.floor_sgd) << ",\n"
       << "  \"gamma_star_sgd\": " << format_double(r.gamma_star_sgd) << ",\n"
       << "  \"sgd_boundary\": " << (r.sgd_boundary ? "true" : "false") << ",\n"
       << "  \"floor_mom\": " << format_double(r.floor_mom) << ",\n"
       << "  \"gamma_star_mom\": " << format_double(r.gamma_star_mom) << ",\n"
       << "  \"mom_boundary\": " << (r.mom_boundary ? "true" : "false") << ",\n"
       << "  \"cap_sgd\": " << format_double(r.cap_sgd) << ",\n"
       << "  \"cap_mom\": " << format_double(r.cap_mom) << ",\n"
       << "  \"burn_in_sgd\": " << format_double(r.burn_in_sgd) << ",\n"
       << "  \"burn_in_mom\": " << format_double(r.burn_in_mom) << ",\n"
       << "  \"rho\": " << format_double(r.rho) << ",\n"
       << "  \"rho_tilde\": " << format_double(r.rho_tilde) << ",\n"
       << "  \"spectral_radius_Gamma\": " << format_double(r.spectral_radius_Gamma) << ",\n"
       << "  \"gamma_within_cap\": " << (r.gamma_within_cap ? "true" : "false") << "\n"
       << "}\n";
    return os.str();
}

}  // namespace drifttrack::bounds

#pragma once

#include <vector>

#include "drifttrack/core.hpp"
#include "drifttrack/drift.hpp"
#include "drifttrack/optim.hpp"

// Closed-form evaluation of the theoretical quantities: steady-state error
// floors and their optimal step sizes, stability matrices and spectral
// radii, expectation-bound right-hand sides, burn-in times and step-decay
// schedules, exponentially weighted drift functionals, Heavy-Ball
// stationary variance, and momentum response times.

namespace drifttrack::bounds {

struct RegimeParams {
    double mu = 1.0;
    double L = 1.0;
    double beta = 0.0;     // total momentum
    double gamma = 0.0;    // step size under evaluation
    double sigma = 0.0;    // noise scale (std, not variance)
    double Delta = 0.0;    // per-step drift bound
    int d = 1;

    double kappa() const { return L / mu; }
    void validate() const;
};

/// Step-size caps: the SGD expectation bound needs gamma <= min(mu/L^2, 1/L);
/// the momentum bound needs gamma <= mu(1-beta)^2 / (4 L^2).
double cap_sgd(const RegimeParams& p);
double cap_mom(const RegimeParams& p);

/// E(gamma) = sigma^2 gamma / mu + 4 Delta^2 / (mu^2 gamma^2).
double sgd_floor_at(const RegimeParams& p, double gamma);
/// E_beta(gamma) = 192 (2+beta)^2 Delta^2 / (mu^2 gamma^2)
///               + 96 sigma^2 gamma / (mu (1-beta)).
double momentum_floor_at(const RegimeParams& p, double gamma);

struct FloorResult {
    double floor = 0.0;
    double gamma_star = 0.0;
    bool boundary = false;    // interior optimum exceeded the cap
    bool degenerate = false;  // sigma = 0 or Delta = 0 shortcuts
};

/// Minimize E over (0, 1/(2L)]. Interior optimum (8 Delta^2 / (mu sigma^2))^{1/3}
/// with floor 3 (Delta sigma^2 / mu^2)^{2/3}; clamped to the cap otherwise.
FloorResult sgd_floor_and_gamma(const RegimeParams& p);
/// Minimize E_beta over (0, cap_mom]; interior optimum of A/g^2 + B g at
/// (2A/B)^{1/3}.
FloorResult momentum_floor_and_gamma(const RegimeParams& p);

struct GammaMatrix {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    double spectral_radius = 0.0;
};

/// Entrywise coefficient matrix of the transformed error-energy recursion,
/// with beta' = beta*beta1 + beta2:
///   a = 1 - gamma mu / (1-beta)          b = gamma beta'^2 L^2 / (mu (1-beta))
///   c = 2 gamma^2 L^2 / (1-beta)^3       d = beta + 2 gamma^2 beta'^2 L^2 / (1-beta)^3
GammaMatrix stability_matrix_Gamma(const RegimeParams& p, double beta1, double beta2);

struct BoundRhs {
    double sgd = 0.0;
    double mom = 0.0;
    bool sgd_valid = false;  // gamma within the SGD cap
    bool mom_valid = false;  // gamma within the momentum cap
};

/// Finite-time expectation bounds at step t, including the contraction of
/// the initial error e0_sq.
BoundRhs expectation_bound_rhs(const RegimeParams& p, double e0_sq, long long t);

struct BurnIn {
    double t_sgd = 0.0;
    double t_mom = 0.0;
    optim::Schedule schedule_sgd;
    optim::Schedule schedule_mom;
};

/// Constant-rate burn-in times at the optimal step sizes, plus the fully
/// materialized step-decay schedules (epoch step sizes halve toward
/// gamma_star; the momentum schedule resets velocity each epoch).
BurnIn burn_in_times(const RegimeParams& p, double e0_sq);

struct DriftFunctionals {
    double D = 0.0;       // sum rho^{T-l-1} s_l,   rho = 1 - gamma mu / 2
    double D2 = 0.0;      // sum rho^{2(T-l-1)} s_l
    double Dmom = 0.0;    // sum rho~^{T-l-1} s_l,  rho~ = 1 - gamma^2 mu^2 / (4 (1-beta)^2)
    double Dmom2 = 0.0;   // sum rho~^{2(T-l-1)} s_l
};

/// Exponentially weighted sums over a squared-increment sequence. For the
/// momentum functionals pass the squared forcing-vector norms from
/// forcing_vectors; the weights are applied to whatever sequence is given.
DriftFunctionals drift_functionals(const std::vector<double>& sq_increments,
                                   const RegimeParams& p);

/// Squared norms of b_l = -(I - gamma H) Delta_{l-1} - K Delta_{l-2} with
/// K = -beta I + gamma beta1 H, for l = 0..T-1 (drift before time 0 is
/// zero). Constant-Hessian (quadratic) problems only; H is diagonal.
std::vector<double> forcing_vectors(const drift::MinimizerPath& path, const RegimeParams& p,
                                    double beta1, double gamma,
                                    const std::vector<double>& hessian_diag);
std::vector<double> forcing_vectors(const drift::MinimizerPath& path, const RegimeParams& p,
                                    double beta1, double gamma, double hessian_scalar);

struct HbVariance {
    double v = 0.0;                  // stationary Var(x_t)
    double cov = 0.0;                // stationary Cov(x_t, x_{t-1})
    double lyapunov_residual = 0.0;  // max |Sigma - A Sigma A^T - s^2 B B^T|
    bool lower_bound_ok = false;     // v >= gamma sigma^2 / (4 mu (1-beta)) when gamma mu <= 1+beta
};

/// Exact stationary variance of 1-D Heavy-Ball on the quadratic core,
///   v = (1+beta) gamma sigma^2 / ((1-beta) mu (2(1+beta) - gamma mu)).
/// Throws stability_error when the companion matrix has a root outside the
/// open unit disk.
HbVariance hb_stationary_variance(double mu, double gamma, double beta, double sigma2);

struct ResponseTime {
    long long tau = 0;     // min t with (1 - c gamma mu / (1-beta))^t <= 1/2
    double proxy = 0.0;    // (1-beta) ln 2 / (c gamma mu)
};

/// Valid for 0 < gamma mu <= min((1-sqrt(beta))^2, (1-beta)/4); throws
/// regime_error otherwise. c defaults to the proposition's constant 2.
ResponseTime response_time(double mu, double gamma, double beta, double c = 2.0);

struct BoundReport {
    double floor_sgd = 0.0;
    double gamma_star_sgd = 0.0;
    bool sgd_boundary = false;
    double floor_mom = 0.0;
    double gamma_star_mom = 0.0;
    bool mom_boundary = false;
    double cap_sgd = 0.0;
    double cap_mom = 0.0;
    double burn_in_sgd = 0.0;
    double burn_in_mom = 0.0;
    double rho = 0.0;        // 1 - gamma mu / (2 (1-beta))
    double rho_tilde = 0.0;  // 1 - gamma^2 mu^2 / (4 (1-beta)^2)
    double spectral_radius_Gamma = 0.0;
    bool gamma_within_cap = false;
};

BoundReport bound_report(const RegimeParams& p, double beta1, double beta2, double e0_sq = 1.0);

std::string render_report(const BoundReport& r);
std::string report_to_json(const BoundReport& r);

}  // namespace drifttrack::bounds

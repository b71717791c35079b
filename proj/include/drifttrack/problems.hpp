#pragma once

#include <optional>
#include <string>
#include <vector>

#include "drifttrack/bump.hpp"
#include "drifttrack/core.hpp"

// Drifting objectives with exact minimizers, analytic gradients, stochastic
// gradient oracles, and (mu, L) metadata.

namespace drifttrack::problems {

enum class Task { quadratic, linreg, logreg, mlp, bump };

std::string task_name(Task t);
Task task_from_name(const std::string& name);

struct ProblemSpec {
    Task task = Task::quadratic;
    int d = 1;            // ambient/covariate dimension
    double mu = 1.0;
    double L = 1.0;
    double kappa = 1.0;   // L / mu
    double sigma2 = 0.0;  // gradient noise (quadratic/bump), label noise (linreg/mlp)
    int batch = 256;
    double reg = 1e-3;    // l2 coefficient, logreg
    std::vector<double> covariance_eigs;  // log-spaced in [1, kappa]

    // mlp
    int mlp_input = 100;
    int mlp_hidden = 128;

    // bump task
    double bump_a = 0.05;
    double bump_r = 1.0;
    int bump_u = +1;

    /// Dimension of the parameter vector the optimizer moves in.
    int param_dim() const;

    static ProblemSpec quadratic(int d, double mu, double sigma2);
    static ProblemSpec linreg(int d, double kappa, double sigma2, int batch = 256);
    static ProblemSpec logreg(int d, double kappa, double reg = 1e-3, int batch = 256);
    static ProblemSpec mlp(int input, int hidden, double kappa, double sigma2, int batch = 256);
    static ProblemSpec bump(int d, double mu, double a, double r, int u, double sigma2);
};

/// Log-spaced covariance eigenvalues between 1 and kappa, so mu = 1 and
/// L = kappa for the regression tasks.
std::vector<double> log_spaced_eigs(int d, double kappa);

struct GradSample {
    Vec grad;
    double loss = 0.0;
    std::optional<double> metric;  // batch accuracy for logreg
};

/// The randomness of one oracle call, frozen so the gradient is a
/// deterministic function of (theta, theta_star, batch). Covariates are
/// stored whitened; label noise / Bernoulli uniforms alongside.
struct Batch {
    std::vector<Vec> x;          // covariates (already Sigma^{1/2} z)
    std::vector<double> eps;     // label noise draws
    std::vector<double> unif;    // uniforms for Bernoulli labels (logreg)
    Vec xi;                      // additive gradient noise (quadratic/bump)
};

Batch sample_batch(const ProblemSpec& spec, SeededStream& stream);

/// Deterministic gradient given frozen batch randomness. This is the
/// finite-difference target: loss is differentiable in theta batch-wise.
GradSample grad_on_batch(const ProblemSpec& spec, const Vec& theta, const Vec& theta_star,
                         const Batch& batch);

GradSample stochastic_gradient(const ProblemSpec& spec, const Vec& theta, const Vec& theta_star,
                               SeededStream& stream);

/// Closed-form conditional mean gradient. Supported for quadratic, linreg,
/// and bump; other tasks throw unsupported_error.
Vec population_gradient(const ProblemSpec& spec, const Vec& theta, const Vec& theta_star);

// -- two-layer ReLU teacher-student -----------------------------------------

/// Flattened layout: W1 (h x din, row major), b1 (h), W2 (h), b2 (1).
struct MlpParams {
    int din = 0;
    int h = 0;
    Vec flat;

    static MlpParams zeros(int din, int h);
    static MlpParams init_gaussian(int din, int h, double stddev, SeededStream& stream);
    int dim() const { return h * din + h + h + 1; }

    double w1(int i, int j) const { return flat[static_cast<std::size_t>(i) * din + j]; }
    double b1(int i) const { return flat[static_cast<std::size_t>(h) * din + i]; }
    double w2(int i) const { return flat[static_cast<std::size_t>(h) * din + h + i]; }
    double b2() const { return flat[static_cast<std::size_t>(h) * din + 2 * h]; }
};

double mlp_forward(const ProblemSpec& spec, const Vec& flat, const Vec& x);

/// Mean over the validation set of (f_student(x) - f_teacher(x))^2.
double prediction_tracking_error(const ProblemSpec& spec, const Vec& student, const Vec& teacher,
                                 const std::vector<Vec>& validation);

/// Fixed covariate set drawn once and reused across all time steps.
std::vector<Vec> make_validation_set(const ProblemSpec& spec, int size, SeededStream& stream);

}  // namespace drifttrack::problems

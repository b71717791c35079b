#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "drifttrack/core.hpp"
#include "drifttrack/drift.hpp"
#include "drifttrack/problems.hpp"

// SGD and the generalized momentum update
//   psi_t     = theta_t + beta1 (theta_t - theta_{t-1})
//   theta_t+1 = psi_t - gamma * grad(psi_t) + beta2 (psi_t - psi_{t-1})
// with beta1 + beta2 = beta, beta1 * beta2 = 0: Heavy-Ball is (0, beta),
// Nesterov is (beta, 0), plain SGD is (0, 0).

namespace drifttrack::optim {

struct MomentumConfig {
    double beta1 = 0.0;
    double beta2 = 0.0;

    double beta() const { return beta1 + beta2; }
    void validate() const;

    static MomentumConfig sgd() { return {0.0, 0.0}; }
    static MomentumConfig heavy_ball(double beta) { return {0.0, beta}; }
    static MomentumConfig nesterov(double beta) { return {beta, 0.0}; }
    static MomentumConfig from_method(const std::string& method, double beta);
};

/// Three-slot state (theta_t, theta_{t-1}, psi_{t-1}); zero-momentum
/// initialization sets all three to theta_0.
struct OptimizerState {
    Vec theta;
    Vec theta_prev;
    Vec psi_prev;
    long long t = 0;

    static OptimizerState init(Vec theta0);
};

/// theta <- theta - gamma * grad. Throws divergence_error on NaN/Inf.
void step_sgd(OptimizerState& state, const problems::GradSample& grad, double gamma);

using GradAt = std::function<problems::GradSample(const Vec&)>;

/// One generalized momentum step; the oracle is evaluated at psi_t.
void step_momentum(OptimizerState& state, const MomentumConfig& cfg, double gamma,
                   const GradAt& grad_at);

/// Zero the velocity: theta_prev and psi_prev snap to theta; t preserved.
void restart_momentum(OptimizerState& state);

enum class ScheduleKind { constant, step_decay_sgd, step_decay_momentum };

/// Step-size schedule. Constant schedules carry gamma alone; step-decay
/// schedules carry the materialized epoch step sizes and lengths, and the
/// momentum variant resets the velocity at the start of every epoch.
struct Schedule {
    ScheduleKind kind = ScheduleKind::constant;
    double gamma = 0.0;

    double gamma0 = 0.0;
    double gamma_star = 0.0;
    std::vector<double> epoch_gamma;
    std::vector<long long> epoch_len;

    static Schedule constant(double gamma);

    long long total_horizon() const;
    double gamma_at(long long t) const;
    bool is_epoch_start(long long t) const;
    bool restarts_momentum() const { return kind == ScheduleKind::step_decay_momentum; }
    std::vector<long long> epoch_starts() const;
};

struct TrackingOptions {
    double divergence_threshold = 1e12;
    /// theta_0 = theta*_0 + init_offset when present.
    std::optional<Vec> init_offset;
    int validation_size = 2048;  // mlp prediction-space metric
};

/// Single-run tracking loop. The step from t to t+1 consumes a stochastic
/// gradient of the objective whose minimizer is path[t+1]; row t+1 of the
/// record stores the post-step tracking error, the sampled batch loss, and
/// the task metric (batch accuracy for logreg, parameter-space error for
/// mlp, whose tracking column is prediction-space).
RunRecord run_tracking(const problems::ProblemSpec& spec, const drift::MinimizerPath& path,
                       const MomentumConfig& cfg, const Schedule& sched, SeededStream stream,
                       const TrackingOptions& options = {});

}  // namespace drifttrack::optim

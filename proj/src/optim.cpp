#include "drifttrack/optim.hpp"

#include <cmath>

namespace drifttrack::optim {

void MomentumConfig::validate() const {
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw parameter_error("MomentumConfig: beta1, beta2 must lie in [0, 1)");
    }
    if (beta1 * beta2 != 0.0) {
        throw parameter_error("MomentumConfig: beta1 * beta2 must be 0");
    }
    if (beta() >= 1.0) throw parameter_error("MomentumConfig: beta1 + beta2 must be < 1");
}

MomentumConfig MomentumConfig::from_method(const std::string& method, double beta) {
    if (method == "sgd") return sgd();
    if (method == "hb") return heavy_ball(beta);
    if (method == "nag") return nesterov(beta);
    throw parameter_error("unknown method '" + method + "' (expected sgd|hb|nag)");
}

OptimizerState OptimizerState::init(Vec theta0) {
    OptimizerState s;
    s.theta_prev = theta0;
    s.psi_prev = theta0;
    s.theta = std::move(theta0);
    s.t = 0;
    return s;
}

namespace {

void require_finite(const Vec& v, const char* what) {
    if (!v.all_finite()) throw divergence_error(std::string(what) + " produced NaN/Inf");
}

}  // namespace

void step_sgd(OptimizerState& state, const problems::GradSample& grad, double gamma) {
    if (gamma <= 0.0) throw parameter_error("step_sgd: gamma must be > 0");
    if (grad.grad.size() != state.theta.size()) throw parameter_error("step_sgd: gradient dimension mismatch");
    Vec next = state.theta;
    next.axpy(-gamma, grad.grad);
    require_finite(next, "step_sgd");
    state.theta_prev = state.theta;
    state.psi_prev = state.theta_prev;
    state.theta = std::move(next);
    state.t += 1;
}

void step_momentum(OptimizerState& state, const MomentumConfig& cfg, double gamma,
                   const GradAt& grad_at) {
    cfg.validate();
    if (gamma <= 0.0) throw parameter_error("step_momentum: gamma must be > 0");
    const std::size_t d = state.theta.size();

    Vec psi = state.theta;
    if (cfg.beta1 != 0.0) {
        for (std::size_t i = 0; i < d; ++i) {
            psi[i] = state.theta[i] + cfg.beta1 * (state.theta[i] - state.theta_prev[i]);
        }
    }
    const problems::GradSample g = grad_at(psi);
    if (g.grad.size() != d) throw parameter_error("step_momentum: gradient dimension mismatch");

    Vec next(d);
    if (cfg.beta2 != 0.0) {
        for (std::size_t i = 0; i < d; ++i) {
            next[i] = psi[i] - gamma * g.grad[i] + cfg.beta2 * (psi[i] - state.psi_prev[i]);
        }
    } else {
        for (std::size_t i = 0; i < d; ++i) next[i] = psi[i] - gamma * g.grad[i];
    }
    require_finite(next, "step_momentum");
    state.theta_prev = state.theta;
    state.psi_prev = std::move(psi);
    state.theta = std::move(next);
    state.t += 1;
}

void restart_momentum(OptimizerState& state) {
    state.theta_prev = state.theta;
    state.psi_prev = state.theta;
}

Schedule Schedule::constant(double gamma) {
    if (gamma <= 0.0) throw parameter_error("Schedule::constant: gamma must be > 0");
    Schedule s;
    s.kind = ScheduleKind::constant;
    s.gamma = gamma;
    return s;
}

long long Schedule::total_horizon() const {
    if (kind == ScheduleKind::constant) return -1;  // open-ended
    long long total = 0;
    for (long long n : epoch_len) total += n;
    return total;
}

double Schedule::gamma_at(long long t) const {
    if (kind == ScheduleKind::constant) return gamma;
    long long acc = 0;
    for (std::size_t k = 0; k < epoch_len.size(); ++k) {
        acc += epoch_len[k];
        if (t < acc) return epoch_gamma[k];
    }
    return epoch_gamma.empty() ? gamma : epoch_gamma.back();
}

bool Schedule::is_epoch_start(long long t) const {
    if (kind == ScheduleKind::constant) return t == 0;
    long long acc = 0;
    for (std::size_t k = 0; k < epoch_len.size(); ++k) {
        if (t == acc) return true;
        acc += epoch_len[k];
        if (t < acc) return false;
    }
    return false;
}

std::vector<long long> Schedule::epoch_starts() const {
    std::vector<long long> starts;
    long long acc = 0;
    for (long long n : epoch_len) {
        starts.push_back(acc);
        acc += n;
    }
    return starts;
}

RunRecord run_tracking(const problems::ProblemSpec& spec, const drift::MinimizerPath& path,
                       const MomentumConfig& cfg, const Schedule& sched, SeededStream stream,
                       const TrackingOptions& options) {
    cfg.validate();
    const long long T = sched.total_horizon() >= 0 ? sched.total_horizon() : path.horizon();
    if (path.horizon() < T) {
        throw parameter_error("run_tracking: path horizon " + std::to_string(path.horizon()) +
                              " shorter than schedule horizon " + std::to_string(T));
    }

    SeededStream grad_stream = stream.fork(0x67726164);  // gradient noise
    std::vector<Vec> validation;
    if (spec.task == problems::Task::mlp) {
        SeededStream vstream = stream.fork(0x76616c69);
        validation = problems::make_validation_set(spec, options.validation_size, vstream);
    }

    Vec theta0 = path.at(0);
    if (options.init_offset) {
        if (options.init_offset->size() != theta0.size()) {
            throw parameter_error("run_tracking: init_offset dimension mismatch");
        }
        theta0 += *options.init_offset;
    }
    OptimizerState state = OptimizerState::init(std::move(theta0));

    RunRecord rec;
    rec.seed = stream.seed();
    rec.steps.reserve(static_cast<std::size_t>(T));

    const bool plain_sgd = (cfg.beta1 == 0.0 && cfg.beta2 == 0.0);
    for (long long t = 0; t < T; ++t) {
        const double gamma = sched.gamma_at(t);
        if (sched.restarts_momentum() && t > 0 && sched.is_epoch_start(t)) {
            restart_momentum(state);
        }
        const Vec& target = path.at(t + 1);
        double loss = 0.0;
        std::optional<double> batch_metric;
        try {
            if (plain_sgd) {
                const problems::GradSample g =
                    problems::stochastic_gradient(spec, state.theta, target, grad_stream);
                loss = g.loss;
                batch_metric = g.metric;
                step_sgd(state, g, gamma);
            } else {
                step_momentum(state, cfg, gamma, [&](const Vec& query) {
                    problems::GradSample g =
                        problems::stochastic_gradient(spec, query, target, grad_stream);
                    loss = g.loss;
                    batch_metric = g.metric;
                    return g;
                });
            }
        } catch (const divergence_error&) {
            rec.diverged = true;
            break;
        }

        StepRow row;
        row.t = t + 1;
        row.loss = loss;
        if (spec.task == problems::Task::mlp) {
            row.tracking_error_sq =
                problems::prediction_tracking_error(spec, state.theta, target, validation);
            row.metric = (state.theta - target).squared_norm();
        } else {
            row.tracking_error_sq = (state.theta - target).squared_norm();
            row.metric = batch_metric;
        }
        const bool finite = std::isfinite(row.tracking_error_sq) && std::isfinite(row.loss);
        if (!finite || row.tracking_error_sq > options.divergence_threshold) {
            rec.diverged = true;
            if (finite) rec.steps.push_back(row);
            break;
        }
        rec.steps.push_back(row);
    }
    return rec;
}

}  // namespace drifttrack::optim

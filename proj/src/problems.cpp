#include "drifttrack/problems.hpp"

#include <algorithm>
#include <cmath>

namespace drifttrack::problems {

std::string task_name(Task t) {
    switch (t) {
        case Task::quadratic: return "quadratic";
        case Task::linreg: return "linreg";
        case Task::logreg: return "logreg";
        case Task::mlp: return "mlp";
        case Task::bump: return "bump";
    }
    throw parameter_error("unknown task");
}

Task task_from_name(const std::string& name) {
    if (name == "quadratic") return Task::quadratic;
    if (name == "linreg") return Task::linreg;
    if (name == "logreg") return Task::logreg;
    if (name == "mlp") return Task::mlp;
    if (name == "bump") return Task::bump;
    throw parameter_error("unknown task '" + name + "'");
}

std::vector<double> log_spaced_eigs(int d, double kappa) {
    if (d < 1) throw parameter_error("log_spaced_eigs: d must be >= 1");
    if (kappa < 1.0) throw parameter_error("log_spaced_eigs: kappa must be >= 1");
    std::vector<double> eigs(static_cast<std::size_t>(d));
    if (d == 1) {
        eigs[0] = kappa;
        return eigs;
    }
    const double logk = std::log(kappa);
    for (int i = 0; i < d; ++i) {
        eigs[static_cast<std::size_t>(i)] = std::exp(logk * static_cast<double>(i) / (d - 1));
    }
    return eigs;
}

int ProblemSpec::param_dim() const {
    if (task == Task::mlp) return mlp_hidden * mlp_input + 2 * mlp_hidden + 1;
    return d;
}

ProblemSpec ProblemSpec::quadratic(int d, double mu, double sigma2) {
    if (mu <= 0.0) throw parameter_error("quadratic: mu must be > 0");
    if (sigma2 < 0.0) throw parameter_error("quadratic: sigma2 must be >= 0");
    ProblemSpec s;
    s.task = Task::quadratic;
    s.d = d;
    s.mu = mu;
    s.L = mu;
    s.kappa = 1.0;
    s.sigma2 = sigma2;
    return s;
}

ProblemSpec ProblemSpec::linreg(int d, double kappa, double sigma2, int batch) {
    ProblemSpec s;
    s.task = Task::linreg;
    s.d = d;
    s.kappa = kappa;
    s.mu = 1.0;
    s.L = kappa;
    s.sigma2 = sigma2;
    s.batch = batch;
    s.covariance_eigs = log_spaced_eigs(d, kappa);
    return s;
}

ProblemSpec ProblemSpec::logreg(int d, double kappa, double reg, int batch) {
    if (reg <= 0.0) throw parameter_error("logreg: reg must be > 0 for strong convexity");
    ProblemSpec s;
    s.task = Task::logreg;
    s.d = d;
    s.kappa = kappa;
    s.reg = reg;
    s.batch = batch;
    s.covariance_eigs = log_spaced_eigs(d, kappa);
    // Logistic Hessian is bounded by (1/4) E[x x^T] + reg I.
    s.mu = reg;
    s.L = 0.25 * kappa + reg;
    return s;
}

ProblemSpec ProblemSpec::mlp(int input, int hidden, double kappa, double sigma2, int batch) {
    ProblemSpec s;
    s.task = Task::mlp;
    s.mlp_input = input;
    s.mlp_hidden = hidden;
    s.d = input;
    s.kappa = kappa;
    s.sigma2 = sigma2;
    s.batch = batch;
    s.covariance_eigs = log_spaced_eigs(input, kappa);
    return s;
}

ProblemSpec ProblemSpec::bump(int d, double mu, double a, double r, int u, double sigma2) {
    ProblemSpec s;
    s.task = Task::bump;
    s.d = d;
    s.mu = mu;
    s.L = 2.0 * mu;
    s.kappa = s.L / s.mu;
    s.sigma2 = sigma2;
    s.bump_a = a;
    s.bump_r = r;
    s.bump_u = u;
    return s;
}

namespace {

Vec draw_covariate(const ProblemSpec& spec, SeededStream& stream) {
    Vec z = gaussian_vec(stream, static_cast<std::size_t>(spec.d), 1.0);
    if (!spec.covariance_eigs.empty()) {
        for (int i = 0; i < spec.d; ++i) {
            z[static_cast<std::size_t>(i)] *= std::sqrt(spec.covariance_eigs[static_cast<std::size_t>(i)]);
        }
    }
    return z;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_dims(const ProblemSpec& spec, const Vec& theta, const Vec& theta_star) {
    const auto pd = static_cast<std::size_t>(spec.param_dim());
    if (theta.size() != pd || theta_star.size() != pd) {
        throw parameter_error("gradient oracle: parameter dimension mismatch (expected " +
                              std::to_string(pd) + ")");
    }
}

// Forward pass caching preactivations for the batch backward pass.
struct MlpForward {
    std::vector<double> z;  // h preactivations
    std::vector<double> act;
    double out = 0.0;
};

MlpForward mlp_forward_cached(const ProblemSpec& spec, const Vec& flat, const Vec& x) {
    const int h = spec.mlp_hidden;
    const int din = spec.mlp_input;
    MlpForward f;
    f.z.resize(static_cast<std::size_t>(h));
    f.act.resize(static_cast<std::size_t>(h));
    const double* w1 = flat.data();
    const double* b1 = flat.data() + static_cast<std::size_t>(h) * din;
    const double* w2 = b1 + h;
    const double b2 = w2[h];
    double out = b2;
    for (int i = 0; i < h; ++i) {
        const double* row = w1 + static_cast<std::size_t>(i) * din;
        double z = b1[i];
        for (int j = 0; j < din; ++j) z += row[j] * x[static_cast<std::size_t>(j)];
        f.z[static_cast<std::size_t>(i)] = z;
        const double a = z > 0.0 ? z : 0.0;
        f.act[static_cast<std::size_t>(i)] = a;
        out += w2[i] * a;
    }
    f.out = out;
    return f;
}

}  // namespace

Batch sample_batch(const ProblemSpec& spec, SeededStream& stream) {
    Batch b;
    switch (spec.task) {
        case Task::quadratic:
        case Task::bump:
            b.xi = gaussian_vec(stream, static_cast<std::size_t>(spec.d), spec.sigma2);
            break;
        case Task::linreg:
        case Task::mlp: {
            b.x.reserve(static_cast<std::size_t>(spec.batch));
            b.eps.reserve(static_cast<std::size_t>(spec.batch));
            for (int k = 0; k < spec.batch; ++k) {
                b.x.push_back(draw_covariate(spec, stream));
                b.eps.push_back(spec.sigma2 > 0.0 ? std::sqrt(spec.sigma2) * stream.next_normal() : 0.0);
            }
            break;
        }
        case Task::logreg: {
            b.x.reserve(static_cast<std::size_t>(spec.batch));
            b.unif.reserve(static_cast<std::size_t>(spec.batch));
            for (int k = 0; k < spec.batch; ++k) {
                b.x.push_back(draw_covariate(spec, stream));
                b.unif.push_back(stream.next_uniform());
            }
            break;
        }
    }
    return b;
}

GradSample grad_on_batch(const ProblemSpec& spec, const Vec& theta, const Vec& theta_star,
                         const Batch& batch) {
    check_dims(spec, theta, theta_star);
    GradSample g;
    switch (spec.task) {
        case Task::quadratic: {
            Vec diff = theta - theta_star;
            g.loss = 0.5 * spec.mu * diff.squared_norm();
            diff *= spec.mu;
            diff += batch.xi;
            g.grad = std::move(diff);
            break;
        }
        case Task::bump: {
            hard::BumpLoss loss = hard::BumpLoss::make(spec.mu, spec.bump_a, spec.bump_r,
                                                       spec.bump_u, spec.d);
            g.loss = loss.value(theta);
            g.grad = loss.gradient(theta);
            g.grad += batch.xi;
            break;
        }
        case Task::linreg: {
            const int B = static_cast<int>(batch.x.size());
            Vec grad(theta.size());
            double loss = 0.0;
            for (int k = 0; k < B; ++k) {
                const Vec& x = batch.x[static_cast<std::size_t>(k)];
                const double y = x.dot(theta_star) + batch.eps[static_cast<std::size_t>(k)];
                const double resid = x.dot(theta) - y;
                loss += 0.5 * resid * resid;
                grad.axpy(resid / B, x);
            }
            g.loss = loss / B;
            g.grad = std::move(grad);
            break;
        }
        case Task::logreg: {
            const int B = static_cast<int>(batch.x.size());
            Vec grad(theta.size());
            double loss = 0.0;
            int correct = 0;
            for (int k = 0; k < B; ++k) {
                const Vec& x = batch.x[static_cast<std::size_t>(k)];
                const double p_star = sigmoid(x.dot(theta_star));
                const double y = batch.unif[static_cast<std::size_t>(k)] < p_star ? 1.0 : 0.0;
                const double z = x.dot(theta);
                const double p = sigmoid(z);
                // Numerically stable -log likelihood: log(1+e^z) - y z.
                loss += (z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - y * z;
                grad.axpy((p - y) / B, x);
                if ((p >= 0.5) == (y > 0.5)) ++correct;
            }
            loss /= B;
            loss += 0.5 * spec.reg * theta.squared_norm();
            grad.axpy(spec.reg, theta);
            g.loss = loss;
            g.grad = std::move(grad);
            g.metric = static_cast<double>(correct) / B;
            break;
        }
        case Task::mlp: {
            const int B = static_cast<int>(batch.x.size());
            const int h = spec.mlp_hidden;
            const int din = spec.mlp_input;
            Vec grad(theta.size());
            double* gw1 = grad.data();
            double* gb1 = grad.data() + static_cast<std::size_t>(h) * din;
            double* gw2 = gb1 + h;
            double* gb2 = gw2 + h;
            const double* w2 = theta.data() + static_cast<std::size_t>(h) * din + h;
            double loss = 0.0;
            for (int k = 0; k < B; ++k) {
                const Vec& x = batch.x[static_cast<std::size_t>(k)];
                const MlpForward teacher = mlp_forward_cached(spec, theta_star, x);
                const double y = teacher.out + batch.eps[static_cast<std::size_t>(k)];
                const MlpForward f = mlp_forward_cached(spec, theta, x);
                const double resid = f.out - y;
                loss += 0.5 * resid * resid;
                // d/dtheta of (f - y)^2 / 2 backpropagated through the student.
                const double up = resid / B;
                *gb2 += up;
                for (int i = 0; i < h; ++i) {
                    gw2[i] += up * f.act[static_cast<std::size_t>(i)];
                    if (f.z[static_cast<std::size_t>(i)] > 0.0) {
                        const double di = up * w2[i];
                        gb1[i] += di;
                        double* row = gw1 + static_cast<std::size_t>(i) * din;
                        for (int j = 0; j < din; ++j) row[j] += di * x[static_cast<std::size_t>(j)];
                    }
                }
            }
            g.loss = loss / B;
            g.grad = std::move(grad);
            break;
        }
    }
    return g;
}

GradSample stochastic_gradient(const ProblemSpec& spec, const Vec& theta, const Vec& theta_star,
                               SeededStream& stream) {
    check_dims(spec, theta, theta_star);
    const Batch b = sample_batch(spec, stream);
    return grad_on_batch(spec, theta, theta_star, b);
}

Vec population_gradient(const ProblemSpec& spec, const Vec& theta, const Vec& theta_star) {
    check_dims(spec, theta, theta_star);
    switch (spec.task) {
        case Task::quadratic: {
            Vec g = theta - theta_star;
            g *= spec.mu;
            return g;
        }
        case Task::linreg: {
            Vec g = theta - theta_star;
            for (int i = 0; i < spec.d; ++i) {
                g[static_cast<std::size_t>(i)] *= spec.covariance_eigs[static_cast<std::size_t>(i)];
            }
            return g;
        }
        case Task::bump: {
            hard::BumpLoss loss = hard::BumpLoss::make(spec.mu, spec.bump_a, spec.bump_r,
                                                       spec.bump_u, spec.d);
            return loss.gradient(theta);
        }
        default:
            throw unsupported_error("population_gradient: no closed form for task " +
                                    task_name(spec.task));
    }
}

MlpParams MlpParams::zeros(int din, int h) {
    MlpParams p;
    p.din = din;
    p.h = h;
    p.flat = Vec(static_cast<std::size_t>(h) * din + 2 * static_cast<std::size_t>(h) + 1);
    return p;
}

MlpParams MlpParams::init_gaussian(int din, int h, double stddev, SeededStream& stream) {
    MlpParams p = zeros(din, h);
    p.flat = gaussian_vec(stream, p.flat.size(), stddev * stddev);
    return p;
}

double mlp_forward(const ProblemSpec& spec, const Vec& flat, const Vec& x) {
    if (flat.size() != static_cast<std::size_t>(spec.param_dim())) {
        throw parameter_error("mlp_forward: parameter dimension mismatch");
    }
    return mlp_forward_cached(spec, flat, x).out;
}

double prediction_tracking_error(const ProblemSpec& spec, const Vec& student, const Vec& teacher,
                                 const std::vector<Vec>& validation) {
    if (validation.empty()) throw parameter_error("prediction_tracking_error: empty validation set");
    double s = 0.0;
    for (const Vec& x : validation) {
        const double diff = mlp_forward_cached(spec, student, x).out -
                            mlp_forward_cached(spec, teacher, x).out;
        s += diff * diff;
    }
    return s / static_cast<double>(validation.size());
}

std::vector<Vec> make_validation_set(const ProblemSpec& spec, int size, SeededStream& stream) {
    if (size < 1) throw parameter_error("make_validation_set: size must be >= 1");
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(size));
    for (int k = 0; k < size; ++k) out.push_back(draw_covariate(spec, stream));
    return out;
}

}  // namespace drifttrack::problems

// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Runs at desk scale in a few minutes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "drifttrack/bounds.hpp"
#include "drifttrack/core.hpp"
#include "drifttrack/hardinstance.hpp"
#include "drifttrack/runner.hpp"

namespace dt = drifttrack;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Criterion {
    std::string name;
    bool ok = true;
    std::vector<std::string> notes;

    explicit Criterion(std::string n) : name(std::move(n)) {}

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back("FAILED: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }

    void finish() const {
        std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name.c_str());
        for (const auto& n : notes) std::printf("       %s\n", n.c_str());
        std::fflush(stdout);
        if (!ok) ++g_failures;
    }
};

int worker_count() {
    if (const char* env = std::getenv("DRIFTTRACK_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 2;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

// ---------------------------------------------------------------------------

void criterion1_table_reproduction() {
    Criterion c("1. quadratic grid reproduces the benchmark table (orderings + spot checks, +-30%)");
    const std::string out_dir = (fs::temp_directory_path() / "dt_acceptance_quad").string();
    fs::remove_all(out_dir);
    const std::string config = R"({
        "task": "quadratic", "d": 100,
        "sigma2": [0.1, 0.5, 0.8],
        "method": ["sgd", "hb", "nag"],
        "beta": [0.5, 0.9, 0.95, 0.99],
        "gamma": [0.01, 0.1],
        "T": 5000, "seeds": 20,
        "drift": {"kind": "gaussian_ray", "delta_rw": 0.01},
        "master_seed": 20260808,
        "out_dir": ")" + out_dir + R"("
    })";
    auto configs = dt::runner::expand_grid(config);
    c.expect(configs.size() == 72, "expected 72 configs, got " + std::to_string(configs.size()));
    auto report = dt::runner::execute(configs, worker_count());
    c.expect(report.failed.empty(), "runs failed: " + std::to_string(report.failed.size()));

    std::map<std::tuple<double, double, double>, std::map<std::string, double>> cell;
    for (const auto& a : dt::runner::aggregate(out_dir)) {
        cell[{a.gamma, a.beta, a.sigma2}][a.method] = a.mean_final;
    }

    // (a) gamma = 0.10, beta >= 0.9: SGD < NAG < HB for every sigma^2.
    for (double beta : {0.9, 0.95, 0.99}) {
        for (double s2 : {0.1, 0.5, 0.8}) {
            auto& m = cell[{0.1, beta, s2}];
            c.expect(m["sgd"] < m["nag"] && m["nag"] < m["hb"],
                     "ordering SGD<NAG<HB at (0.1, " + fmt(beta) + ", " + fmt(s2) + "): " +
                         fmt(m["sgd"]) + " / " + fmt(m["nag"]) + " / " + fmt(m["hb"]));
        }
    }
    // (b) gamma = 0.01, beta = 0.5: HB < SGD for every sigma^2.
    for (double s2 : {0.1, 0.5, 0.8}) {
        auto& m = cell[{0.01, 0.5, s2}];
        c.expect(m["hb"] < m["sgd"], "HB<SGD at (0.01, 0.5, " + fmt(s2) + "): " + fmt(m["hb"]) +
                                         " vs " + fmt(m["sgd"]));
    }
    // (c) spot checks within +-30% relative.
    struct Spot {
        double gamma, beta, s2, expect;
        const char* method;
    };
    for (const Spot s : {Spot{0.01, 0.5, 0.1, 0.34, "hb"}, Spot{0.01, 0.99, 0.8, 38.80, "hb"},
                         Spot{0.1, 0.99, 0.8, 401.37, "hb"}, Spot{0.1, 0.99, 0.8, 4.11, "sgd"}}) {
        const double got = cell[{s.gamma, s.beta, s.s2}][s.method];
        const double rel = std::fabs(got - s.expect) / s.expect;
        c.note(std::string(s.method) + "(" + fmt(s.gamma) + "," + fmt(s.beta) + "," + fmt(s.s2) +
               ") = " + fmt(got) + " vs " + fmt(s.expect) + " (" + fmt(100 * rel) + "%)");
        c.expect(rel <= 0.30, "spot check out of tolerance");
    }
    c.finish();
}

void criterion2_beta_zero_exactness() {
    Criterion c("2. SGDM(beta=0) and SGD produce bitwise-identical records on every task");
    using dt::problems::ProblemSpec;
    struct Case {
        const char* name;
        ProblemSpec spec;
        long long T;
    };
    const std::vector<Case> cases = {
        {"quadratic", ProblemSpec::quadratic(20, 1.0, 0.5), 200},
        {"linreg", ProblemSpec::linreg(10, 10.0, 0.5, 32), 100},
        {"logreg", ProblemSpec::logreg(10, 10.0, 1e-3, 32), 100},
        {"mlp", ProblemSpec::mlp(20, 16, 1.0, 0.25, 8), 30},
        {"bump", ProblemSpec::bump(3, 1.0, 0.001, 1.0, +1, 0.25), 100},
    };
    for (const auto& k : cases) {
        dt::SeededStream ps(101, 1);
        const auto path = dt::drift::generate_path(
            dt::drift::DriftProcess::gaussian_walk(0.01),
            dt::Vec(static_cast<std::size_t>(k.spec.param_dim())), k.T, ps);
        dt::optim::TrackingOptions opts;
        opts.validation_size = 64;
        auto rec_sgd = dt::optim::run_tracking(k.spec, path, dt::optim::MomentumConfig::sgd(),
                                               dt::optim::Schedule::constant(0.01),
                                               dt::SeededStream(101, 2), opts);
        dt::optim::MomentumConfig zero{0.0, 0.0};
        auto rec_mom = dt::optim::run_tracking(k.spec, path, zero,
                                               dt::optim::Schedule::constant(0.01),
                                               dt::SeededStream(101, 2), opts);
        rec_sgd.run_id = rec_mom.run_id = k.name;
        bool same = dt::same_serialized(rec_sgd, rec_mom) &&
                    rec_sgd.steps.size() == static_cast<std::size_t>(k.T);
        c.expect(same, std::string("records differ on task ") + k.name);
    }
    c.finish();
}

void criterion3_hb_stationary_variance() {
    Criterion c("3. HB stationary variance: simulation within 5%, Lyapunov residual <= 1e-12");
    const double mu = 1.0;
    int idx = 0;
    double worst = 0.0;
    for (double beta : {0.0, 0.5, 0.9}) {
        for (double gamma : {0.05, 0.2}) {
            for (double s2 : {0.5, 1.0}) {
                const auto v = dt::bounds::hb_stationary_variance(mu, gamma, beta, s2);
                c.expect(v.lyapunov_residual <= 1e-12,
                         "Lyapunov residual " + fmt(v.lyapunov_residual) + " at combo " +
                             std::to_string(idx));
                // 1e6-step one-dimensional simulation.
                dt::SeededStream s(300 + static_cast<std::uint64_t>(idx), 0);
                const double sd = std::sqrt(s2);
                double x = 0.0, xp = 0.0;
                const long long burn = 100000, N = 1000000;
                double sum = 0.0, sumsq = 0.0;
                for (long long t = 0; t < burn + N; ++t) {
                    const double xn =
                        (1.0 + beta - gamma * mu) * x - beta * xp - gamma * sd * s.next_normal();
                    xp = x;
                    x = xn;
                    if (t >= burn) {
                        sum += x;
                        sumsq += x * x;
                    }
                }
                const double m = sum / N;
                const double var = sumsq / N - m * m;
                const double rel = std::fabs(var - v.v) / v.v;
                worst = std::max(worst, rel);
                c.expect(rel <= 0.05, "sample variance off by " + fmt(100 * rel) + "% at (beta=" +
                                          fmt(beta) + ", gamma=" + fmt(gamma) + ", s2=" + fmt(s2) +
                                          ")");
                c.expect(v.lower_bound_ok, "closed-form lower bound violated");
                ++idx;
            }
        }
    }
    c.note("12 combos, worst relative variance error " + fmt(100 * worst) + "%");
    c.finish();
}

void criterion4_stability_certification() {
    Criterion c("4. stability grid: spectral radius < 1 under the cap, and runs converge");
    // Spectral-radius-only sweep on the harsh grid.
    for (double beta : {0.0, 0.5, 0.9, 0.99}) {
        for (double kappa : {1.0, 10.0, 1000.0}) {
            dt::bounds::RegimeParams p;
            p.mu = 1.0;
            p.L = kappa;
            p.beta = beta;
            for (int i = 1; i <= 10; ++i) {
                p.gamma = (i / 10.0) * dt::bounds::cap_mom(p);
                for (double b1 : {0.0, beta}) {
                    const auto m = dt::bounds::stability_matrix_Gamma(p, b1, beta - b1);
                    c.expect(m.spectral_radius < 1.0,
                             "radius >= 1 at beta=" + fmt(beta) + " kappa=" + fmt(kappa) +
                                 " frac=" + fmt(i / 10.0));
                }
            }
        }
    }

    // 10 x 10 x 3 grid with convergence runs on a two-eigenvalue quadratic.
    const std::vector<double> betas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.95};
    const std::vector<double> kappas = {1.0, 2.0, 5.0};
    long long worst_steps = 0;
    for (double beta : betas) {
        for (double kappa : kappas) {
            dt::bounds::RegimeParams p;
            p.mu = 1.0;
            p.L = kappa;
            p.beta = beta;
            for (int i = 1; i <= 10; ++i) {
                const double gamma = (i / 10.0) * dt::bounds::cap_mom(p);
                p.gamma = gamma;
                const auto m = dt::bounds::stability_matrix_Gamma(p, 0.0, beta);
                c.expect(m.spectral_radius < 1.0, "radius >= 1 in run grid");

                auto run = [&](dt::optim::MomentumConfig cfg) {
                    auto st = dt::optim::OptimizerState::init(
                        dt::Vec(std::vector<double>{1.0, 1.0}));
                    const double init = st.theta.squared_norm();
                    long long t = 0;
                    const long long tmax = 50000000;
                    while (st.theta.squared_norm() > 1e-8 * init && t < tmax) {
                        dt::optim::step_momentum(st, cfg, gamma, [&](const dt::Vec& q) {
                            dt::problems::GradSample g;
                            g.grad = dt::Vec(std::vector<double>{1.0 * q[0], kappa * q[1]});
                            return g;
                        });
                        ++t;
                    }
                    worst_steps = std::max(worst_steps, t);
                    return st.theta.squared_norm() <= 1e-8 * init;
                };
                c.expect(run(dt::optim::MomentumConfig::heavy_ball(beta)),
                         "HB run failed to converge at beta=" + fmt(beta) + " kappa=" +
                             fmt(kappa) + " frac=" + fmt(i / 10.0));
                c.expect(run(dt::optim::MomentumConfig::nesterov(beta)),
                         "NAG run failed to converge at beta=" + fmt(beta) + " kappa=" +
                             fmt(kappa) + " frac=" + fmt(i / 10.0));
            }
        }
    }
    c.note("longest convergence run: " + std::to_string(worst_steps) + " steps");
    c.finish();
}

void criterion5_schedules() {
    Criterion c("5. step-decay schedules reach 8x the optimized floors");
    dt::bounds::RegimeParams p;
    p.mu = 1.0;
    p.L = 5.0;
    p.beta = 0.5;
    p.gamma = 0.01;
    p.sigma = 1.0;
    p.Delta = 0.01;

    // Oracle: golden-section minimization agrees with closed forms to 1e-10.
    auto golden = [](const std::function<double(double)>& f, double lo, double hi) {
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = lo, b = hi;
        for (int it = 0; it < 400; ++it) {
            const double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
            if (f(x1) < f(x2)) {
                b = x2;
            } else {
                a = x1;
            }
        }
        return 0.5 * (a + b);
    };
    const auto fs_sgd = dt::bounds::sgd_floor_and_gamma(p);
    const double gnum = golden([&](double g) { return dt::bounds::sgd_floor_at(p, g); }, 1e-7,
                               1.0 / (2.0 * p.L));
    const double Enum = dt::bounds::sgd_floor_at(p, gnum);
    c.expect(std::fabs(Enum - fs_sgd.floor) / fs_sgd.floor < 1e-10,
             "SGD floor closed form vs numerical: " + fmt(fs_sgd.floor) + " vs " + fmt(Enum));
    const auto fm = dt::bounds::momentum_floor_and_gamma(p);
    const double gnum_m = golden([&](double g) { return dt::bounds::momentum_floor_at(p, g); },
                                 1e-9, dt::bounds::cap_mom(p));
    const double Enum_m = dt::bounds::momentum_floor_at(p, gnum_m);
    c.expect(std::fabs(Enum_m - fm.floor) / fm.floor < 1e-10,
             "momentum floor closed form vs numerical: " + fmt(fm.floor) + " vs " + fmt(Enum_m));

    const double e0_sq = 10.0;
    const auto burn = dt::bounds::burn_in_times(p, e0_sq);

    // Drifting 1-D quadratic with E||xi||^2 = sigma^2 and E[Delta^2] = Delta^2.
    auto run_final_mean = [&](const dt::optim::Schedule& sched, dt::optim::MomentumConfig cfg) {
        const int seeds = 48;
        std::vector<double> finals;
        for (int s = 0; s < seeds; ++s) {
            auto spec = dt::problems::ProblemSpec::quadratic(1, p.mu, p.sigma * p.sigma);
            dt::SeededStream ps(500 + static_cast<std::uint64_t>(s), 11);
            const auto path = dt::drift::generate_path(
                dt::drift::DriftProcess::gaussian_walk(p.Delta), dt::Vec(1),
                sched.total_horizon(), ps);
            dt::optim::TrackingOptions opts;
            opts.init_offset = dt::Vec(std::vector<double>{std::sqrt(e0_sq)});
            auto rec = dt::optim::run_tracking(spec, path, cfg, sched,
                                               dt::SeededStream(500 + s, 12), opts);
            if (!rec.diverged && !rec.steps.empty()) {
                finals.push_back(rec.steps.back().tracking_error_sq);
            }
        }
        return dt::mean(finals);
    };

    const double final_sgd = run_final_mean(burn.schedule_sgd, dt::optim::MomentumConfig::sgd());
    c.note("SGD schedule: K=" + std::to_string(burn.schedule_sgd.epoch_gamma.size()) + ", T=" +
           std::to_string(burn.schedule_sgd.total_horizon()) + ", final " + fmt(final_sgd) +
           " vs 8E = " + fmt(8.0 * fs_sgd.floor));
    c.expect(final_sgd <= 8.0 * fs_sgd.floor, "SGD step-decay missed 8x floor");

    const double final_mom =
        run_final_mean(burn.schedule_mom, dt::optim::MomentumConfig::heavy_ball(p.beta));
    c.note("momentum schedule: K=" + std::to_string(burn.schedule_mom.epoch_gamma.size()) +
           ", T=" + std::to_string(burn.schedule_mom.total_horizon()) + ", final " +
           fmt(final_mom) + " vs 8E_beta = " + fmt(8.0 * fm.floor) +
           (fm.boundary ? " (gamma* at the stability cap)" : ""));
    c.expect(final_mom <= 8.0 * fm.floor, "momentum step-decay missed 8x floor");
    c.finish();
}

void criterion6_drift_functionals() {
    Criterion c("6. drift functionals match O(T^2) brute force to 1e-12 relative");
    dt::bounds::RegimeParams p;
    p.mu = 1.0;
    p.L = 1.0;
    p.beta = 0.6;
    p.gamma = 0.03;
    const double rho = 1.0 - p.gamma * p.mu / 2.0;
    const double rho_t =
        1.0 - p.gamma * p.gamma * p.mu * p.mu / (4.0 * (1.0 - p.beta) * (1.0 - p.beta));

    // Random drift sequence and its forcing-vector sequence.
    dt::SeededStream s(600, 0);
    const long T = 1000;
    const auto path = dt::drift::generate_path(dt::drift::DriftProcess::gaussian_walk(0.05),
                                               dt::Vec(4), T, s);
    const auto delta_sq = dt::drift::drift_increments(path);
    const auto b_sq = dt::bounds::forcing_vectors(path, p, 0.0, p.gamma, p.mu);

    // O(T^2) oracle: every prefix recomputed as a direct sum.
    auto brute = [](const std::vector<double>& seq, double rate, long t) {
        double acc = 0.0;
        for (long l = 0; l < t; ++l) {
            acc += std::pow(rate, static_cast<double>(t - l - 1)) * seq[static_cast<std::size_t>(l)];
        }
        return acc;
    };
    double worst = 0.0;
    for (long t : {10L, 100L, 500L, 1000L}) {
        std::vector<double> prefix_d(delta_sq.begin(), delta_sq.begin() + t);
        std::vector<double> prefix_b(b_sq.begin(), b_sq.begin() + t);
        const auto f = dt::bounds::drift_functionals(prefix_d, p);
        const auto fb = dt::bounds::drift_functionals(prefix_b, p);
        const double d1 = std::fabs(f.D - brute(delta_sq, rho, t)) / brute(delta_sq, rho, t);
        const double d2 =
            std::fabs(f.D2 - brute(delta_sq, rho * rho, t)) / brute(delta_sq, rho * rho, t);
        const double d3 =
            std::fabs(fb.Dmom - brute(b_sq, rho_t, t)) / std::max(1e-300, brute(b_sq, rho_t, t));
        const double d4 = std::fabs(fb.Dmom2 - brute(b_sq, rho_t * rho_t, t)) /
                          std::max(1e-300, brute(b_sq, rho_t * rho_t, t));
        worst = std::max({worst, d1, d2, d3, d4});
    }
    c.note("worst relative deviation " + fmt(worst));
    c.expect(worst <= 1e-12, "brute-force mismatch " + fmt(worst));

    // Single-burst forgetting: weight is exactly rho^k.
    for (long k : {0L, 7L, 40L}) {
        std::vector<double> burst(200, 0.0);
        burst[static_cast<std::size_t>(200 - 1 - k)] = 1.0;
        const auto f = dt::bounds::drift_functionals(burst, p);
        const double expect = std::pow(rho, static_cast<double>(k));
        c.expect(std::fabs(f.D - expect) <= 1e-13 * expect,
                 "burst weight at k=" + std::to_string(k));
    }
    c.finish();
}

void criterion7_hard_instances() {
    Criterion c("7. hard-instance suite (gradients, discrepancy, packing, GVar, Fano, KL)");
    const double c_psi = dt::hard::compute_c_psi();

    // (a) analytic bump gradients vs finite differences, 1e-6.
    {
        const auto loss = dt::hard::BumpLoss::make(1.0, 0.05, 12.5 * c_psi * 0.05, +1, 3);
        dt::SeededStream s(700, 0);
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            dt::Vec x = dt::gaussian_vec(s, 3, 1.0);
            x *= (1.2 * loss.r * s.next_uniform()) / x.norm();
            const dt::Vec an = loss.gradient(x);
            dt::Vec fd(3);
            for (std::size_t i = 0; i < 3; ++i) {
                dt::Vec xp = x, xm = x;
                xp[i] += 1e-6;
                xm[i] -= 1e-6;
                fd[i] = (loss.value(xp) - loss.value(xm)) / 2e-6;
            }
            worst = std::max(worst, (an - fd).norm() / std::max(1.0, fd.norm()));
        }
        c.note("(a) worst FD deviation " + fmt(worst));
        c.expect(worst <= 1e-6, "bump gradient FD check");
    }

    // (b) grid discrepancy >= mu a^2 / 8.
    for (auto [mu, a] : std::vector<std::pair<double, double>>{{1, 0.05}, {1, 0.1}, {2, 0.1}}) {
        const double r = 12.5 * c_psi * a;
        const auto plus = dt::hard::BumpLoss::make(mu, a, r, +1, 2);
        const auto minus = dt::hard::BumpLoss::make(mu, a, r, -1, 2);
        const auto res = dt::hard::discrepancy_lower(plus, minus);
        c.expect(res.chi >= mu * a * a / 8.0 - res.tolerance,
                 "chi below bound at mu=" + fmt(mu) + " a=" + fmt(a));
    }

    // (c) packing sizes and exhaustive distance scan at J in {16, 32, 64}.
    for (long J : {16L, 32L, 64L}) {
        dt::SeededStream s(710 + static_cast<std::uint64_t>(J), 0);
        const auto fam = dt::hard::build_block_family(16 * J, J, 1.0, 0.05, 1.0, 2, 2.0, 1.0, s);
        const double needed = std::exp(0.0625 * static_cast<double>(J));
        c.note("(c) J=" + std::to_string(J) + ": " + std::to_string(fam.codewords.size()) +
               " codewords (need >= " + fmt(needed) + "), min distance " +
               std::to_string(dt::hard::min_pairwise_hamming(fam)));
        c.expect(static_cast<double>(fam.codewords.size()) >= needed, "packing size bound");
        c.expect(dt::hard::min_pairwise_hamming(fam) >= J / 16, "packing distance bound");
    }

    // (d) single-switch GVar scaling constant stable within 10% across r.
    {
        std::vector<double> cs;
        for (double r : {0.1, 0.2, 0.4}) {
            const double a = r / 4.0;
            auto gp = [=](const dt::Vec& x) { return dt::hard::bump_gradient_raw(1.0, a, r, +1, x); };
            auto gm = [=](const dt::Vec& x) { return dt::hard::bump_gradient_raw(1.0, a, r, -1, x); };
            dt::hard::GvarOptions opt;
            opt.nodes = 90000;
            const auto res = dt::hard::gvar({gp, gm}, 2, opt);
            cs.push_back(res.value / (1.0 * a * r));
        }
        const double cmin = *std::min_element(cs.begin(), cs.end());
        const double cmax = *std::max_element(cs.begin(), cs.end());
        c.note("(d) fitted constants " + fmt(cs[0]) + ", " + fmt(cs[1]) + ", " + fmt(cs[2]));
        c.expect((cmax - cmin) / cmin <= 0.10, "GVar scaling constant varies more than 10%");
    }

    // (e) Fano arithmetic at kl = 0, M = 4.
    {
        dt::SeededStream s(720, 0);
        auto fam = dt::hard::build_block_family(64, 4, 1.0, 0.05, 1.0, 1, 2.0, 1.0, s);
        fam.codewords.resize(4);
        c.expect(dt::hard::fano_error_lower(fam, 0.0) == 0.5, "Fano(0, 4) != 0.5");
        c.expect(dt::hard::fano_error_lower(fam, std::log(4.0)) == 0.0, "Fano vacuous case");
    }

    // (f) u = v KL and never-in-bump KL are exactly zero.
    {
        dt::SeededStream s(721, 0);
        const double a = 0.05, r = 12.5 * c_psi * a;
        const auto fam = dt::hard::build_block_family(128, 4, 1.0, a, r, 2, 2.0, 1.0, s);
        const auto u = dt::hard::make_env(fam, 0);
        const auto v = dt::hard::make_env(fam, 1);
        std::vector<dt::Vec> inside(128, dt::Vec(2));
        std::vector<dt::Vec> outside(128, dt::Vec(std::vector<double>{1.5 * r, 0.0}));
        c.expect(dt::hard::kl_along_trajectory(inside, u, u, 1.0) == 0.0, "KL(u, u) != 0");
        c.expect(dt::hard::kl_along_trajectory(outside, u, v, 1.0) == 0.0,
                 "KL outside the bump != 0");
        c.expect(dt::hard::kl_along_trajectory(inside, u, v, 1.0) > 0.0,
                 "KL inside the bump should be positive");
    }
    c.finish();
}

void criterion8_inertia_regime() {
    Criterion c("8. inertia regime: half-life linear in (1-beta)/(gamma mu); regret linear in T");
    // Half-life of the exact noiseless companion recursion at the cap
    // gamma = c0 (1-beta)^2 / L with c0 = 1/4, mu = L = 1.
    std::vector<double> xs, ys;
    for (double beta : {0.5, 0.7, 0.9, 0.95}) {
        const double gamma = 0.25 * (1.0 - beta) * (1.0 - beta);
        double ep = 1.0, ec = 1.0;
        long long t = 0;
        while (std::fabs(ec) > 0.5 && t < 100000000) {
            const double en = (1.0 + beta - gamma) * ec - beta * ep;
            ep = ec;
            ec = en;
            ++t;
        }
        xs.push_back((1.0 - beta) / gamma);
        ys.push_back(static_cast<double>(t));
        // Factor-4 slack: measured half-life >= tau / 4.
        const auto rt = dt::bounds::response_time(1.0, gamma, beta);
        c.expect(static_cast<double>(t) >= static_cast<double>(rt.tau) / 4.0,
                 "half-life below tau/4 at beta=" + fmt(beta));
    }
    const auto fit = dt::linear_fit(xs, ys);
    c.note("half-life fit: slope " + fmt(fit.slope) + ", R^2 = " + fmt(fit.r_squared));
    c.expect(fit.r_squared >= 0.95, "half-life fit R^2 " + fmt(fit.r_squared) + " < 0.95");

    // Regret grows linearly in T: per-step regret stable within +-20%.
    std::vector<double> per_step;
    for (long long T : {2000LL, 4000LL, 8000LL}) {
        dt::SeededStream s(800, 0);
        const auto res =
            dt::hard::inertia_regret_experiment(0.9, 0.25 * 0.01, 1.0, 0.5, 0.0, T, 1, s);
        per_step.push_back(res.regret_mean / static_cast<double>(T));
    }
    const double pmin = *std::min_element(per_step.begin(), per_step.end());
    const double pmax = *std::max_element(per_step.begin(), per_step.end());
    c.note("regret per step at T=2k/4k/8k: " + fmt(per_step[0]) + ", " + fmt(per_step[1]) + ", " +
           fmt(per_step[2]));
    c.expect((pmax - pmin) / pmin <= 0.20, "regret slope varies more than 20%");
    c.finish();
}

void criterion9_occupation_scaling() {
    Criterion c("9. occupation time at the rare-visit radius scales like (1-beta)");
    const double mu = 1.0, gamma = 0.01, s2 = 1.0;
    const long long T = 100000;
    const int seeds = 100;
    std::vector<double> ratios;
    for (double beta : {0.5, 0.9, 0.99}) {
        const double r = std::sqrt(s2) * std::sqrt(gamma * (1.0 - beta) / mu);
        double occ_acc = 0.0;
        for (int sd = 0; sd < seeds; ++sd) {
            dt::SeededStream s(900 + static_cast<std::uint64_t>(sd),
                               static_cast<std::uint64_t>(beta * 100));
            double x = 0.0, xp = 0.0;
            long occ = 0;
            for (long long t = 0; t < T; ++t) {
                const double xn = (1.0 + beta - gamma * mu) * x - beta * xp -
                                  gamma * std::sqrt(s2) * s.next_normal();
                xp = x;
                x = xn;
                if (std::fabs(x) <= r) ++occ;
            }
            occ_acc += static_cast<double>(occ);
        }
        const double mean_occ = occ_acc / seeds;
        ratios.push_back(mean_occ / (static_cast<double>(T) * (1.0 - beta)));
        c.note("beta=" + fmt(beta) + ": mean Occ " + fmt(mean_occ) + ", Occ/(T(1-beta)) = " +
               fmt(ratios.back()));
    }
    const double rmin = *std::min_element(ratios.begin(), ratios.end());
    const double rmax = *std::max_element(ratios.begin(), ratios.end());
    c.expect(rmax / rmin <= 2.0, "occupation scaling outside factor 2");
    c.finish();
}

}  // namespace

int main() {
    criterion1_table_reproduction();
    criterion2_beta_zero_exactness();
    criterion3_hb_stationary_variance();
    criterion4_stability_certification();
    criterion5_schedules();
    criterion6_drift_functionals();
    criterion7_hard_instances();
    criterion8_inertia_regime();
    criterion9_occupation_scaling();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}

#include "drifttrack/hardinstance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "drifttrack/bounds.hpp"

namespace drifttrack::hard {

namespace {

double gap_max(const BumpLoss& plus, const BumpLoss& minus, double plus_min, double minus_min,
               const Vec& theta) {
    return std::max(plus.value(theta) - plus_min, minus.value(theta) - minus_min);
}

}  // namespace

DiscrepancyResult discrepancy_lower(const BumpLoss& plus, const BumpLoss& minus,
                                    const DiscrepancyGrid& grid) {
    if (plus.mu != minus.mu || plus.a != minus.a || plus.r != minus.r || plus.d != minus.d) {
        throw parameter_error("discrepancy_lower: losses must share (mu, a, r, d)");
    }
    if (plus.u == minus.u) throw parameter_error("discrepancy_lower: losses must have opposite signs");
    const double mu = plus.mu;
    const double a = plus.a;
    const int d = plus.d;
    const double plus_min = plus.min_value();
    const double minus_min = minus.min_value();

    double best = std::numeric_limits<double>::infinity();

    // Fine sweep along the e1 axis; by symmetry the true minimizer lies on it.
    Vec theta(static_cast<std::size_t>(d));
    for (int i = 0; i < grid.axis_points; ++i) {
        const double s = -grid.axis_halfwidth * a +
                         2.0 * grid.axis_halfwidth * a * static_cast<double>(i) /
                             (grid.axis_points - 1);
        theta[0] = s;
        best = std::min(best, gap_max(plus, minus, plus_min, minus_min, theta));
    }
    const double axis_spacing = 2.0 * grid.axis_halfwidth * a / (grid.axis_points - 1);

    // Coarse box over the first min(d, 3) coordinates as a symmetry audit.
    const int dims = std::min(d, 3);
    if (dims >= 2 && grid.box_points_per_dim >= 2) {
        const int n = grid.box_points_per_dim;
        const double h = grid.box_halfwidth * a;
        std::vector<int> idx(static_cast<std::size_t>(dims), 0);
        Vec point(static_cast<std::size_t>(d));
        for (;;) {
            for (int k = 0; k < dims; ++k) {
                point[static_cast<std::size_t>(k)] =
                    -h + 2.0 * h * static_cast<double>(idx[static_cast<std::size_t>(k)]) / (n - 1);
            }
            best = std::min(best, gap_max(plus, minus, plus_min, minus_min, point));
            int k = 0;
            while (k < dims && ++idx[static_cast<std::size_t>(k)] == n) {
                idx[static_cast<std::size_t>(k)] = 0;
                ++k;
            }
            if (k == dims) break;
        }
    }

    // Lipschitz bound of the gap on the searched region: grad g_u is at
    // most mu ||theta|| + mu a (1 + C_psi) there.
    const double theta_max = std::max(grid.axis_halfwidth, grid.box_halfwidth) * a;
    const double lip = mu * theta_max + mu * a * (1.0 + plus.C_psi);
    DiscrepancyResult out;
    out.tolerance = lip * axis_spacing;
    out.chi = best;
    if (out.tolerance > mu * a * a / 16.0) {
        throw resolution_error("discrepancy_lower: grid tolerance " + format_double(out.tolerance) +
                               " exceeds mu a^2 / 16");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.

namespace {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(static_cast<std::size_t>(n));
    weights.resize(static_cast<std::size_t>(n));
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

struct LpAccumulator {
    double p;
    bool is_sup;
    double acc = 0.0;

    explicit LpAccumulator(double p_) : p(p_), is_sup(!std::isfinite(p_)) {}
    void add(double norm, double weight) {
        if (is_sup) {
            acc = std::max(acc, norm);
        } else {
            acc += weight * std::pow(norm, p);
        }
    }
    double finish() const { return is_sup ? acc : std::pow(acc, 1.0 / p); }
};

/// One pairwise ||grad_{t+1} - grad_t||_p over the box via tensor quadrature.
double lp_tensor(const GradFn& g1, const GradFn& g2, int d, double h, int per_dim, double p) {
    std::vector<double> nodes, weights;
    gauss_legendre(per_dim, nodes, weights);
    LpAccumulator acc(p);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    Vec x(static_cast<std::size_t>(d));
    for (;;) {
        double w = 1.0;
        for (int k = 0; k < d; ++k) {
            x[static_cast<std::size_t>(k)] = h * nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
            w *= h * weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])];
        }
        acc.add((g2(x) - g1(x)).norm(), w);
        int k = 0;
        while (k < d && ++idx[static_cast<std::size_t>(k)] == per_dim) {
            idx[static_cast<std::size_t>(k)] = 0;
            ++k;
        }
        if (k == d) break;
    }
    return acc.finish();
}

double lp_monte_carlo(const GradFn& g1, const GradFn& g2, int d, double h, int n, double p,
                      SeededStream& stream) {
    LpAccumulator acc(p);
    const double volume = std::pow(2.0 * h, d);
    Vec x(static_cast<std::size_t>(d));
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) {
            x[static_cast<std::size_t>(k)] = h * (2.0 * stream.next_uniform() - 1.0);
        }
        acc.add((g2(x) - g1(x)).norm(), volume / n);
    }
    return acc.finish();
}

}  // namespace

GvarResult gvar(const std::vector<GradFn>& grads, int d, const GvarOptions& options) {
    if (grads.size() < 2) throw parameter_error("gvar: need at least two gradient fields");
    if (d < 1) throw parameter_error("gvar: d must be >= 1");
    if (options.p < 1.0 || options.q < 1.0) throw parameter_error("gvar: p, q must be >= 1");
    const std::size_t T = grads.size();

    auto lp_all = [&](int nodes_total) {
        std::vector<double> lps;
        lps.reserve(T - 1);
        for (std::size_t t = 0; t + 1 < T; ++t) {
            double lp;
            if (d <= 3) {
                const int per_dim =
                    std::max(2, static_cast<int>(std::round(std::pow(nodes_total, 1.0 / d))));
                lp = lp_tensor(grads[t], grads[t + 1], d, options.box_halfwidth, per_dim, options.p);
            } else {
                SeededStream mc(options.mc_seed, t);
                lp = lp_monte_carlo(grads[t], grads[t + 1], d, options.box_halfwidth, nodes_total,
                                    options.p, mc);
            }
            lps.push_back(lp);
        }
        return lps;
    };

    auto aggregate = [&](const std::vector<double>& lps) {
        if (!std::isfinite(options.q)) {
            double m = 0.0;
            for (double v : lps) m = std::max(m, v);
            return m;
        }
        double s = 0.0;
        for (double v : lps) s += std::pow(v, options.q);
        if (options.normalized) s /= static_cast<double>(T);
        return std::pow(s, 1.0 / options.q);
    };

    const double coarse = aggregate(lp_all(std::max(16, options.nodes / 4)));
    const double fine = aggregate(lp_all(options.nodes));
    GvarResult out;
    out.value = fine;
    out.error_estimate = std::fabs(fine - coarse);
    return out;
}

// ---------------------------------------------------------------------------
// J-block family and constant-weight packing.

long BlockFamily::block_of(long t) const {
    if (t < 0 || t >= T) throw parameter_error("BlockFamily::block_of: t out of range");
    // First (T mod J) blocks have length Delta_T + 1.
    const long rem = T % J;
    const long long_len = Delta_T + 1;
    if (rem > 0 && t < rem * long_len) return t / long_len;
    const long t2 = t - rem * long_len;
    return rem + t2 / Delta_T;
}

int BlockFamily::sign_at(const std::vector<std::int8_t>& codeword, long t) const {
    return codeword[static_cast<std::size_t>(block_of(t))];
}

BlockFamily build_block_family(long T, long J, double mu, double a, double r, int d, double p,
                               double q, SeededStream& stream, const PackingOptions& opts) {
    if (J < 2 || J % 2 != 0) throw parameter_error("build_block_family: J must be even and >= 2");
    if (J > T) throw parameter_error("build_block_family: J must be <= T");
    BlockFamily fam;
    fam.T = T;
    fam.J = J;
    fam.Delta_T = T / J;
    fam.mu = mu;
    fam.a = a;
    fam.r = r;
    fam.d = d;
    fam.p = p;
    fam.q = q;
    fam.C_psi = compute_c_psi();
    const double alpha = 1.0 + static_cast<double>(d) / p;
    fam.V_T = mu * std::pow(a, alpha) * std::pow(static_cast<double>(J), 1.0 / q);

    const long min_dist = std::max<long>(1, J / 16);
    const std::size_t target = static_cast<std::size_t>(
        std::ceil(std::exp(0.0625 * static_cast<double>(J))));

    std::vector<std::int8_t> proposal(static_cast<std::size_t>(J));
    long rejects = 0;
    while (fam.codewords.size() < opts.max_codewords && rejects < opts.trial_budget) {
        // Random weight-J/2 sign vector via Fisher-Yates on +/- halves.
        std::fill(proposal.begin(), proposal.begin() + J / 2, static_cast<std::int8_t>(1));
        std::fill(proposal.begin() + J / 2, proposal.end(), static_cast<std::int8_t>(-1));
        for (long i = J - 1; i > 0; --i) {
            const long j = static_cast<long>(stream.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(proposal[static_cast<std::size_t>(i)], proposal[static_cast<std::size_t>(j)]);
        }
        bool ok = true;
        for (const auto& cw : fam.codewords) {
            long dist = 0;
            for (long i = 0; i < J; ++i) {
                if (cw[static_cast<std::size_t>(i)] != proposal[static_cast<std::size_t>(i)]) ++dist;
            }
            if (dist < min_dist) {
                ok = false;
                break;
            }
        }
        if (ok) {
            fam.codewords.push_back(proposal);
            rejects = 0;
            if (fam.codewords.size() >= std::max<std::size_t>(2 * target, 8) &&
                fam.codewords.size() >= target) {
                break;  // comfortably past the packing bound
            }
        } else {
            ++rejects;
        }
    }
    if (fam.codewords.size() < std::max<std::size_t>(target, 2)) {
        throw packing_error("build_block_family: packing bound log|U| >= 0.0625 J not reached (got " +
                            std::to_string(fam.codewords.size()) + ", need " +
                            std::to_string(target) + "); retry with a new stream");
    }
    return fam;
}

long min_pairwise_hamming(const BlockFamily& family) {
    long best = family.J + 1;
    for (std::size_t i = 0; i < family.codewords.size(); ++i) {
        for (std::size_t j = i + 1; j < family.codewords.size(); ++j) {
            long dist = 0;
            for (long k = 0; k < family.J; ++k) {
                if (family.codewords[i][static_cast<std::size_t>(k)] !=
                    family.codewords[j][static_cast<std::size_t>(k)])
                    ++dist;
            }
            best = std::min(best, dist);
        }
    }
    return best;
}

std::string family_to_json(const BlockFamily& family) {
    nlohmann::json j;
    j["T"] = family.T;
    j["J"] = family.J;
    j["Delta_T"] = family.Delta_T;
    j["a"] = family.a;
    j["r"] = family.r;
    j["mu"] = family.mu;
    j["d"] = family.d;
    j["p"] = family.p;
    j["q"] = family.q;
    j["C_psi"] = family.C_psi;
    nlohmann::json words = nlohmann::json::array();
    for (const auto& cw : family.codewords) {
        nlohmann::json w = nlohmann::json::array();
        for (std::int8_t s : cw) w.push_back(static_cast<int>(s));
        words.push_back(std::move(w));
    }
    j["codewords"] = std::move(words);
    return j.dump(2) + "\n";
}

BlockFamily family_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(std::string("family_from_json: ") + e.what());
    }
    BlockFamily fam;
    try {
        fam.T = j.at("T").get<long>();
        fam.J = j.at("J").get<long>();
        fam.Delta_T = j.at("Delta_T").get<long>();
        fam.a = j.at("a").get<double>();
        fam.r = j.at("r").get<double>();
        fam.mu = j.at("mu").get<double>();
        fam.d = j.at("d").get<int>();
        fam.p = j.at("p").get<double>();
        fam.q = j.at("q").get<double>();
        fam.C_psi = j.at("C_psi").get<double>();
        for (const auto& w : j.at("codewords")) {
            std::vector<std::int8_t> cw;
            for (const auto& s : w) {
                const int v = s.get<int>();
                if (v != 1 && v != -1) throw parse_error("family_from_json: codeword entries must be +-1");
                cw.push_back(static_cast<std::int8_t>(v));
            }
            if (static_cast<long>(cw.size()) != fam.J) {
                throw parse_error("family_from_json: codeword length != J");
            }
            fam.codewords.push_back(std::move(cw));
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("family_from_json: ") + e.what());
    }
    const double alpha = 1.0 + static_cast<double>(fam.d) / fam.p;
    fam.V_T = fam.mu * std::pow(fam.a, alpha) * std::pow(static_cast<double>(fam.J), 1.0 / fam.q);
    return fam;
}

EnvSequence make_env(const BlockFamily& family, std::size_t codeword_index) {
    if (codeword_index >= family.codewords.size()) {
        throw parameter_error("make_env: codeword index out of range");
    }
    EnvSequence env;
    env.family = &family;
    env.codeword = family.codewords[codeword_index];
    return env;
}

Vec EnvSequence::gradient(long t, const Vec& theta) const {
    const int u = family->sign_at(codeword, t);
    return bump_gradient_raw(family->mu, family->a, family->r, u, theta);
}

double EnvSequence::value(long t, const Vec& theta) const {
    const int u = family->sign_at(codeword, t);
    return bump_value_raw(family->mu, family->a, family->r, u, theta);
}

double kl_along_trajectory(const std::vector<Vec>& traj, const EnvSequence& env_u,
                           const EnvSequence& env_v, double sigma2) {
    if (sigma2 <= 0.0) {
        throw divergence_error("kl_along_trajectory: sigma2 must be > 0 (KL infinite otherwise)");
    }
    if (env_u.family != env_v.family) {
        throw parameter_error("kl_along_trajectory: environments must share a family");
    }
    if (static_cast<long>(traj.size()) > env_u.family->T) {
        throw parameter_error("kl_along_trajectory: trajectory longer than the environment horizon");
    }
    double s = 0.0;
    for (std::size_t t = 0; t < traj.size(); ++t) {
        const long tt = static_cast<long>(t);
        if (env_u.codeword[static_cast<std::size_t>(env_u.family->block_of(tt))] ==
            env_v.codeword[static_cast<std::size_t>(env_v.family->block_of(tt))]) {
            continue;  // identical losses contribute nothing
        }
        s += (env_u.gradient(tt, traj[t]) - env_v.gradient(tt, traj[t])).squared_norm();
    }
    return s / (2.0 * sigma2);
}

long occupation_count(const std::vector<Vec>& traj, double r, const Vec& center) {
    long count = 0;
    for (const Vec& x : traj) {
        if ((x - center).norm() <= r) ++count;
    }
    return count;
}

double fano_error_lower(const BlockFamily& family, double kl_max) {
    const std::size_t M = family.codewords.size();
    if (M < 2) throw parameter_error("fano_error_lower: need at least two codewords");
    if (kl_max < 0.0) throw parameter_error("fano_error_lower: kl_max must be >= 0");
    const double bound = 1.0 - (kl_max + std::log(2.0)) / std::log(static_cast<double>(M));
    return std::max(0.0, bound);
}

InertiaResult inertia_regret_experiment(double beta, double gamma, double mu, double a,
                                        double sigma2, long long T, int seeds,
                                        SeededStream stream, double c0) {
    if (seeds < 1) throw parameter_error("inertia_regret_experiment: seeds must be >= 1");
    const double L = mu;  // 1-D quadratic core
    const double omb = 1.0 - beta;
    // Tolerate representation noise for callers sitting exactly at the cap.
    if (gamma > c0 * omb * omb / L * (1.0 + 1e-9)) {
        throw regime_error("inertia_regret_experiment: gamma exceeds the stability cap c0 (1-beta)^2 / L");
    }
    const bounds::ResponseTime rt = bounds::response_time(mu, gamma, beta);
    const long delta_T = std::max<long>(1, static_cast<long>(rt.tau));
    const long n_blocks = static_cast<long>(T / delta_T);

    const double sd = std::sqrt(std::max(0.0, sigma2));
    std::vector<double> mean_err(static_cast<std::size_t>(T), 0.0);
    double regret_acc = 0.0;
    for (int s = 0; s < seeds; ++s) {
        SeededStream noise = stream.fork(0x696e6572 + static_cast<std::uint64_t>(s));
        // Start aligned with the first block's minimizer +a.
        double z = a, z_prev = a;
        double regret = 0.0;
        for (long long t = 0; t < T; ++t) {
            const long blk = static_cast<long>(t / delta_T);
            const double target = (blk % 2 == 0) ? a : -a;
            const double e = z - target;
            regret += 0.5 * mu * e * e;
            mean_err[static_cast<std::size_t>(t)] += e / seeds;
            const double grad = mu * e + (sd > 0.0 ? sd * noise.next_normal() : 0.0);
            const double z_next = z + beta * (z - z_prev) - gamma * grad;
            z_prev = z;
            z = z_next;
        }
        regret_acc += regret;
    }

    // Half-life of the mean error after each flip.
    double tau_sum = 0.0;
    long tau_n = 0;
    for (long b = 1; b < n_blocks; ++b) {
        const long long t0 = static_cast<long long>(b) * delta_T;
        if (t0 >= T) break;
        const double ref = std::fabs(mean_err[static_cast<std::size_t>(t0)]);
        if (ref <= 0.0) continue;
        long long k = 1;
        const long long kmax = std::min<long long>(delta_T, T - t0 - 1);
        while (k <= kmax && std::fabs(mean_err[static_cast<std::size_t>(t0 + k)]) > 0.5 * ref) ++k;
        tau_sum += static_cast<double>(std::min(k, kmax));
        ++tau_n;
    }

    InertiaResult out;
    out.regret_mean = regret_acc / seeds;
    out.tau_measured = tau_n > 0 ? tau_sum / tau_n : static_cast<double>(delta_T);
    out.tau_theory = rt.tau;
    out.delta_T = delta_T;
    out.n_blocks = n_blocks;
    return out;
}

}  // namespace drifttrack::hard

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "drifttrack/bump.hpp"
#include "drifttrack/core.hpp"

// Minimax hard-instance machinery at desk scale: two-point discrepancy,
// gradient-variation budgets by quadrature, J-block families with
// constant-weight packing codewords, trajectory KL accumulation, the Fano
// testing-error bound, and the inertia-regime regret experiment.

namespace drifttrack::hard {

struct DiscrepancyGrid {
    int axis_points = 4001;       // fine 1-D grid along e1
    int box_points_per_dim = 41;  // coarse tensor grid, first min(d, 3) coords
    double axis_halfwidth = 2.0;  // in units of a
    double box_halfwidth = 1.5;   // in units of a
};

struct DiscrepancyResult {
    double chi = 0.0;        // grid estimate of the two-point discrepancy
    double tolerance = 0.0;  // Lipschitz * spacing resolution bound
};

/// Grid minimization of max(g+ - g+*, g- - g-*). Throws resolution_error
/// when the grid tolerance exceeds mu a^2 / 16.
DiscrepancyResult discrepancy_lower(const BumpLoss& plus, const BumpLoss& minus,
                                    const DiscrepancyGrid& grid = {});

using GradFn = std::function<Vec(const Vec&)>;

struct GvarOptions {
    double p = 2.0;   // inner L^p exponent over the domain (inf allowed)
    double q = 1.0;   // outer aggregation exponent over time (inf allowed)
    double box_halfwidth = 1.0;  // domain Theta = [-h, h]^d
    int nodes = 100000;          // total quadrature/Monte-Carlo nodes
    bool normalized = false;     // divide the q-sum by T before the 1/q power
    std::uint64_t mc_seed = 2024;
};

struct GvarResult {
    double value = 0.0;
    double error_estimate = 0.0;  // refinement difference / MC stderr
};

/// Gradient-variation functional over a sequence of gradient fields.
/// Tensor Gauss-Legendre for d <= 3, Monte-Carlo otherwise; p = inf takes
/// the max over nodes (a lower estimate of the true sup).
GvarResult gvar(const std::vector<GradFn>& grads, int d, const GvarOptions& options);

struct BlockFamily {
    long T = 0;
    long J = 0;
    long Delta_T = 0;  // floor(T / J); actual blocks have length Delta_T or Delta_T + 1
    double mu = 1.0;
    double a = 0.0;
    double r = 0.0;
    int d = 1;
    double p = 2.0;
    double q = 1.0;
    double C_psi = 0.0;
    /// Variation-budget shape mu * a^alpha * J^{1/q} with alpha = 1 + d/p
    /// (absolute constant not certified).
    double V_T = 0.0;
    std::vector<std::vector<std::int8_t>> codewords;  // entries +-1, weight J/2

    long block_of(long t) const;          // t in [0, T)
    int sign_at(const std::vector<std::int8_t>& codeword, long t) const;
    std::size_t size() const { return codewords.size(); }
};

struct PackingOptions {
    long trial_budget = 100000;       // consecutive rejected proposals before stopping
    std::size_t max_codewords = 4096; // stop early once comfortably past the bound
};

/// Randomized greedy constant-weight packing: accept a random weight-J/2
/// sign vector iff its Hamming distance to every accepted codeword is at
/// least J/16. Asserts log|codewords| >= 0.0625 J; throws if the budget is
/// exhausted first.
BlockFamily build_block_family(long T, long J, double mu, double a, double r, int d, double p,
                               double q, SeededStream& stream, const PackingOptions& opts = {});

long min_pairwise_hamming(const BlockFamily& family);

std::string family_to_json(const BlockFamily& family);
BlockFamily family_from_json(const std::string& json_text);

/// Loss sequence induced by one codeword of a family.
struct EnvSequence {
    const BlockFamily* family = nullptr;
    std::vector<std::int8_t> codeword;

    Vec gradient(long t, const Vec& theta) const;
    double value(long t, const Vec& theta) const;
};

EnvSequence make_env(const BlockFamily& family, std::size_t codeword_index);

/// Pathwise KL estimate (1 / 2 sigma^2) sum_t ||grad_u(t, x_t) - grad_v(t, x_t)||^2
/// along a single trajectory; averaging over seeds estimates the true KL.
double kl_along_trajectory(const std::vector<Vec>& traj, const EnvSequence& env_u,
                           const EnvSequence& env_v, double sigma2);

/// Number of iterates within radius r of center.
long occupation_count(const std::vector<Vec>& traj, double r, const Vec& center);

/// max(0, 1 - (kl_max + ln 2) / ln M), M = family size.
double fano_error_lower(const BlockFamily& family, double kl_max);

struct InertiaResult {
    double regret_mean = 0.0;    // mean total dynamic regret over seeds
    double tau_measured = 0.0;   // mean post-flip half-life of the mean error
    long long tau_theory = 0;    // response_time at (mu, gamma, beta)
    long delta_T = 0;            // block length used (= tau_theory)
    long n_blocks = 0;
};

/// Heavy-Ball on the alternating +-a 1-D quadratic with blocks of length
/// tau_beta. Requires gamma <= c0 (1-beta)^2 / L (L = mu here); throws
/// regime_error otherwise.
InertiaResult inertia_regret_experiment(double beta, double gamma, double mu, double a,
                                        double sigma2, long long T, int seeds,
                                        SeededStream stream, double c0 = 0.25);

}  // namespace drifttrack::hard

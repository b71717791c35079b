// drifttrack command-line interface: run benchmarks, evaluate closed-form
// bounds, build and verify hard instances, run the inertia experiment, and
// emit plot data. All diagnostics go to stderr; data goes to --out or stdout.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "drifttrack/bounds.hpp"
#include "drifttrack/core.hpp"
#include "drifttrack/hardinstance.hpp"
#include "drifttrack/runner.hpp"

namespace dt = drifttrack;

namespace {

int default_threads() {
    if (const char* env = std::getenv("DRIFTTRACK_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw dt::io_error("cannot open for writing: " + out_path);
    f << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"drifttrack: tracking drifting minimizers with SGD and momentum"};
    app.require_subcommand(1);

    // ---- bench ----
    CLI::App* bench = app.add_subcommand("bench", "benchmark grid runner");
    bench->require_subcommand(1);

    CLI::App* bench_run = bench->add_subcommand("run", "execute a config grid");
    std::string cfg_path, bench_out;
    int threads = default_threads();
    int seeds_override = -1;
    std::uint64_t seed_override = 0;
    bool have_seed_override = false;
    bench_run->add_option("--config", cfg_path, "experiment config JSON")->required();
    bench_run->add_option("--threads", threads, "worker count");
    bench_run->add_option("--seeds", seeds_override, "override seed count");
    bench_run->add_option("--out", bench_out, "override output directory");
    bench_run->add_option("--seed", seed_override, "override master seed")
        ->each([&](const std::string&) { have_seed_override = true; });

    CLI::App* bench_table = bench->add_subcommand("table", "render a results table");
    std::string table_name = "quad", table_dir = "out", table_fmt = "md", table_out;
    bool trailing = false;
    bench_table->add_option("--table", table_name, "quad | quad_t | tasks");
    bench_table->add_option("--dir", table_dir, "records directory");
    bench_table->add_option("--format", table_fmt, "md | csv");
    bench_table->add_option("--out", table_out, "output file (default stdout)");
    bench_table->add_flag("--trailing-window", trailing, "trailing-window statistic instead of final iterate");

    CLI::App* bench_agg = bench->add_subcommand("aggregate", "write aggregate.csv");
    std::string agg_dir = "out";
    bool agg_trailing = false;
    bench_agg->add_option("--dir", agg_dir, "records directory");
    bench_agg->add_flag("--trailing-window", agg_trailing, "trailing-window statistic");

    // ---- bounds ----
    CLI::App* bounds_cmd = app.add_subcommand("bounds", "closed-form bound evaluation");
    CLI::App* bounds_eval = bounds_cmd->add_subcommand("eval", "evaluate a BoundReport");
    double b_mu = 1.0, b_L = 1.0, b_beta = 0.0, b_gamma = 0.01, b_sigma2 = 0.0, b_Delta = 0.0,
           b_e0 = 1.0;
    int b_d = 1;
    std::string b_method = "hb", b_fmt = "text", bounds_out;
    bounds_eval->add_option("--mu", b_mu, "strong convexity");
    bounds_eval->add_option("--L", b_L, "smoothness");
    bounds_eval->add_option("--beta", b_beta, "momentum");
    bounds_eval->add_option("--gamma", b_gamma, "step size");
    bounds_eval->add_option("--sigma2", b_sigma2, "noise variance");
    bounds_eval->add_option("--Delta", b_Delta, "per-step drift bound");
    bounds_eval->add_option("--d", b_d, "dimension");
    bounds_eval->add_option("--e0", b_e0, "initial squared error for burn-ins");
    bounds_eval->add_option("--method", b_method, "hb | nag (beta split for Gamma)");
    bounds_eval->add_option("--format", b_fmt, "text | json");
    bounds_eval->add_option("--out", bounds_out, "output file (default stdout)");

    // ---- hard ----
    CLI::App* hard = app.add_subcommand("hard", "minimax hard instances");
    hard->require_subcommand(1);

    CLI::App* hard_build = hard->add_subcommand("build", "build a J-block family");
    long h_T = 4096, h_J = 16;
    double h_mu = 1.0, h_a = 0.05, h_r = -1.0, h_p = 2.0, h_q = 1.0;
    int h_d = 2;
    std::uint64_t h_seed = 7;
    std::string hard_out;
    hard_build->add_option("--T", h_T, "horizon");
    hard_build->add_option("--J", h_J, "block count (even)");
    hard_build->add_option("--mu", h_mu, "strong convexity");
    hard_build->add_option("--a", h_a, "minimizer offset");
    hard_build->add_option("--r", h_r, "bump radius (default a / c1)");
    hard_build->add_option("--d", h_d, "dimension");
    hard_build->add_option("--p", h_p, "inner L^p exponent");
    hard_build->add_option("--q", h_q, "outer aggregation exponent");
    hard_build->add_option("--seed", h_seed, "packing stream seed");
    hard_build->add_option("--out", hard_out, "family JSON file (default stdout)");

    CLI::App* hard_verify = hard->add_subcommand("verify", "check family invariants");
    std::string verify_path;
    hard_verify->add_option("--family", verify_path, "family JSON file")->required();

    CLI::App* hard_fano = hard->add_subcommand("fano", "Fano testing-error lower bound");
    std::string fano_path;
    double fano_kl = 0.0;
    hard_fano->add_option("--family", fano_path, "family JSON file")->required();
    hard_fano->add_option("--kl-max", fano_kl, "pairwise KL upper bound")->required();

    // ---- inertia ----
    CLI::App* inertia = app.add_subcommand("inertia", "block-switching regret experiment");
    double i_beta = 0.9, i_gamma = 0.001, i_mu = 1.0, i_a = 0.5, i_sigma2 = 0.0;
    long long i_T = 20000;
    int i_seeds = 8;
    std::uint64_t i_seed = 11;
    inertia->add_option("--beta", i_beta, "momentum");
    inertia->add_option("--gamma", i_gamma, "step size");
    inertia->add_option("--mu", i_mu, "curvature");
    inertia->add_option("--a", i_a, "block offset");
    inertia->add_option("--sigma2", i_sigma2, "gradient noise variance");
    inertia->add_option("--T", i_T, "horizon");
    inertia->add_option("--seeds", i_seeds, "number of seeds");
    inertia->add_option("--seed", i_seed, "stream seed");

    // ---- plotdata ----
    CLI::App* plot = app.add_subcommand("plotdata", "emit t,mean,std series per config");
    std::string plot_dir = "out", plot_out;
    long long plot_stride = 1;
    plot->add_option("--dir", plot_dir, "records directory");
    plot->add_option("--stride", plot_stride, "thin the series to every k-th step");
    plot->add_option("--out", plot_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version exit 0 through CLI11's own path; any other
        // parse problem is a usage error (exit 1).
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (bench_run->parsed()) {
            // Apply overrides to the raw JSON so digests stay canonical.
            std::ifstream f(cfg_path, std::ios::binary);
            if (!f) throw dt::io_error("cannot open config file: " + cfg_path);
            std::stringstream ss;
            ss << f.rdbuf();
            nlohmann::json cj = nlohmann::json::parse(ss.str());
            if (seeds_override > 0) cj["seeds"] = seeds_override;
            if (!bench_out.empty()) cj["out_dir"] = bench_out;
            if (have_seed_override) cj["master_seed"] = seed_override;
            std::vector<dt::runner::ExperimentConfig> configs = dt::runner::expand_grid(cj.dump());
            const dt::runner::ExecReport rep = dt::runner::execute(configs, threads);
            std::cerr << "completed " << rep.completed << ", skipped " << rep.skipped
                      << ", failed " << rep.failed.size() << '\n';
            for (const auto& f : rep.failed) std::cerr << "  " << f << '\n';
            if (!configs.empty()) {
                const auto cells = dt::runner::aggregate(configs.front().out_dir);
                const std::string path = dt::runner::write_aggregate_csv(configs.front().out_dir, cells);
                std::cerr << "aggregate: " << path << '\n';
            }
            return rep.failed.empty() ? 0 : 2;
        }
        if (bench_table->parsed()) {
            dt::runner::AggregateOptions opt;
            opt.trailing_window = trailing;
            const std::string text = dt::runner::render_table(
                table_dir, dt::runner::table_id_from_name(table_name), table_fmt, opt);
            emit(text, table_out);
            return 0;
        }
        if (bench_agg->parsed()) {
            dt::runner::AggregateOptions opt;
            opt.trailing_window = agg_trailing;
            const auto cells = dt::runner::aggregate(agg_dir, opt);
            std::cout << dt::runner::write_aggregate_csv(agg_dir, cells) << '\n';
            return 0;
        }
        if (bounds_eval->parsed()) {
            dt::bounds::RegimeParams p;
            p.mu = b_mu;
            p.L = b_L;
            p.beta = b_beta;
            p.gamma = b_gamma;
            p.sigma = std::sqrt(b_sigma2);
            p.Delta = b_Delta;
            p.d = b_d;
            const double beta1 = b_method == "nag" ? b_beta : 0.0;
            const double beta2 = b_method == "nag" ? 0.0 : b_beta;
            const dt::bounds::BoundReport r = dt::bounds::bound_report(p, beta1, beta2, b_e0);
            emit(b_fmt == "json" ? dt::bounds::report_to_json(r) : dt::bounds::render_report(r),
                 bounds_out);
            return 0;
        }
        if (hard_build->parsed()) {
            if (h_r <= 0.0) h_r = 12.5 * dt::hard::compute_c_psi() * h_a;  // a/r safely below c1
            dt::SeededStream stream(h_seed, 0);
            const dt::hard::BlockFamily fam =
                dt::hard::build_block_family(h_T, h_J, h_mu, h_a, h_r, h_d, h_p, h_q, stream);
            emit(dt::hard::family_to_json(fam), hard_out);
            std::cerr << "codewords: " << fam.codewords.size()
                      << ", min pairwise Hamming: " << dt::hard::min_pairwise_hamming(fam) << '\n';
            return 0;
        }
        if (hard_verify->parsed()) {
            std::ifstream f(verify_path, std::ios::binary);
            if (!f) throw dt::io_error("cannot open family: " + verify_path);
            std::stringstream ss;
            ss << f.rdbuf();
            const dt::hard::BlockFamily fam = dt::hard::family_from_json(ss.str());
            const long mind = dt::hard::min_pairwise_hamming(fam);
            const double logM = std::log(static_cast<double>(fam.codewords.size()));
            const bool size_ok = logM >= 0.0625 * static_cast<double>(fam.J) - 1e-12;
            const bool dist_ok = mind >= fam.J / 16;
            bool weight_ok = true;
            for (const auto& cw : fam.codewords) {
                long pos = 0;
                for (auto s : cw) {
                    if (s > 0) ++pos;
                }
                if (pos != fam.J / 2) weight_ok = false;
            }
            const dt::hard::BumpLoss plus =
                dt::hard::BumpLoss::make(fam.mu, fam.a, fam.r, +1, fam.d);
            const dt::hard::BumpLoss minus =
                dt::hard::BumpLoss::make(fam.mu, fam.a, fam.r, -1, fam.d);
            const dt::hard::DiscrepancyResult chi = dt::hard::discrepancy_lower(plus, minus);
            const bool chi_ok = chi.chi >= fam.mu * fam.a * fam.a / 8.0 - chi.tolerance;
            std::cout << "codewords " << fam.codewords.size() << " (log " << logM << ", need >= "
                      << 0.0625 * fam.J << "): " << (size_ok ? "ok" : "FAIL") << '\n'
                      << "min Hamming distance " << mind << " (need >= " << fam.J / 16
                      << "): " << (dist_ok ? "ok" : "FAIL") << '\n'
                      << "constant weight J/2: " << (weight_ok ? "ok" : "FAIL") << '\n'
                      << "discrepancy " << dt::format_double(chi.chi) << " >= mu a^2 / 8 = "
                      << dt::format_double(fam.mu * fam.a * fam.a / 8.0) << ": "
                      << (chi_ok ? "ok" : "FAIL") << '\n';
            return (size_ok && dist_ok && weight_ok && chi_ok) ? 0 : 2;
        }
        if (hard_fano->parsed()) {
            std::ifstream f(fano_path, std::ios::binary);
            if (!f) throw dt::io_error("cannot open family: " + fano_path);
            std::stringstream ss;
            ss << f.rdbuf();
            const dt::hard::BlockFamily fam = dt::hard::family_from_json(ss.str());
            std::cout << dt::format_double(dt::hard::fano_error_lower(fam, fano_kl)) << '\n';
            return 0;
        }
        if (inertia->parsed()) {
            dt::SeededStream stream(i_seed, 0);
            const dt::hard::InertiaResult r = dt::hard::inertia_regret_experiment(
                i_beta, i_gamma, i_mu, i_a, i_sigma2, i_T, i_seeds, stream);
            std::cout << "regret_mean " << dt::format_double(r.regret_mean) << '\n'
                      << "regret_per_step " << dt::format_double(r.regret_mean / static_cast<double>(i_T)) << '\n'
                      << "tau_measured " << dt::format_double(r.tau_measured) << '\n'
                      << "tau_theory " << r.tau_theory << '\n'
                      << "block_length " << r.delta_T << '\n'
                      << "blocks " << r.n_blocks << '\n';
            return 0;
        }
        if (plot->parsed()) {
            emit(dt::runner::plot_data(plot_dir, plot_stride), plot_out);
            return 0;
        }
    } catch (const dt::parameter_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const dt::parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drifttrack/core.hpp"
#include "drifttrack/drift.hpp"
#include "drifttrack/optim.hpp"
#include "drifttrack/problems.hpp"

// Config-driven experiment engine: expands a configuration grid, executes
// seeded runs in parallel with resumable, byte-deterministic outputs,
// aggregates them, and renders the benchmark tables.

namespace drifttrack::runner {

struct DriftConfig {
    std::string kind = "gaussian_walk";
    double delta_rw = 0.01;
    double nu = 3.0;
    bool normalize_steps = true;
};

struct ExperimentConfig {
    std::string task = "quadratic";
    int d = 100;
    double mu = 1.0;
    double kappa = 1.0;
    double sigma2 = 0.0;
    std::string method = "sgd";  // sgd | hb | nag
    double beta = 0.0;
    double gamma = 0.01;
    std::string schedule = "constant";
    long long T = 5000;
    int batch = 256;
    double reg = 1e-3;
    DriftConfig drift;
    int seeds = 20;
    std::string out_dir = "out";
    std::uint64_t master_seed = 20240131;
    double init_offset_sq = 0.0;
    int mlp_input = 100;
    int mlp_hidden = 128;
    int validation_size = 2048;

    // Assigned by expand_grid.
    int index = 0;
    std::string digest;

    problems::ProblemSpec problem_spec() const;
    drift::DriftProcess drift_process() const;
    optim::MomentumConfig momentum() const;
    std::string run_id(int seed_idx) const;
    std::string file_name(int seed_idx) const;
};

/// Cartesian expansion of the list-valued fields (task, method, kappa,
/// sigma2, beta, gamma — in that nesting order, innermost last), with
/// per-config digests. Unknown fields or bad types throw parse_error
/// naming the field.
std::vector<ExperimentConfig> expand_grid(const std::string& json_text);
std::vector<ExperimentConfig> expand_grid_file(const std::string& path);

struct ExecReport {
    int completed = 0;
    int skipped = 0;  // resumed: digest-matching file already present
    std::vector<std::string> failed;  // "<run_id>: <error>"
};

/// Run every (config, seed) pair exactly once across `parallelism` workers.
/// Stream identity depends only on (master_seed, config index, seed index),
/// so outputs are byte-identical regardless of parallelism, and existing
/// files whose run_id (including digest) matches are skipped.
ExecReport execute(const std::vector<ExperimentConfig>& configs, int parallelism);

struct AggregateCell {
    std::string task;
    std::string method;
    double beta = 0.0;
    double gamma = 0.0;
    double sigma2 = 0.0;
    double kappa = 1.0;
    double mean_final = 0.0;
    double std_final = 0.0;
    double mean_final_loss = 0.0;   // trailing-window mean of the batch loss
    double mean_metric = 0.0;       // trailing-window mean of the task metric
    bool has_metric = false;
    int n_seeds = 0;
    int n_diverged = 0;
};

struct AggregateOptions {
    /// Use a trailing-window mean of the tracking error instead of the
    /// final iterate for mean_final.
    bool trailing_window = false;
    int window = 100;
    double divergence_threshold = 1e12;
};

/// Aggregate all runs under out_dir (per its manifest). Means/stds are over
/// non-diverged seeds only; diverged seeds are counted.
std::vector<AggregateCell> aggregate(const std::string& out_dir,
                                     const AggregateOptions& options = {});

/// Write `aggregate.csv` with the documented header; returns its path.
std::string write_aggregate_csv(const std::string& out_dir,
                                const std::vector<AggregateCell>& cells);

enum class TableId { quad, quad_t, tasks };
TableId table_id_from_name(const std::string& name);

/// Render the quadratic grid (rows beta x sigma2, columns SGD/HB/NAG per
/// gamma) or the task summary. format is "md" or "csv". Missing cells
/// render as an em dash with a warning on stderr.
std::string render_table(const std::string& out_dir, TableId id, const std::string& format,
                         const AggregateOptions& options = {});

/// Per-config time series `t,mean,std` of the tracking error over seeds.
std::string plot_data(const std::string& out_dir, long long stride = 1);

}  // namespace drifttrack::runner

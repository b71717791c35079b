#include "drifttrack/runner.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "drifttrack/bounds.hpp"

namespace drifttrack::runner {

namespace fs = std::filesystem;
using nlohmann::json;

problems::ProblemSpec ExperimentConfig::problem_spec() const {
    const problems::Task t = problems::task_from_name(task);
    switch (t) {
        case problems::Task::quadratic:
            return problems::ProblemSpec::quadratic(d, mu, sigma2);
        case problems::Task::linreg: {
            auto s = problems::ProblemSpec::linreg(d, kappa, sigma2, batch);
            return s;
        }
        case problems::Task::logreg: {
            auto s = problems::ProblemSpec::logreg(d, kappa, reg, batch);
            return s;
        }
        case problems::Task::mlp:
            return problems::ProblemSpec::mlp(mlp_input, mlp_hidden, kappa, sigma2, batch);
        case problems::Task::bump:
            throw parameter_error("runner does not schedule bump-task runs");
    }
    throw parameter_error("unreachable task");
}

drift::DriftProcess ExperimentConfig::drift_process() const {
    drift::DriftProcess p;
    p.kind = drift::kind_from_name(drift.kind);
    p.delta_rw = drift.delta_rw;
    p.nu = drift.nu;
    p.normalize_steps = drift.normalize_steps;
    return p;
}

optim::MomentumConfig ExperimentConfig::momentum() const {
    return optim::MomentumConfig::from_method(method, beta);
}

std::string ExperimentConfig::run_id(int seed_idx) const {
    std::ostringstream os;
    os << task << '-' << method << "-i" << index << "-s" << seed_idx << '-' << digest;
    return os.str();
}

std::string ExperimentConfig::file_name(int seed_idx) const {
    // Digest-keyed so grids executed separately can share one out_dir.
    char buf[64];
    std::snprintf(buf, sizeof(buf), "run_%s_s%03d.csv", digest.c_str(), seed_idx);
    return (fs::path(out_dir) / buf).string();
}

namespace {

std::string canonical_string(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "task=" << c.task << ";d=" << c.d << ";mu=" << format_double(c.mu)
       << ";kappa=" << format_double(c.kappa) << ";sigma2=" << format_double(c.sigma2)
       << ";method=" << c.method << ";beta=" << format_double(c.beta)
       << ";gamma=" << format_double(c.gamma) << ";schedule=" << c.schedule << ";T=" << c.T
       << ";batch=" << c.batch << ";reg=" << format_double(c.reg) << ";drift=" << c.drift.kind
       << ";delta_rw=" << format_double(c.drift.delta_rw) << ";nu=" << format_double(c.drift.nu)
       << ";norm=" << (c.drift.normalize_steps ? 1 : 0) << ";seeds=" << c.seeds
       << ";master=" << c.master_seed << ";offs=" << format_double(c.init_offset_sq)
       << ";mlp=" << c.mlp_input << 'x' << c.mlp_hidden << ";val=" << c.validation_size;
    return os.str();
}

const std::set<std::string> kKnownFields = {
    "task",   "d",     "mu",       "kappa",       "sigma2",          "method",
    "beta",   "gamma", "schedule", "T",           "batch",           "reg",
    "drift",  "seeds", "out_dir",  "master_seed", "init_offset_sq",  "mlp_input",
    "mlp_hidden", "validation_size"};

const std::set<std::string> kKnownDriftFields = {"kind", "delta_rw", "nu", "normalize_steps"};

template <typename T>
T get_scalar(const json& j, const std::string& field) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw parse_error("config field '" + field + "' has the wrong type");
    }
}

/// A field that may be a scalar or a list of scalars.
template <typename T>
std::vector<T> get_list(const json& j, const std::string& field) {
    std::vector<T> out;
    if (j.is_array()) {
        for (const auto& el : j) out.push_back(get_scalar<T>(el, field));
        if (out.empty()) throw parse_error("config field '" + field + "' is an empty list");
    } else {
        out.push_back(get_scalar<T>(j, field));
    }
    return out;
}

}  // namespace

std::vector<ExperimentConfig> expand_grid(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("config parse: ") + e.what());
    }
    if (!j.is_object()) throw parse_error("config must be a JSON object");
    for (const auto& item : j.items()) {
        if (kKnownFields.find(item.key()) == kKnownFields.end()) {
            throw parse_error("unknown config field '" + item.key() + "'");
        }
    }

    ExperimentConfig base;
    if (j.contains("d")) base.d = get_scalar<int>(j["d"], "d");
    if (j.contains("mu")) base.mu = get_scalar<double>(j["mu"], "mu");
    if (j.contains("schedule")) base.schedule = get_scalar<std::string>(j["schedule"], "schedule");
    if (j.contains("T")) base.T = get_scalar<long long>(j["T"], "T");
    if (j.contains("batch")) base.batch = get_scalar<int>(j["batch"], "batch");
    if (j.contains("reg")) base.reg = get_scalar<double>(j["reg"], "reg");
    if (j.contains("seeds")) base.seeds = get_scalar<int>(j["seeds"], "seeds");
    if (j.contains("out_dir")) base.out_dir = get_scalar<std::string>(j["out_dir"], "out_dir");
    if (j.contains("master_seed"))
        base.master_seed = get_scalar<std::uint64_t>(j["master_seed"], "master_seed");
    if (j.contains("init_offset_sq"))
        base.init_offset_sq = get_scalar<double>(j["init_offset_sq"], "init_offset_sq");
    if (j.contains("mlp_input")) base.mlp_input = get_scalar<int>(j["mlp_input"], "mlp_input");
    if (j.contains("mlp_hidden")) base.mlp_hidden = get_scalar<int>(j["mlp_hidden"], "mlp_hidden");
    if (j.contains("validation_size"))
        base.validation_size = get_scalar<int>(j["validation_size"], "validation_size");
    if (j.contains("drift")) {
        const json& dj = j["drift"];
        if (!dj.is_object()) throw parse_error("config field 'drift' must be an object");
        for (const auto& item : dj.items()) {
            if (kKnownDriftFields.find(item.key()) == kKnownDriftFields.end()) {
                throw parse_error("unknown drift field '" + item.key() + "'");
            }
        }
        if (dj.contains("kind")) base.drift.kind = get_scalar<std::string>(dj["kind"], "drift.kind");
        if (dj.contains("delta_rw"))
            base.drift.delta_rw = get_scalar<double>(dj["delta_rw"], "drift.delta_rw");
        if (dj.contains("nu")) base.drift.nu = get_scalar<double>(dj["nu"], "drift.nu");
        if (dj.contains("normalize_steps"))
            base.drift.normalize_steps =
                get_scalar<bool>(dj["normalize_steps"], "drift.normalize_steps");
        drift::kind_from_name(base.drift.kind);  // validate early
    }

    const std::vector<std::string> tasks =
        j.contains("task") ? get_list<std::string>(j["task"], "task")
                           : std::vector<std::string>{base.task};
    const std::vector<std::string> methods =
        j.contains("method") ? get_list<std::string>(j["method"], "method")
                             : std::vector<std::string>{base.method};
    const std::vector<double> kappas =
        j.contains("kappa") ? get_list<double>(j["kappa"], "kappa")
                            : std::vector<double>{base.kappa};
    const std::vector<double> sigma2s =
        j.contains("sigma2") ? get_list<double>(j["sigma2"], "sigma2")
                             : std::vector<double>{base.sigma2};
    const std::vector<double> betas =
        j.contains("beta") ? get_list<double>(j["beta"], "beta") : std::vector<double>{base.beta};
    const std::vector<double> gammas =
        j.contains("gamma") ? get_list<double>(j["gamma"], "gamma")
                            : std::vector<double>{base.gamma};

    std::vector<ExperimentConfig> out;
    for (const std::string& task : tasks) {
        problems::task_from_name(task);
        for (const std::string& method : methods) {
            optim::MomentumConfig::from_method(method, 0.0);
            for (double kappa : kappas) {
                for (double sigma2 : sigma2s) {
                    for (double beta : betas) {
                        for (double gamma : gammas) {
                            ExperimentConfig c = base;
                            c.task = task;
                            c.method = method;
                            c.kappa = kappa;
                            c.sigma2 = sigma2;
                            c.beta = beta;
                            c.gamma = gamma;
                            c.index = static_cast<int>(out.size());
                            c.digest = hex16(fnv1a64(canonical_string(c)));
                            out.push_back(std::move(c));
                        }
                    }
                }
            }
        }
    }
    return out;
}

std::vector<ExperimentConfig> expand_grid_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return expand_grid(ss.str());
}

namespace {

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["task"] = c.task;
    j["d"] = c.d;
    j["mu"] = c.mu;
    j["kappa"] = c.kappa;
    j["sigma2"] = c.sigma2;
    j["method"] = c.method;
    j["beta"] = c.beta;
    j["gamma"] = c.gamma;
    j["schedule"] = c.schedule;
    j["T"] = c.T;
    j["batch"] = c.batch;
    j["reg"] = c.reg;
    j["drift"] = {{"kind", c.drift.kind},
                  {"delta_rw", c.drift.delta_rw},
                  {"nu", c.drift.nu},
                  {"normalize_steps", c.drift.normalize_steps}};
    j["seeds"] = c.seeds;
    j["out_dir"] = c.out_dir;
    j["master_seed"] = c.master_seed;
    j["init_offset_sq"] = c.init_offset_sq;
    j["mlp_input"] = c.mlp_input;
    j["mlp_hidden"] = c.mlp_hidden;
    j["validation_size"] = c.validation_size;
    j["index"] = c.index;
    j["digest"] = c.digest;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.task = j.at("task").get<std::string>();
    c.d = j.at("d").get<int>();
    c.mu = j.at("mu").get<double>();
    c.kappa = j.at("kappa").get<double>();
    c.sigma2 = j.at("sigma2").get<double>();
    c.method = j.at("method").get<std::string>();
    c.beta = j.at("beta").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.schedule = j.at("schedule").get<std::string>();
    c.T = j.at("T").get<long long>();
    c.batch = j.at("batch").get<int>();
    c.reg = j.at("reg").get<double>();
    c.drift.kind = j.at("drift").at("kind").get<std::string>();
    c.drift.delta_rw = j.at("drift").at("delta_rw").get<double>();
    c.drift.nu = j.at("drift").at("nu").get<double>();
    c.drift.normalize_steps = j.at("drift").at("normalize_steps").get<bool>();
    c.seeds = j.at("seeds").get<int>();
    c.out_dir = j.at("out_dir").get<std::string>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.init_offset_sq = j.at("init_offset_sq").get<double>();
    c.mlp_input = j.at("mlp_input").get<int>();
    c.mlp_hidden = j.at("mlp_hidden").get<int>();
    c.validation_size = j.at("validation_size").get<int>();
    c.index = j.at("index").get<int>();
    c.digest = j.at("digest").get<std::string>();
    return c;
}

void write_manifest(const std::vector<ExperimentConfig>& configs) {
    if (configs.empty()) return;
    const fs::path path = fs::path(configs.front().out_dir) / "manifest.json";
    // Merge with an existing manifest so separate grids can share one
    // directory; the digest is the identity.
    std::vector<json> kept;
    std::set<std::string> fresh;
    for (const auto& c : configs) fresh.insert(c.digest);
    if (fs::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        json old;
        try {
            in >> old;
            for (const auto& cj : old.at("configs")) {
                if (fresh.find(cj.at("digest").get<std::string>()) == fresh.end()) {
                    kept.push_back(cj);
                }
            }
        } catch (const json::exception&) {
            // Corrupt manifest: rebuild from the new grid alone.
            kept.clear();
        }
    }
    json j;
    j["configs"] = json::array();
    for (const auto& cj : kept) j["configs"].push_back(cj);
    for (const auto& c : configs) j["configs"].push_back(config_to_json(c));
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot write manifest: " + path.string());
    f << j.dump(1) << '\n';
}

std::vector<ExperimentConfig> read_manifest(const std::string& out_dir) {
    const fs::path path = fs::path(out_dir) / "manifest.json";
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open manifest: " + path.string());
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw parse_error("manifest parse: " + std::string(e.what()));
    }
    std::vector<ExperimentConfig> out;
    for (const auto& cj : j.at("configs")) out.push_back(config_from_json(cj));
    return out;
}

/// Substream identity for one (config, seed) pair.
SeededStream run_stream(const ExperimentConfig& c, int seed_idx) {
    const std::uint64_t stream_id =
        (static_cast<std::uint64_t>(c.index) << 20) | static_cast<std::uint64_t>(seed_idx);
    return SeededStream(c.master_seed, stream_id);
}

optim::Schedule make_schedule(const ExperimentConfig& c, const problems::ProblemSpec& spec) {
    if (c.schedule == "constant") return optim::Schedule::constant(c.gamma);
    bounds::RegimeParams rp;
    rp.mu = spec.mu;
    rp.L = spec.L;
    rp.beta = c.beta;
    rp.gamma = c.gamma;
    // The theory's sigma^2 bounds E||xi||^2; per-coordinate noise sigma2
    // contributes d * sigma2 on the quadratic task.
    rp.sigma = std::sqrt(std::max(0.0, c.sigma2) *
                         (spec.task == problems::Task::quadratic ? spec.d : 1));
    rp.Delta = c.drift.delta_rw;
    rp.d = spec.d;
    const bounds::BurnIn b = bounds::burn_in_times(rp, c.init_offset_sq > 0.0 ? c.init_offset_sq : 1.0);
    if (c.schedule == "step_decay_sgd") return b.schedule_sgd;
    if (c.schedule == "step_decay_momentum") return b.schedule_mom;
    throw parse_error("unknown schedule '" + c.schedule + "'");
}

RunRecord run_one(const ExperimentConfig& c, int seed_idx) {
    const problems::ProblemSpec spec = c.problem_spec();
    SeededStream stream = run_stream(c, seed_idx);
    SeededStream path_stream = stream.fork(0x70617468);

    Vec theta_star0(static_cast<std::size_t>(spec.param_dim()));
    if (spec.task == problems::Task::mlp) {
        // Teacher initialized N(0, 0.04); drift moves the flattened vector.
        SeededStream init = stream.fork(0x696e6974);
        theta_star0 = gaussian_vec(init, theta_star0.size(), 0.04);
    }
    const drift::MinimizerPath path =
        drift::generate_path(c.drift_process(), theta_star0, c.T, path_stream);

    optim::TrackingOptions opts;
    opts.validation_size = c.validation_size;
    if (c.init_offset_sq > 0.0) {
        Vec offset(theta_star0.size());
        offset[0] = std::sqrt(c.init_offset_sq);
        opts.init_offset = std::move(offset);
    }
    const optim::Schedule sched = make_schedule(c, spec);
    RunRecord rec = optim::run_tracking(spec, path, c.momentum(), sched, stream.fork(0x72756e00), opts);
    rec.run_id = c.run_id(seed_idx);
    rec.seed = stream.stream_id();
    rec.config_digest = c.digest;
    return rec;
}

/// Peek at the first data row to decide whether an existing file already
/// holds this run (same run_id, hence same digest).
bool file_matches(const std::string& path, const std::string& run_id) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return false;
    std::string header, first;
    if (!std::getline(f, header)) return false;
    if (!std::getline(f, first)) return false;
    return first.compare(0, run_id.size() + 1, run_id + ",") == 0;
}

}  // namespace

ExecReport execute(const std::vector<ExperimentConfig>& configs, int parallelism) {
    ExecReport report;
    if (configs.empty()) return report;
    fs::create_directories(configs.front().out_dir);
    write_manifest(configs);

    struct Job {
        int config;
        int seed;
    };
    std::vector<Job> jobs;
    for (const auto& c : configs) {
        if (c.out_dir != configs.front().out_dir) {
            throw parameter_error("execute: all configs must share one out_dir");
        }
        for (int s = 0; s < c.seeds; ++s) jobs.push_back({c.index, s});
    }

    std::atomic<std::size_t> next{0};
    std::mutex mu;
    const int workers = std::max(1, parallelism);
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            const ExperimentConfig& c = configs[static_cast<std::size_t>(jobs[k].config)];
            const int seed_idx = jobs[k].seed;
            const std::string file = c.file_name(seed_idx);
            try {
                if (file_matches(file, c.run_id(seed_idx))) {
                    std::lock_guard<std::mutex> lock(mu);
                    ++report.skipped;
                    continue;
                }
                RunRecord rec = run_one(c, seed_idx);
                write_records({rec}, file);
                std::lock_guard<std::mutex> lock(mu);
                ++report.completed;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                report.failed.push_back(c.run_id(seed_idx) + ": " + e.what());
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return report;
}

namespace {

struct RunStats {
    bool present = false;
    bool diverged = false;
    double final_err = 0.0;
    double window_err = 0.0;
    double window_loss = 0.0;
    double window_metric = 0.0;
    bool has_metric = false;
};

RunStats summarize_run(const ExperimentConfig& c, int seed_idx, const AggregateOptions& opt) {
    RunStats st;
    const std::string file = c.file_name(seed_idx);
    if (!fs::exists(file)) return st;
    const std::vector<RunRecord> recs = read_records(file);
    if (recs.size() != 1) return st;
    const RunRecord& r = recs.front();
    st.present = true;
    if (r.steps.empty() || r.steps.back().t < c.T ||
        r.steps.back().tracking_error_sq >= opt.divergence_threshold) {
        st.diverged = true;
        return st;
    }
    st.final_err = r.steps.back().tracking_error_sq;
    const std::size_t n = r.steps.size();
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(opt.window), n);
    double se = 0.0, sl = 0.0, sm = 0.0;
    std::size_t nm = 0;
    for (std::size_t i = n - w; i < n; ++i) {
        se += r.steps[i].tracking_error_sq;
        sl += r.steps[i].loss;
        if (r.steps[i].metric) {
            sm += *r.steps[i].metric;
            ++nm;
        }
    }
    st.window_err = se / static_cast<double>(w);
    st.window_loss = sl / static_cast<double>(w);
    if (nm > 0) {
        st.window_metric = sm / static_cast<double>(nm);
        st.has_metric = true;
    }
    return st;
}

}  // namespace

std::vector<AggregateCell> aggregate(const std::string& out_dir, const AggregateOptions& options) {
    const std::vector<ExperimentConfig> configs = read_manifest(out_dir);
    std::vector<AggregateCell> cells;
    cells.reserve(configs.size());
    for (const auto& c : configs) {
        AggregateCell cell;
        cell.task = c.task;
        cell.method = c.method;
        cell.beta = c.beta;
        cell.gamma = c.gamma;
        cell.sigma2 = c.sigma2;
        cell.kappa = c.kappa;
        std::vector<double> finals;
        double loss_acc = 0.0, metric_acc = 0.0;
        int metric_n = 0;
        for (int s = 0; s < c.seeds; ++s) {
            const RunStats st = summarize_run(c, s, options);
            if (!st.present) continue;
            if (st.diverged) {
                ++cell.n_diverged;
                continue;
            }
            finals.push_back(options.trailing_window ? st.window_err : st.final_err);
            loss_acc += st.window_loss;
            if (st.has_metric) {
                metric_acc += st.window_metric;
                ++metric_n;
            }
        }
        cell.n_seeds = static_cast<int>(finals.size());
        if (!finals.empty()) {
            cell.mean_final = mean(finals);
            cell.std_final = finals.size() >= 2 ? std::sqrt(sample_variance(finals)) : 0.0;
            cell.mean_final_loss = loss_acc / static_cast<double>(finals.size());
        }
        if (metric_n > 0) {
            cell.mean_metric = metric_acc / metric_n;
            cell.has_metric = true;
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

std::string write_aggregate_csv(const std::string& out_dir,
                                const std::vector<AggregateCell>& cells) {
    const fs::path path = fs::path(out_dir) / "aggregate.csv";
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot write: " + path.string());
    f << "task,method,beta,gamma,sigma2,kappa,mean_final,std_final,n_seeds,n_diverged\n";
    for (const auto& c : cells) {
        f << c.task << ',' << c.method << ',' << format_double(c.beta) << ','
          << format_double(c.gamma) << ',' << format_double(c.sigma2) << ','
          << format_double(c.kappa) << ',' << format_double(c.mean_final) << ','
          << format_double(c.std_final) << ',' << c.n_seeds << ',' << c.n_diverged << '\n';
    }
    return path.string();
}

TableId table_id_from_name(const std::string& name) {
    if (name == "quad") return TableId::quad;
    if (name == "quad_t") return TableId::quad_t;
    if (name == "tasks") return TableId::tasks;
    throw parameter_error("unknown table id '" + name + "' (expected quad|quad_t|tasks)");
}

namespace {

std::string fmt_cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

const std::vector<std::string> kMethodOrder = {"sgd", "hb", "nag"};
const std::map<std::string, std::string> kMethodLabel = {
    {"sgd", "SGD"}, {"hb", "HB"}, {"nag", "NAG"}};

std::string render_quad(const std::vector<AggregateCell>& cells, const std::string& format) {
    std::set<double> gammas;
    std::set<std::pair<double, double>> rows;  // (beta, sigma2)
    std::map<std::tuple<double, double, double, std::string>, const AggregateCell*> by_key;
    for (const auto& c : cells) {
        if (c.task != "quadratic") continue;
        gammas.insert(c.gamma);
        rows.insert({c.beta, c.sigma2});
        by_key[{c.gamma, c.beta, c.sigma2, c.method}] = &c;
    }
    if (by_key.empty()) throw io_error("render_table: no quadratic cells found");

    std::ostringstream os;
    const bool md = format == "md";
    if (!md) os << "gamma,beta,sigma2,sgd,hb,nag\n";
    for (double gamma : gammas) {
        if (md) {
            os << "**gamma = " << format_double(gamma) << "**\n\n";
            os << "| beta | sigma2 | SGD | HB | NAG |\n";
            os << "| --- | --- | --- | --- | --- |\n";
        }
        for (const auto& [beta, sigma2] : rows) {
            std::vector<double> vals(3, std::nan(""));
            for (std::size_t m = 0; m < kMethodOrder.size(); ++m) {
                auto it = by_key.find({gamma, beta, sigma2, kMethodOrder[m]});
                if (it != by_key.end() && it->second->n_seeds > 0) {
                    vals[m] = it->second->mean_final;
                } else {
                    std::cerr << "warning: missing cell gamma=" << gamma << " beta=" << beta
                              << " sigma2=" << sigma2 << " method=" << kMethodOrder[m] << '\n';
                }
            }
            double best = std::numeric_limits<double>::infinity();
            for (double v : vals) {
                if (!std::isnan(v)) best = std::min(best, v);
            }
            if (md) {
                os << "| " << format_double(beta) << " | " << format_double(sigma2) << " |";
                for (double v : vals) {
                    if (std::isnan(v)) {
                        os << " — |";
                    } else if (v == best) {
                        os << " **" << fmt_cell(v) << "** |";
                    } else {
                        os << ' ' << fmt_cell(v) << " |";
                    }
                }
                os << '\n';
            } else {
                os << format_double(gamma) << ',' << format_double(beta) << ','
                   << format_double(sigma2);
                for (double v : vals) os << ',' << (std::isnan(v) ? "" : format_double(v));
                os << '\n';
            }
        }
        if (md) os << '\n';
    }
    return os.str();
}

std::string render_tasks(const std::vector<AggregateCell>& cells, const std::string& format) {
    std::set<std::pair<std::string, double>> groups;  // (task, kappa)
    std::map<std::tuple<std::string, double, std::string>, const AggregateCell*> by_key;
    for (const auto& c : cells) {
        if (c.task == "quadratic") continue;
        groups.insert({c.task, c.kappa});
        by_key[{c.task, c.kappa, c.method}] = &c;
    }
    if (by_key.empty()) throw io_error("render_table: no task cells found");

    std::ostringstream os;
    const bool md = format == "md";
    if (!md) os << "task,kappa,method,loss,track,metric\n";
    for (const auto& [task, kappa] : groups) {
        if (md) {
            os << "**" << task << " (kappa = " << format_double(kappa) << ")**\n\n";
            os << "| method | loss | track |" << (task == "logreg" ? " acc |" : "") << '\n';
            os << "| --- | --- | --- |" << (task == "logreg" ? " --- |" : "") << '\n';
        }
        double best_loss = std::numeric_limits<double>::infinity();
        double best_track = std::numeric_limits<double>::infinity();
        for (const auto& m : kMethodOrder) {
            auto it = by_key.find({task, kappa, m});
            if (it == by_key.end() || it->second->n_seeds == 0) continue;
            best_loss = std::min(best_loss, it->second->mean_final_loss);
            best_track = std::min(best_track, it->second->mean_final);
        }
        for (const auto& m : kMethodOrder) {
            auto it = by_key.find({task, kappa, m});
            if (it == by_key.end() || it->second->n_seeds == 0) {
                std::cerr << "warning: missing cell task=" << task << " kappa=" << kappa
                          << " method=" << m << '\n';
                if (md) {
                    os << "| " << kMethodLabel.at(m) << " | — | — |"
                       << (task == "logreg" ? " — |" : "") << '\n';
                }
                continue;
            }
            const AggregateCell& c = *it->second;
            auto fmt_bold = [&](double v, double best) {
                const std::string s = fmt_cell(v);
                return (md && v == best) ? "**" + s + "**" : s;
            };
            if (md) {
                os << "| " << kMethodLabel.at(m) << " | " << fmt_bold(c.mean_final_loss, best_loss)
                   << " | " << fmt_bold(c.mean_final, best_track) << " |";
                if (task == "logreg") {
                    os << ' ' << (c.has_metric ? fmt_cell(c.mean_metric) : "—") << " |";
                }
                os << '\n';
            } else {
                os << task << ',' << format_double(kappa) << ',' << m << ','
                   << format_double(c.mean_final_loss) << ',' << format_double(c.mean_final) << ','
                   << (c.has_metric ? format_double(c.mean_metric) : "") << '\n';
            }
        }
        if (md) os << '\n';
    }
    return os.str();
}

}  // namespace

std::string render_table(const std::string& out_dir, TableId id, const std::string& format,
                         const AggregateOptions& options) {
    if (format != "md" && format != "csv") {
        throw parameter_error("render_table: format must be md or csv");
    }
    const std::vector<AggregateCell> cells = aggregate(out_dir, options);
    switch (id) {
        case TableId::quad:
        case TableId::quad_t:
            return render_quad(cells, format);
        case TableId::tasks:
            return render_tasks(cells, format);
    }
    throw parameter_error("unreachable table id");
}

std::string plot_data(const std::string& out_dir, long long stride) {
    if (stride < 1) throw parameter_error("plot_data: stride must be >= 1");
    const std::vector<ExperimentConfig> configs = read_manifest(out_dir);
    std::ostringstream os;
    os << "config,task,method,beta,gamma,sigma2,t,mean,std\n";
    for (const auto& c : configs) {
        // t -> (sum, sum of squares, count) over seeds
        std::map<long long, std::array<double, 3>> acc;
        for (int s = 0; s < c.seeds; ++s) {
            const std::string file = c.file_name(s);
            if (!fs::exists(file)) continue;
            for (const RunRecord& r : read_records(file)) {
                for (const StepRow& row : r.steps) {
                    if (row.t % stride != 0 && row.t != c.T) continue;
                    auto& a = acc[row.t];
                    a[0] += row.tracking_error_sq;
                    a[1] += row.tracking_error_sq * row.tracking_error_sq;
                    a[2] += 1.0;
                }
            }
        }
        for (const auto& [t, a] : acc) {
            const double n = a[2];
            const double m = a[0] / n;
            const double var = n >= 2.0 ? std::max(0.0, (a[1] - n * m * m) / (n - 1.0)) : 0.0;
            os << c.digest << ',' << c.task << ',' << c.method << ',' << format_double(c.beta)
               << ',' << format_double(c.gamma) << ',' << format_double(c.sigma2) << ',' << t
               << ',' << format_double(m) << ',' << format_double(std::sqrt(var)) << '\n';
        }
    }
    return os.str();
}

}  // namespace drifttrack::runner

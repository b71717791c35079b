#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Foundational value types shared by every module: dense vectors with
// strict dimension checking, a counter-based seeded random stream, and
// the per-run record that gets persisted to CSV.

namespace drifttrack {

struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct unsupported_error : std::logic_error {
    using std::logic_error::logic_error;
};
struct stability_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct regime_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct divergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct resolution_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct packing_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense real vector with a fixed dimension. All binary operations check
/// that dimensions match and throw parameter_error otherwise; there is no
/// silent broadcasting.
class Vec {
  public:
    Vec() = default;
    explicit Vec(std::size_t d, double fill = 0.0) : v_(d, fill) {}
    explicit Vec(std::vector<double> entries) : v_(std::move(entries)) {}

    static Vec zeros(std::size_t d) { return Vec(d, 0.0); }
    static Vec unit(std::size_t d, std::size_t axis);

    std::size_t size() const { return v_.size(); }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    const std::vector<double>& entries() const { return v_; }

    Vec& operator+=(const Vec& o);
    Vec& operator-=(const Vec& o);
    Vec& operator*=(double s);
    /// this += a * x
    Vec& axpy(double a, const Vec& x);

    double dot(const Vec& o) const;
    double squared_norm() const;
    double norm() const;
    bool all_finite() const;

    friend bool operator==(const Vec& a, const Vec& b) { return a.v_ == b.v_; }

  private:
    std::vector<double> v_;
};

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double s, Vec a);

/// Counter-based pseudo-random stream. A stream is identified by
/// (seed, stream_id); draws are a pure function of (seed, stream_id,
/// counter), so identical identifiers reproduce identical sequences
/// regardless of thread interleaving, and jump-ahead is a counter add.
/// Distinct stream_ids give statistically independent streams.
class SeededStream {
  public:
    SeededStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 bits of precision.
    double next_uniform();
    /// Standard normal draw (Box-Muller; one pair per two calls is not
    /// cached across calls, so the sequence is a pure function of the
    /// counter).
    double next_normal();
    /// Gamma(alpha, 1) for alpha >= 1 (Marsaglia-Tsang).
    double next_gamma(double alpha);

    /// Derive an independent substream labelled by `label`. Forking is
    /// deterministic and does not advance this stream.
    SeededStream fork(std::uint64_t label) const;

    void skip(std::uint64_t n) { counter_ += n; }

  private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

/// d i.i.d. mean-zero normal draws with the given per-coordinate variance.
Vec gaussian_vec(SeededStream& stream, std::size_t d, double variance);

struct StepRow {
    long long t = 0;
    double tracking_error_sq = 0.0;
    double loss = 0.0;
    std::optional<double> metric;
};

/// One seeded run: per-step tracking error, loss, and an optional task
/// metric. `config_digest` ties the record back to the configuration that
/// produced it; `diverged` is runtime metadata (not serialized) set when
/// the run was truncated by the NaN/threshold abort policy.
struct RunRecord {
    std::string run_id;
    std::uint64_t seed = 0;
    std::vector<StepRow> steps;
    std::string config_digest;
    bool diverged = false;
};

/// Serialized equality: run_id, seed, and all step rows byte-for-byte
/// after a CSV round trip (the digest does not travel through the CSV).
bool same_serialized(const RunRecord& a, const RunRecord& b);

/// CSV persistence, header `run_id,seed,t,tracking_error_sq,loss,metric`.
/// Reals use the shortest round-trip decimal form, so write/read/write is
/// byte-identical.
void write_records(const std::vector<RunRecord>& records, const std::string& path);
std::vector<RunRecord> read_records(const std::string& path);

std::string format_double(double x);
double parse_double(const std::string& s, const std::string& context);

/// FNV-1a over a string, used for config digests and stream labels.
std::uint64_t fnv1a64(const std::string& s);
std::string hex16(std::uint64_t x);

// Small statistics helpers shared by tests and the runner.
double mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);
/// Least squares y ~ a + b x; returns (intercept, slope, r_squared).
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace drifttrack

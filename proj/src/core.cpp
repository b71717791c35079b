#include "drifttrack/core.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace drifttrack {

namespace {

void check_same_dim(const Vec& a, const Vec& b, const char* op) {
    if (a.size() != b.size()) {
        throw parameter_error(std::string(op) + ": dimension mismatch " +
                              std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

Vec Vec::unit(std::size_t d, std::size_t axis) {
    if (axis >= d) throw parameter_error("Vec::unit: axis out of range");
    Vec e(d);
    e[axis] = 1.0;
    return e;
}

Vec& Vec::operator+=(const Vec& o) {
    check_same_dim(*this, o, "Vec::operator+=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

Vec& Vec::operator-=(const Vec& o) {
    check_same_dim(*this, o, "Vec::operator-=");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
    return *this;
}

Vec& Vec::operator*=(double s) {
    for (double& x : v_) x *= s;
    return *this;
}

Vec& Vec::axpy(double a, const Vec& x) {
    check_same_dim(*this, x, "Vec::axpy");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += a * x.v_[i];
    return *this;
}

double Vec::dot(const Vec& o) const {
    check_same_dim(*this, o, "Vec::dot");
    double s = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) s += v_[i] * o.v_[i];
    return s;
}

double Vec::squared_norm() const {
    double s = 0.0;
    for (double x : v_) s += x * x;
    return s;
}

double Vec::norm() const { return std::sqrt(squared_norm()); }

bool Vec::all_finite() const {
    for (double x : v_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

Vec operator+(Vec a, const Vec& b) {
    a += b;
    return a;
}
Vec operator-(Vec a, const Vec& b) {
    a -= b;
    return a;
}
Vec operator*(double s, Vec a) {
    a *= s;
    return a;
}

namespace {

// SplitMix64 finalizer; full-period bijective mixer on 64 bits.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

SeededStream::SeededStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    key_ = mix64(mix64(seed) ^ mix64(stream_id * 0xD2B74407B1CE6E93ULL + 0x8BB84B93962EACC9ULL));
}

std::uint64_t SeededStream::next_u64() { return mix64(key_ + counter_++ * 0x9E3779B97F4A7C15ULL); }

double SeededStream::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededStream::next_normal() {
    const double u1 = 1.0 - next_uniform();  // (0, 1], keeps log finite
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double SeededStream::next_gamma(double alpha) {
    if (alpha < 1.0) throw parameter_error("next_gamma: alpha must be >= 1");
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = next_normal();
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = next_uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

SeededStream SeededStream::fork(std::uint64_t label) const {
    SeededStream s(seed_, 0);
    s.stream_id_ = stream_id_;
    s.key_ = mix64(key_ ^ mix64(label * 0xA24BAED4963EE407ULL + 0x9FB21C651E98DF25ULL));
    s.counter_ = 0;
    return s;
}

Vec gaussian_vec(SeededStream& stream, std::size_t d, double variance) {
    if (variance < 0.0) throw parameter_error("gaussian_vec: negative variance");
    if (d < 1) throw parameter_error("gaussian_vec: dimension must be >= 1");
    Vec out(d);
    if (variance == 0.0) return out;
    const double sd = std::sqrt(variance);
    // Box-Muller in pairs; the dangling half of an odd-length request is
    // dropped so each call is a pure function of the counter position.
    for (std::size_t i = 0; i < d; i += 2) {
        const double u1 = 1.0 - stream.next_uniform();
        const double u2 = stream.next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        out[i] = sd * r * std::cos(kTwoPi * u2);
        if (i + 1 < d) out[i + 1] = sd * r * std::sin(kTwoPi * u2);
    }
    return out;
}

std::string format_double(double x) {
    if (!std::isfinite(x)) throw io_error("format_double: non-finite value");
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& context) {
    double x = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw parse_error("bad real value '" + s + "' at " + context);
    }
    return x;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex16(std::uint64_t x) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[x & 0xF];
        x >>= 4;
    }
    return out;
}

bool same_serialized(const RunRecord& a, const RunRecord& b) {
    if (a.run_id != b.run_id || a.seed != b.seed || a.steps.size() != b.steps.size()) return false;
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        const StepRow& x = a.steps[i];
        const StepRow& y = b.steps[i];
        if (x.t != y.t || x.tracking_error_sq != y.tracking_error_sq || x.loss != y.loss ||
            x.metric.has_value() != y.metric.has_value())
            return false;
        if (x.metric && *x.metric != *y.metric) return false;
    }
    return true;
}

void write_records(const std::vector<RunRecord>& records, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open for writing: " + path);
    f << "run_id,seed,t,tracking_error_sq,loss,metric\n";
    for (const RunRecord& r : records) {
        if (r.run_id.find(',') != std::string::npos || r.run_id.find('\n') != std::string::npos) {
            throw io_error("run_id may not contain ',' or newline: " + r.run_id);
        }
        for (const StepRow& s : r.steps) {
            f << r.run_id << ',' << r.seed << ',' << s.t << ',' << format_double(s.tracking_error_sq)
              << ',' << format_double(s.loss) << ',';
            if (s.metric) f << format_double(*s.metric);
            f << '\n';
        }
        if (r.steps.empty()) {
            // Header-only contribution; nothing to write for an empty run.
        }
    }
    if (!f) throw io_error("write failed: " + path);
}

std::vector<RunRecord> read_records(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(f, line)) throw parse_error(path + ":1: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "run_id,seed,t,tracking_error_sq,loss,metric") {
        throw parse_error(path + ":1: unexpected header '" + line + "'");
    }
    std::vector<RunRecord> out;
    std::size_t lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<std::string, 6> fields;
        std::size_t start = 0;
        int nf = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                if (nf >= 6) throw parse_error(path + ":" + std::to_string(lineno) + ": too many fields");
                fields[nf++] = line.substr(start, i - start);
                start = i + 1;
            }
        }
        if (nf != 6) throw parse_error(path + ":" + std::to_string(lineno) + ": expected 6 fields, got " + std::to_string(nf));
        const std::string where = path + ":" + std::to_string(lineno);
        StepRow row;
        row.t = static_cast<long long>(parse_double(fields[2], where));
        row.tracking_error_sq = parse_double(fields[3], where);
        row.loss = parse_double(fields[4], where);
        if (!fields[5].empty()) row.metric = parse_double(fields[5], where);
        std::uint64_t seed = 0;
        {
            auto res = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), seed);
            if (res.ec != std::errc() || res.ptr != fields[1].data() + fields[1].size()) {
                throw parse_error(where + ": bad seed '" + fields[1] + "'");
            }
        }
        if (out.empty() || out.back().run_id != fields[0] || out.back().seed != seed) {
            RunRecord r;
            r.run_id = fields[0];
            r.seed = seed;
            out.push_back(std::move(r));
        }
        RunRecord& r = out.back();
        if (!r.steps.empty() && r.steps.back().t >= row.t) {
            throw parse_error(where + ": step index not strictly increasing");
        }
        if (row.tracking_error_sq < 0.0) {
            throw parse_error(where + ": negative tracking error");
        }
        r.steps.push_back(row);
    }
    return out;
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw parameter_error("mean of empty sequence");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs) {
    if (xs.size() < 2) throw parameter_error("sample_variance needs >= 2 points");
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw parameter_error("linear_fit: need matched series, n >= 2");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

}  // namespace drifttrack

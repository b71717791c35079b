#include "drifttrack/drift.hpp"

#include <cmath>
#include <fstream>

namespace drifttrack::drift {

std::string kind_name(Kind k) {
    switch (k) {
        case Kind::gaussian_walk: return "gaussian_walk";
        case Kind::student_t_walk: return "student_t_walk";
        case Kind::block_switch: return "block_switch";
        case Kind::gaussian_ray: return "gaussian_ray";
    }
    throw parameter_error("unknown drift kind");
}

Kind kind_from_name(const std::string& name) {
    if (name == "gaussian_walk") return Kind::gaussian_walk;
    if (name == "student_t_walk") return Kind::student_t_walk;
    if (name == "block_switch") return Kind::block_switch;
    if (name == "gaussian_ray") return Kind::gaussian_ray;
    throw parameter_error("unknown drift kind '" + name + "'");
}

DriftProcess DriftProcess::gaussian_walk(double delta_rw) {
    DriftProcess p;
    p.kind = Kind::gaussian_walk;
    p.delta_rw = delta_rw;
    return p;
}

DriftProcess DriftProcess::student_t_walk(double delta_rw, double nu) {
    DriftProcess p;
    p.kind = Kind::student_t_walk;
    p.delta_rw = delta_rw;
    p.nu = nu;
    return p;
}

DriftProcess DriftProcess::gaussian_ray(double delta_rw) {
    DriftProcess p;
    p.kind = Kind::gaussian_ray;
    p.delta_rw = delta_rw;
    return p;
}

DriftProcess DriftProcess::block_switch(long J, double a, Vec axis) {
    DriftProcess p;
    p.kind = Kind::block_switch;
    BlockSpec b;
    b.J = J;
    b.a = a;
    b.axis = std::move(axis);
    p.block = std::move(b);
    return p;
}

namespace {

Vec draw_direction(const DriftProcess& proc, std::size_t d, SeededStream& stream) {
    // Zero-norm innovations (probability zero in exact arithmetic) are
    // redrawn so normalization never divides by zero.
    for (;;) {
        Vec u(d);
        if (proc.kind == Kind::student_t_walk) {
            for (std::size_t i = 0; i < d; ++i) {
                const double z = stream.next_normal();
                const double chi2 = 2.0 * stream.next_gamma(proc.nu / 2.0);
                u[i] = z * std::sqrt(proc.nu / chi2);
            }
        } else {
            u = gaussian_vec(stream, d, 1.0);
        }
        const double n = u.norm();
        if (n > 0.0) {
            if (proc.normalize_steps) u *= 1.0 / n;
            return u;
        }
    }
}

}  // namespace

MinimizerPath generate_path(const DriftProcess& proc, const Vec& theta0, long T,
                            SeededStream& stream) {
    if (T < 1) throw parameter_error("generate_path: horizon must be >= 1");
    MinimizerPath path;
    path.points.reserve(static_cast<std::size_t>(T) + 1);
    path.points.push_back(theta0);

    switch (proc.kind) {
        case Kind::gaussian_walk:
        case Kind::student_t_walk: {
            if (proc.kind == Kind::student_t_walk && !(proc.nu > 2.0)) {
                throw parameter_error("student_t_walk requires nu > 2");
            }
            for (long t = 0; t < T; ++t) {
                Vec next = path.points.back();
                if (proc.delta_rw != 0.0) {
                    Vec u = draw_direction(proc, theta0.size(), stream);
                    next.axpy(proc.delta_rw, u);
                }
                path.points.push_back(std::move(next));
            }
            break;
        }
        case Kind::gaussian_ray: {
            Vec u(theta0.size());
            if (proc.delta_rw != 0.0) {
                DriftProcess g = proc;
                g.normalize_steps = true;
                u = draw_direction(g, theta0.size(), stream);
            }
            for (long t = 0; t < T; ++t) {
                Vec next = path.points.back();
                if (proc.delta_rw != 0.0) next.axpy(proc.delta_rw, u);
                path.points.push_back(std::move(next));
            }
            break;
        }
        case Kind::block_switch: {
            if (!proc.block) throw parameter_error("block_switch requires block spec");
            const BlockSpec& b = *proc.block;
            if (b.J < 1) throw parameter_error("block_switch: J must be >= 1");
            if (b.axis.size() != theta0.size()) {
                throw parameter_error("block_switch: axis dimension mismatch");
            }
            const long len = std::max<long>(1, T / b.J);
            path.points.clear();
            for (long t = 0; t <= T; ++t) {
                const long blk = t / len;
                const double sign = (blk % 2 == 0) ? 1.0 : -1.0;
                Vec p(theta0.size());
                p.axpy(sign * b.a, b.axis);
                path.points.push_back(std::move(p));
            }
            break;
        }
    }
    return path;
}

std::vector<double> drift_increments(const MinimizerPath& path) {
    if (path.points.size() < 2) throw parameter_error("drift_increments: path length must be >= 2");
    std::vector<double> out;
    out.reserve(path.points.size() - 1);
    for (std::size_t t = 0; t + 1 < path.points.size(); ++t) {
        out.push_back((path.points[t] - path.points[t + 1]).squared_norm());
    }
    return out;
}

void write_path_csv(const MinimizerPath& path, const std::string& file) {
    std::ofstream f(file, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open for writing: " + file);
    const std::size_t d = path.points.empty() ? 0 : path.points[0].size();
    f << "t";
    for (std::size_t i = 0; i < d; ++i) f << ",coord_" << i;
    f << '\n';
    for (std::size_t t = 0; t < path.points.size(); ++t) {
        f << t;
        for (std::size_t i = 0; i < d; ++i) f << ',' << format_double(path.points[t][i]);
        f << '\n';
    }
    if (!f) throw io_error("write failed: " + file);
}

}  // namespace drifttrack::drift

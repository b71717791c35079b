#pragma once

#include <optional>
#include <string>
#include <vector>

#include "drifttrack/core.hpp"

// Generators for the time-varying minimizer path and its increments.

namespace drifttrack::drift {

enum class Kind {
    /// Unit-norm step with a fresh Gaussian direction every step.
    gaussian_walk,
    /// Unit-norm step with a fresh per-coordinate Student-t direction.
    student_t_walk,
    /// Piecewise-constant path flipping between +a*axis and -a*axis.
    block_switch,
    /// Unit-norm step along one Gaussian direction drawn at t = 0. This is
    /// the constant-velocity protocol that reproduces the quadratic
    /// benchmark table; see README.
    gaussian_ray,
};

std::string kind_name(Kind k);
Kind kind_from_name(const std::string& name);

struct BlockSpec {
    long J = 2;       // number of blocks over the horizon
    double a = 1.0;   // offset magnitude
    Vec axis;         // unit direction of the +-a offsets
};

struct DriftProcess {
    Kind kind = Kind::gaussian_walk;
    double delta_rw = 0.0;  // per-step displacement norm (walk kinds)
    double nu = 3.0;        // Student-t degrees of freedom, > 2
    /// Walk steps are scaled to norm exactly delta_rw. Disabling this for
    /// the Student-t walk applies delta_rw * u_t with raw heavy-tailed u_t.
    bool normalize_steps = true;
    std::optional<BlockSpec> block;

    static DriftProcess gaussian_walk(double delta_rw);
    static DriftProcess student_t_walk(double delta_rw, double nu = 3.0);
    static DriftProcess gaussian_ray(double delta_rw);
    static DriftProcess block_switch(long J, double a, Vec axis);
};

struct MinimizerPath {
    std::vector<Vec> points;  // length T + 1

    long horizon() const { return static_cast<long>(points.size()) - 1; }
    const Vec& at(long t) const { return points[static_cast<std::size_t>(t)]; }
};

/// Realize theta*_0..theta*_T. Walk kinds draw from `stream`; generation is
/// independent of whichever optimizer later consumes the path.
MinimizerPath generate_path(const DriftProcess& proc, const Vec& theta0, long T,
                            SeededStream& stream);

/// Squared per-step displacements ||theta*_t - theta*_{t+1}||^2, t = 0..T-1.
std::vector<double> drift_increments(const MinimizerPath& path);

/// Audit export, header `t,coord_0,...,coord_{d-1}`.
void write_path_csv(const MinimizerPath& path, const std::string& file);

}  // namespace drifttrack::drift

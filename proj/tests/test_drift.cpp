#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "drifttrack/drift.hpp"

using namespace drifttrack;
using drift::DriftProcess;

TEST_CASE("zero drift gives a constant path") {
    SeededStream s(1, 1);
    Vec theta0(std::vector<double>{1.0, -2.0, 3.0});
    auto path = drift::generate_path(DriftProcess::gaussian_walk(0.0), theta0, 10, s);
    REQUIRE(path.points.size() == 11);
    for (const Vec& p : path.points) CHECK(p == theta0);
    for (double d2 : drift::drift_increments(path)) CHECK(d2 == 0.0);
}

TEST_CASE("normalized walk steps have exact norm") {
    SeededStream s(3, 5);
    Vec theta0(100);
    auto path = drift::generate_path(DriftProcess::gaussian_walk(0.01), theta0, 200, s);
    for (std::size_t t = 0; t + 1 < path.points.size(); ++t) {
        CHECK((path.points[t + 1] - path.points[t]).norm() == doctest::Approx(0.01).epsilon(1e-12));
    }
    for (double d2 : drift::drift_increments(path)) {
        CHECK(d2 == doctest::Approx(1e-4).epsilon(1e-12));
    }
}

TEST_CASE("student-t walk: normalized, nu guard") {
    SeededStream s(4, 4);
    auto proc = DriftProcess::student_t_walk(0.05, 3.0);
    auto path = drift::generate_path(proc, Vec(10), 50, s);
    for (double d2 : drift::drift_increments(path)) {
        CHECK(d2 == doctest::Approx(0.0025).epsilon(1e-12));
    }
    auto bad = DriftProcess::student_t_walk(0.05, 2.0);
    SeededStream s2(4, 4);
    CHECK_THROWS_AS(drift::generate_path(bad, Vec(10), 5, s2), parameter_error);
}

TEST_CASE("gaussian ray keeps one direction") {
    SeededStream s(9, 2);
    auto path = drift::generate_path(DriftProcess::gaussian_ray(0.01), Vec(20), 100, s);
    const Vec first = path.points[1] - path.points[0];
    for (std::size_t t = 0; t + 1 < path.points.size(); ++t) {
        const Vec step = path.points[t + 1] - path.points[t];
        CHECK((step - first).norm() < 1e-14);
    }
    CHECK(first.norm() == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("block switch alternates signs") {
    Vec axis = Vec::unit(1, 0);
    auto proc = DriftProcess::block_switch(4, 1.0, axis);
    SeededStream s(0, 0);
    auto path = drift::generate_path(proc, Vec(1), 8, s);
    const std::vector<double> expect = {1, 1, -1, -1, 1, 1, -1, -1, 1};
    REQUIRE(path.points.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(path.points[i][0] == expect[i]);

    // Increments: ||2a axis||^2 at boundaries, 0 inside blocks.
    auto proc2 = DriftProcess::block_switch(4, 0.5, Vec::unit(3, 1));
    auto path2 = drift::generate_path(proc2, Vec(3), 8, s);
    auto inc = drift::drift_increments(path2);
    const std::vector<double> expect2 = {0, 1.0, 0, 1.0, 0, 1.0, 0, 1.0};
    REQUIRE(inc.size() == expect2.size());
    for (std::size_t i = 0; i < inc.size(); ++i) CHECK(inc[i] == doctest::Approx(expect2[i]));
}

TEST_CASE("path generation is stream-reproducible") {
    SeededStream s1(11, 3), s2(11, 3);
    auto p1 = drift::generate_path(DriftProcess::gaussian_walk(0.02), Vec(7), 40, s1);
    auto p2 = drift::generate_path(DriftProcess::gaussian_walk(0.02), Vec(7), 40, s2);
    for (std::size_t i = 0; i < p1.points.size(); ++i) CHECK(p1.points[i] == p2.points[i]);
}

TEST_CASE("path CSV export") {
    SeededStream s(31, 0);
    auto path = drift::generate_path(DriftProcess::gaussian_walk(0.1), Vec(2), 3, s);
    const std::string file =
        (std::filesystem::temp_directory_path() / "dt_path_audit.csv").string();
    drift::write_path_csv(path, file);
    std::ifstream f(file);
    std::string header;
    std::getline(f, header);
    CHECK(header == "t,coord_0,coord_1");
    int rows = 0;
    std::string line;
    while (std::getline(f, line)) ++rows;
    CHECK(rows == 4);
}

TEST_CASE("gaussian walk drift matches the second-moment bound exactly") {
    // E[Delta_t^2] = delta_rw^2 with zero variance under normalization.
    SeededStream s(21, 0);
    auto path = drift::generate_path(DriftProcess::gaussian_walk(0.3), Vec(5), 64, s);
    for (double d2 : drift::drift_increments(path)) CHECK(d2 == doctest::Approx(0.09).epsilon(1e-12));
}

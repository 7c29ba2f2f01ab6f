#include <doctest.h>

#include <cmath>

#include "safeaci/dynamics.hpp"
#include "safeaci/errors.hpp"
#include "safeaci/rng.hpp"

using namespace safeaci;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("mass matrix at q2 = pi/2") {
    // cos(q2) = 0 kills the coupling terms beyond p2.
    Mat m = mass_matrix({}, Vec{0.3, kPi / 2.0});
    CHECK(m(0, 0) == doctest::Approx(3.473).epsilon(1e-12));
    CHECK(m(0, 1) == doctest::Approx(0.196).epsilon(1e-12));
    CHECK(m(1, 0) == doctest::Approx(0.196).epsilon(1e-12));
    CHECK(m(1, 1) == doctest::Approx(0.196).epsilon(1e-12));
}

TEST_CASE("mass matrix determinant at q2 = 0") {
    Mat m = mass_matrix({}, Vec{0.0, 0.0});
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    // (p1 + 2 p3)(p2) - (p2 + p3)^2 with the default parameters
    CHECK(det == doctest::Approx(0.583728).epsilon(1e-12));
}

TEST_CASE("coriolis matrix hand values at s2 = 1") {
    Mat c = coriolis_matrix({}, Vec{0.0, kPi / 2.0}, Vec{1.0, 1.0});
    CHECK(c(0, 0) == doctest::Approx(-0.242).epsilon(1e-12));
    CHECK(c(0, 1) == doctest::Approx(-0.484).epsilon(1e-12));
    CHECK(c(1, 0) == doctest::Approx(0.242).epsilon(1e-12));
    CHECK(c(1, 1) == 0.0);
}

TEST_CASE("mass matrix positive definite over a q2 sweep") {
    Mat scratch;
    for (int k = 0; k <= 360; ++k) {
        const double q2 = -kPi + 2.0 * kPi * k / 360.0;
        Mat m = mass_matrix({}, Vec{0.0, q2});
        CHECK(is_positive_definite(m, scratch));
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        CHECK(det >= 0.5837);
    }
}

TEST_CASE("drift solves the joint-space force balance") {
    // M(q) qdd = -C(q, qd) qd - F qd, checked by substituting the drift
    // accelerations back instead of re-deriving the inverse.
    Rng rng(17);
    ManipulatorParams params;
    for (int trial = 0; trial < 200; ++trial) {
        Vec x{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-4, 4),
              rng.uniform(-4, 4)};
        Vec f = manipulator_drift(params, x);
        CHECK(f[0] == x[2]);
        CHECK(f[1] == x[3]);
        Mat m = mass_matrix(params, Vec{x[0], x[1]});
        Mat c = coriolis_matrix(params, Vec{x[0], x[1]}, Vec{x[2], x[3]});
        Vec qd{x[2], x[3]};
        Vec rhs = matvec(c, qd);
        rhs[0] = -rhs[0] - params.fd1 * x[2];
        rhs[1] = -rhs[1] - params.fd2 * x[3];
        Vec lhs = matvec(m, Vec{f[2], f[3]});
        CHECK(lhs[0] == doctest::Approx(rhs[0]).epsilon(1e-12));
        CHECK(lhs[1] == doctest::Approx(rhs[1]).epsilon(1e-12));
    }
}

TEST_CASE("kinetic energy decays exactly at the friction rate") {
    // dE/dt = qd . M qdd + 1/2 qd . Mdot qd must equal -qd . F qd because
    // Mdot - 2C is skew-symmetric for this parameterization.
    Rng rng(23);
    ManipulatorParams params;
    for (int trial = 0; trial < 100; ++trial) {
        Vec x{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-4, 4),
              rng.uniform(-4, 4)};
        Vec f = manipulator_drift(params, x);
        Mat m = mass_matrix(params, Vec{x[0], x[1]});
        const double s2 = std::sin(x[1]);
        // dM/dt = dM/dq2 * qd2
        Mat mdot(2, 2);
        mdot(0, 0) = -2.0 * params.p3 * s2 * x[3];
        mdot(0, 1) = mdot(1, 0) = -params.p3 * s2 * x[3];
        Vec qd{x[2], x[3]};
        const double de = dot(qd, matvec(m, Vec{f[2], f[3]})) +
                          0.5 * dot(qd, matvec(mdot, qd));
        const double friction =
            -(params.fd1 * x[2] * x[2] + params.fd2 * x[3] * x[3]);
        CHECK(de == doctest::Approx(friction).epsilon(1e-10));
    }
}

TEST_CASE("input map stacks zero block over the mass inverse") {
    ManipulatorParams params;
    Vec x{0.7, -1.2, 0.5, 2.0};
    Mat g = manipulator_input(params, x);
    REQUIRE(g.rows() == 4);
    REQUIRE(g.cols() == 2);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(g(0, j) == 0.0);
        CHECK(g(1, j) == 0.0);
    }
    // M * bottom block = I
    Mat m = mass_matrix(params, Vec{x[0], x[1]});
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t i = 0; i < 2; ++i) {
            const double e =
                m(i, 0) * g(2, j) + m(i, 1) * g(3, j);
            CHECK(e == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        }
}

TEST_CASE("two_link_model matches the free functions") {
    ManipulatorParams params;
    SystemModel model = two_link_model(params);
    CHECK(model.n == 4);
    CHECK(model.m == 2);
    Vec x{1.0, -0.5, 2.0, -1.0};
    Vec f = model.drift(x);
    Vec f_ref = manipulator_drift(params, x);
    for (int i = 0; i < 4; ++i) CHECK(f[i] == f_ref[i]);
    Mat g = model.input_map(x);
    Mat g_ref = manipulator_input(params, x);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(g(i, j) == g_ref(i, j));
}

TEST_CASE("drift has no position dependence beyond q2 coupling") {
    // Zero velocities give zero drift everywhere: the arm has no gravity
    // or stiffness terms.
    ManipulatorParams params;
    Vec f = manipulator_drift(params, Vec{2.0, -2.0, 0.0, 0.0});
    for (int i = 0; i < 4; ++i) CHECK(f[i] == 0.0);
}

TEST_CASE("parameter validation") {
    ManipulatorParams bad;
    bad.p1 = -1.0;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    ManipulatorParams degenerate;
    degenerate.p3 = 10.0;  // mass matrix loses definiteness on the sweep
    CHECK_THROWS_AS(validate(degenerate), ConfigError);
    CHECK_NOTHROW(validate(ManipulatorParams{}));
}

TEST_CASE("wrong state size throws") {
    CHECK_THROWS_AS(manipulator_drift({}, Vec{1.0, 2.0}), DimensionError);
    CHECK_THROWS_AS(mass_matrix({}, Vec{1.0}), DimensionError);
}

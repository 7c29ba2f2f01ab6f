#ifndef SAFEACI_DYNAMICS_HPP
#define SAFEACI_DYNAMICS_HPP

#include <functional>

#include "safeaci/linalg.hpp"

// Control-affine plants xdot = f(x) + g(x) u, plus the built-in horizontal
// two-link revolute manipulator used by the benchmark runs. Manipulator
// state is x = (q1, q2, qd1, qd2), input is the joint torque pair.

namespace safeaci {

struct ManipulatorParams {
    double p1 = 3.473;   // inertia combination (kg m^2)
    double p2 = 0.196;
    double p3 = 0.242;
    double fd1 = 5.3;    // viscous friction (N m s)
    double fd2 = 1.1;
};

// Throws ConfigError when parameters are non-physical (non-positive inertia
// terms, negative friction, or a mass matrix that loses positive
// definiteness anywhere on a q2 sweep).
void validate(const ManipulatorParams& params);

struct SystemModel {
    int n = 0;  // state dimension
    int m = 0;  // input dimension
    std::function<void(const Vec& x, Vec& f)> drift_into;
    std::function<void(const Vec& x, Mat& g)> input_map_into;

    Vec drift(const Vec& x) const {
        Vec f(static_cast<std::size_t>(n));
        drift_into(x, f);
        return f;
    }
    Mat input_map(const Vec& x) const {
        Mat g(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
        input_map_into(x, g);
        return g;
    }
};

Mat mass_matrix(const ManipulatorParams& params, const Vec& q);
Mat coriolis_matrix(const ManipulatorParams& params, const Vec& q, const Vec& qdot);

// f(x) = [qdot; M(q)^-1 (-C(q,qdot) qdot - F qdot)], gravity-free arm.
Vec manipulator_drift(const ManipulatorParams& params, const Vec& x);

// g(x) = [0; M(q)^-1].
Mat manipulator_input(const ManipulatorParams& params, const Vec& x);

SystemModel two_link_model(const ManipulatorParams& params = {});

}  // namespace safeaci

#endif

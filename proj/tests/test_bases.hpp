#ifndef SAFEACI_TEST_BASES_HPP
#define SAFEACI_TEST_BASES_HPP

#include "safeaci/dynamics.hpp"
#include "safeaci/value.hpp"

// Tiny analytic features and plants for desk-scale oracle tests.

namespace safeaci::testing {

// phi(x) = [x^2] on a scalar state: the exact value-function basis of the
// scalar LQR problem xdot = u, Q = x^2, R = 1 (whose solution is V = x^2).
class QuadraticBasis final : public Basis {
  public:
    int features() const override { return 1; }
    int dim() const override { return 1; }
    void eval_into(const Vec& x, Vec& phi) const override {
        phi.assign(1, x.at(0) * x.at(0));
    }
    void jacobian_into(const Vec& x, Mat& jac) const override {
        if (jac.rows() != 1 || jac.cols() != 1) jac = Mat(1, 1);
        jac(0, 0) = 2.0 * x.at(0);
    }
};

// xdot = u: one state, one input, zero drift.
inline SystemModel integrator_model() {
    SystemModel m;
    m.n = 1;
    m.m = 1;
    m.drift_into = [](const Vec&, Vec& f) { f.assign(1, 0.0); };
    m.input_map_into = [](const Vec&, Mat& g) {
        if (g.rows() != 1 || g.cols() != 1) g = Mat(1, 1);
        g(0, 0) = 1.0;
    };
    return m;
}

}  // namespace safeaci::testing

#endif

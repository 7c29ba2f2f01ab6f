#include "safeaci/dynamics.hpp"

#include <cmath>
#include <string>

#include "safeaci/errors.hpp"

namespace safeaci {

namespace {

struct Mass2 {
    double m00, m01, m11, det;
};

// The 2x2 mass matrix is inverted by cofactors; a general solver would be
// slower and no more accurate at this size. det(M) = p2 (p1 - p2) - p3^2 c2^2
// for this arm, so a positive determinant on a q2 sweep certifies PD.
Mass2 mass_terms(const ManipulatorParams& p, double q2) {
    const double c2 = std::cos(q2);
    Mass2 m;
    m.m00 = p.p1 + 2.0 * p.p3 * c2;
    m.m01 = p.p2 + p.p3 * c2;
    m.m11 = p.p2;
    m.det = m.m00 * m.m11 - m.m01 * m.m01;
    const double scale = m.m00 * m.m00 + 2.0 * m.m01 * m.m01 + m.m11 * m.m11;
    if (!(m.det > 1e-12 * scale))
        throw SingularMassMatrixError(
            "mass matrix is singular or indefinite at q2=" + std::to_string(q2) +
            " (det=" + std::to_string(m.det) + ")");
    return m;
}

void check_state_dim(const Vec& x) {
    if (x.size() != 4)
        throw DimensionError("manipulator state must have 4 entries, got " +
                             std::to_string(x.size()));
}

void drift_impl(const ManipulatorParams& p, const Vec& x, Vec& f) {
    check_state_dim(x);
    f.resize(4);
    const double qd1 = x[2], qd2 = x[3];
    const double s2 = std::sin(x[1]);
    const Mass2 m = mass_terms(p, x[1]);
    // -C(q, qd) qd - F qd
    const double v1 = p.p3 * s2 * (qd2 * qd1 + (qd1 + qd2) * qd2) - p.fd1 * qd1;
    const double v2 = -p.p3 * s2 * qd1 * qd1 - p.fd2 * qd2;
    f[0] = qd1;
    f[1] = qd2;
    f[2] = (m.m11 * v1 - m.m01 * v2) / m.det;
    f[3] = (-m.m01 * v1 + m.m00 * v2) / m.det;
}

void input_impl(const ManipulatorParams& p, const Vec& x, Mat& g) {
    check_state_dim(x);
    if (g.rows() != 4 || g.cols() != 2) g = Mat(4, 2);
    const Mass2 m = mass_terms(p, x[1]);
    g(0, 0) = g(0, 1) = g(1, 0) = g(1, 1) = 0.0;
    g(2, 0) = m.m11 / m.det;
    g(2, 1) = -m.m01 / m.det;
    g(3, 0) = -m.m01 / m.det;
    g(3, 1) = m.m00 / m.det;
}

}  // namespace

void validate(const ManipulatorParams& p) {
    if (!(p.p1 > 0.0) || !(p.p2 > 0.0))
        throw ConfigError("manipulator inertia terms p1, p2 must be positive");
    if (p.fd1 < 0.0 || p.fd2 < 0.0)
        throw ConfigError("manipulator friction coefficients must be nonnegative");
    // Worst case is |cos q2| = 1 but sweep anyway so the error names an angle.
    for (int i = 0; i <= 360; ++i) {
        const double q2 = -M_PI + i * (2.0 * M_PI / 360.0);
        try {
            mass_terms(p, q2);
        } catch (const SingularMassMatrixError& e) {
            throw ConfigError(std::string("invalid manipulator parameters: ") + e.what());
        }
    }
}

Mat mass_matrix(const ManipulatorParams& p, const Vec& q) {
    if (q.size() != 2) throw DimensionError("mass_matrix expects q of size 2");
    const double c2 = std::cos(q[1]);
    Mat m(2, 2);
    m(0, 0) = p.p1 + 2.0 * p.p3 * c2;
    m(0, 1) = m(1, 0) = p.p2 + p.p3 * c2;
    m(1, 1) = p.p2;
    return m;
}

Mat coriolis_matrix(const ManipulatorParams& p, const Vec& q, const Vec& qdot) {
    if (q.size() != 2 || qdot.size() != 2)
        throw DimensionError("coriolis_matrix expects q, qdot of size 2");
    const double s2 = std::sin(q[1]);
    Mat c(2, 2);
    c(0, 0) = -p.p3 * s2 * qdot[1];
    c(0, 1) = -p.p3 * s2 * (qdot[0] + qdot[1]);
    c(1, 0) = p.p3 * s2 * qdot[0];
    c(1, 1) = 0.0;
    return c;
}

Vec manipulator_drift(const ManipulatorParams& p, const Vec& x) {
    Vec f;
    drift_impl(p, x, f);
    return f;
}

Mat manipulator_input(const ManipulatorParams& p, const Vec& x) {
    Mat g;
    input_impl(p, x, g);
    return g;
}

SystemModel two_link_model(const ManipulatorParams& params) {
    validate(params);
    SystemModel model;
    model.n = 4;
    model.m = 2;
    model.drift_into = [params](const Vec& x, Vec& f) { drift_impl(params, x, f); };
    model.input_map_into = [params](const Vec& x, Mat& g) { input_impl(params, x, g); };
    return model;
}

}  // namespace safeaci

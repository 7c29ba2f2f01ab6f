#include <doctest.h>

#include <cmath>

#include "safeaci/errors.hpp"
#include "safeaci/harness.hpp"
#include "safeaci/identifier.hpp"

using namespace safeaci;

namespace {

// n = 1, l = 1 identifier with chosen weights.
IdentifierState scalar_id(double wf, double vf) {
    IdentifierState id;
    id.wf = Mat(1, 1);
    id.wf(0, 0) = wf;
    id.vf = Mat(1, 1);
    id.vf(0, 0) = vf;
    id.x_hat = Vec{0.0};
    return id;
}

SystemModel zero_model() {
    SystemModel m;
    m.n = 1;
    m.m = 1;
    m.drift_into = [](const Vec&, Vec& f) { f.assign(1, 0.0); };
    m.input_map_into = [](const Vec&, Mat& g) {
        if (g.rows() != 1 || g.cols() != 1) g = Mat(1, 1);
        g(0, 0) = 0.0;
    };
    return m;
}

}  // namespace

TEST_CASE("logistic nonlinearity") {
    Vec s = sigma(Vec{0.0, 100.0, -100.0});
    CHECK(s[0] == 0.5);
    CHECK(s[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s[2] == doctest::Approx(0.0).epsilon(1e-12));
    Vec sl = sigma_slope(Vec{0.0});
    CHECK(sl[0] == 0.25);
}

TEST_CASE("sigma slope matches central differences") {
    Rng rng(13);
    const double h = 1e-5;
    for (int trial = 0; trial < 1000; ++trial) {
        const double z = rng.uniform(-3, 3);
        const double fd = (sigma(Vec{z + h})[0] - sigma(Vec{z - h})[0]) / (2 * h);
        CHECK(sigma_slope(Vec{z})[0] == doctest::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("estimated drift is Wf^T sigma(Vf^T x)") {
    IdentifierState id;
    id.wf = Mat(2, 2);  // l = 2, n = 2
    id.wf(0, 0) = 1.0; id.wf(0, 1) = 2.0;
    id.wf(1, 0) = 3.0; id.wf(1, 1) = 4.0;
    id.vf = Mat(2, 2);
    id.vf(0, 0) = 0.5; id.vf(0, 1) = 0.0;
    id.vf(1, 0) = 0.0; id.vf(1, 1) = -0.5;
    id.x_hat = Vec{0.0, 0.0};
    Vec x{1.0, 2.0};
    // z = Vf^T x = (0.5, -1), sigma(z) elementwise, f = Wf^T sigma
    const double s0 = 1.0 / (1.0 + std::exp(-0.5));
    const double s1 = 1.0 / (1.0 + std::exp(1.0));
    Vec f = estimated_drift(id, x);
    CHECK(f[0] == doctest::Approx(1.0 * s0 + 3.0 * s1).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(2.0 * s0 + 4.0 * s1).epsilon(1e-14));
}

TEST_CASE("weight rate oracle") {
    // x = 1, x_tilde = 0.5, Wf = 2, Vf = 0, rates 10:
    // Wf_dot = 10 sigma(0) 0.5 = 2.5; Vf_dot = 10 * 1 * (2*0.5) * 0.25 = 2.5
    IdentifierState id = scalar_id(2.0, 0.0);
    IdentifierRates r = weight_rates(id, Vec{1.0}, Vec{0.5});
    CHECK(r.wf_rate(0, 0) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(r.vf_rate(0, 0) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("weight rates follow the measured state through the regressor") {
    IdentifierState id = scalar_id(1.0, 0.8);
    Vec x{1.5};
    Vec xt{0.3};
    IdentifierRates r = weight_rates(id, x, xt);
    // Wf_dot = gamma_wf sigma(vf x) xt
    const double sig = 1.0 / (1.0 + std::exp(-0.8 * 1.5));
    CHECK(r.wf_rate(0, 0) ==
          doctest::Approx(id.gamma_wf * sig * 0.3).epsilon(1e-14));
    // Vf_dot = gamma_vf x (Wf xt) sigma'(vf x)
    const double slope = sig * (1.0 - sig);
    CHECK(r.vf_rate(0, 0) ==
          doctest::Approx(id.gamma_vf * 1.5 * (1.0 * 0.3) * slope).epsilon(1e-14));
}

TEST_CASE("weight rates saturate at the projection shell") {
    IdentifierState id = scalar_id(0.0, 0.0);
    id.wf_bar = 2.0;
    id.wf(0, 0) = proj_shell(id.wf_bar, id.proj_eps);  // on the shell, outward
    IdentifierRates r = weight_rates(id, Vec{1.0}, Vec{1.0});
    // raw rate points along +Wf; the radial component must be gone
    CHECK(fro_dot(r.wf_rate, id.wf) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("observer error contracts at the observer gain") {
    // Static plant, zero identifier: x_hat_dot = k (x - x_hat) gives
    // x_tilde(t) = x_tilde(0) exp(-k t).
    IdentifierState id = scalar_id(0.0, 0.0);
    id.k = 10.0;
    SystemModel model = zero_model();
    const Vec x{1.0};
    Vec y{0.0};  // x_hat
    const double dt = 1e-3;
    auto rate = [&](double, const Vec& yh, Vec& dy) {
        IdentifierState cur = id;
        cur.x_hat = yh;
        dy = estimator_rate(cur, model, x, Vec{0.0});
    };
    double t = 0.0;
    for (int k = 0; k < 1000; ++k) {
        y = rk4_step(rate, y, t, dt);
        t += dt;
    }
    const double xt = 1.0 - y[0];
    CHECK(xt == doctest::Approx(std::exp(-10.0 * 1.0)).epsilon(1e-9));
}

TEST_CASE("estimator rate includes the applied input term") {
    IdentifierState id = scalar_id(0.0, 0.0);
    SystemModel m;
    m.n = 1;
    m.m = 1;
    m.drift_into = [](const Vec&, Vec& f) { f.assign(1, 0.0); };
    m.input_map_into = [](const Vec&, Mat& g) {
        if (g.rows() != 1 || g.cols() != 1) g = Mat(1, 1);
        g(0, 0) = 2.0;
    };
    id.x_hat = Vec{1.0};
    // f_hat = 0, g u = 2*3, k (x - x_hat) = 10 (1 - 1) = 0
    Vec r = estimator_rate(id, m, Vec{1.0}, Vec{3.0});
    CHECK(r[0] == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("shape mismatches throw") {
    IdentifierState id = scalar_id(1.0, 1.0);
    CHECK_THROWS_AS(weight_rates(id, Vec{1.0, 2.0}, Vec{0.5, 0.5}),
                    DimensionError);
    CHECK_THROWS_AS(estimated_drift(id, Vec{1.0, 2.0}), DimensionError);
}

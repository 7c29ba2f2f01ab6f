#ifndef SAFEACI_IDENTIFIER_HPP
#define SAFEACI_IDENTIFIER_HPP

#include "safeaci/dynamics.hpp"
#include "safeaci/linalg.hpp"

// Online drift identifier: a single-hidden-layer network f_hat(x) =
// Wf^T sigma(Vf^T x) trained from the state-estimation error of a
// high-gain observer. The regressor is always evaluated at the measured
// state, so the input-map term cancels exactly from the error dynamics as
// long as the observer sees the control that was actually applied.

namespace safeaci {

struct IdentifierState {
    Mat wf;     // output-layer weights, l x n
    Mat vf;     // input-layer weights, n x l
    Vec x_hat;  // observer state, n
    double k = 10.0;         // observer gain
    double gamma_wf = 10.0;  // learning rates (isotropic)
    double gamma_vf = 10.0;
    double wf_bar = 10.0;    // Frobenius projection radii
    double vf_bar = 10.0;
    double proj_eps = 0.1;
};

// Elementwise logistic nonlinearity and its slope.
Vec sigma(const Vec& z);
Vec sigma_slope(const Vec& z);  // diagonal of the Jacobian, sigma'(z_i)

// f_hat(x) = Wf^T sigma(Vf^T x)
Vec estimated_drift(const IdentifierState& id, const Vec& x);

// x_hat_dot = f_hat(x) + g(x) u + k (x - x_hat); u must be the applied
// control, probing signal included.
Vec estimator_rate(const IdentifierState& id, const SystemModel& model,
                   const Vec& x, const Vec& u);

struct IdentifierRates {
    Mat wf_rate;  // l x n
    Mat vf_rate;  // n x l
};

// Projected gradient adaptation driven by x_tilde = x - x_hat:
//   Wf_dot = proj(gamma_wf sigma(Vf^T x) x_tilde^T)
//   Vf_dot = proj(gamma_vf x x_tilde^T Wf^T diag(sigma'(Vf^T x)))
IdentifierRates weight_rates(const IdentifierState& id, const Vec& x,
                             const Vec& x_tilde);

}  // namespace safeaci

#endif

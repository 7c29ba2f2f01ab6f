#ifndef SAFEACI_LEARNER_HPP
#define SAFEACI_LEARNER_HPP

#include "safeaci/barrier.hpp"
#include "safeaci/linalg.hpp"
#include "safeaci/value.hpp"

// Continuous-time critic / actor adaptation laws. These functions return
// time derivatives; integration, projection-ball monitoring and covariance
// health checks live in the harness.

namespace safeaci {

struct CriticState {
    Vec wc;      // critic weights, p
    Mat gamma;   // least-squares covariance, p x p, symmetric positive definite
    double eta_c = 2.0;   // critic gain
    double nu = 5.0;      // normalization gain
    double beta = 0.001;  // covariance forgetting factor
};

struct ActorState {
    Vec wa;  // actor weights, p
    double eta_a1 = 1.0;
    double eta_a2 = 50.0;
    double w_bar = 0.0;     // projection ball radius; must be set positive
    double proj_eps = 0.1;  // smooth-projection shell width
};

// Normalized gradient step driving the residual toward zero:
//   wc_dot = -eta_c * Gamma omega delta / (1 + nu omega^T Gamma omega)
Vec critic_rate(const CriticState& cs, const Vec& omega, double delta);

// Gamma_dot = beta Gamma - eta_c Gamma omega omega^T Gamma / (1 + nu omega^T Gamma omega)
Mat covariance_rate(const CriticState& cs, const Vec& omega);

// psi = omega / sqrt(1 + nu omega^T Gamma omega); satisfies
// |psi| <= 1 / sqrt(nu lambda_min(Gamma)).
Vec regressor_psi(const CriticState& cs, const Vec& omega);

// Smooth projection keeping |theta| <= w_bar sqrt(1 + eps) under the flow
// theta_dot = proj(theta, raw). Inside the ball, or whenever raw points
// inward, the raw rate passes through untouched; in the shell the radial
// component is faded out.
Vec proj(const Vec& theta, const Vec& raw, double w_bar, double eps);
void proj_inplace(const Vec& theta, Vec& rate, double w_bar, double eps);

// Same operator with the Frobenius norm, for matrix-valued estimates.
Mat proj_frobenius(const Mat& theta, const Mat& raw, double bar, double eps);
void proj_frobenius_inplace(const Mat& theta, Mat& rate, double bar, double eps);

// Radius actually enforced by proj: w_bar * sqrt(1 + eps).
double proj_shell(double w_bar, double eps);

// Projected actor update. The first two terms chase the critic; the last
// one pre-compensates the barrier component of the control law. barrier may
// be null iff lambda == 0.
Vec actor_rate(const ActorState& as, const CriticState& cs,
               const ControlKernels& kernels, const Mat& phi_jac,
               const BarrierFunction* b, const Vec& x, const Vec& omega,
               double delta, double lambda);

}  // namespace safeaci

#endif

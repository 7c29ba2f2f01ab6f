#include "safeaci/learner.hpp"

#include <cmath>
#include <string>

#include "safeaci/errors.hpp"

namespace safeaci {

namespace {

void check_sizes(const CriticState& cs, const Vec& omega) {
    const std::size_t p = cs.wc.size();
    if (omega.size() != p || cs.gamma.rows() != p || cs.gamma.cols() != p)
        throw DimensionError("learner: critic state / regressor size mismatch");
}

}  // namespace

Vec critic_rate(const CriticState& cs, const Vec& omega, double delta) {
    check_sizes(cs, omega);
    Vec gw = matvec(cs.gamma, omega);
    const double denom = 1.0 + cs.nu * dot(omega, gw);
    scale(-cs.eta_c * delta / denom, gw);
    return gw;
}

Mat covariance_rate(const CriticState& cs, const Vec& omega) {
    check_sizes(cs, omega);
    Vec gw = matvec(cs.gamma, omega);
    const double denom = 1.0 + cs.nu * dot(omega, gw);
    Mat rate = cs.gamma;
    mat_scale(cs.beta, rate);
    // Gamma omega omega^T Gamma = (Gamma omega)(Gamma omega)^T by symmetry.
    ger(-cs.eta_c / denom, gw, gw, rate);
    return rate;
}

Vec regressor_psi(const CriticState& cs, const Vec& omega) {
    check_sizes(cs, omega);
    const double denom = 1.0 + cs.nu * dot(omega, matvec(cs.gamma, omega));
    return scaled(omega, 1.0 / std::sqrt(denom));
}

double proj_shell(double w_bar, double eps) { return w_bar * std::sqrt(1.0 + eps); }

void proj_inplace(const Vec& theta, Vec& rate, double w_bar, double eps) {
    if (theta.size() != rate.size())
        throw DimensionError("proj: theta / rate size mismatch");
    if (!(w_bar > 0.0) || !(eps > 0.0))
        throw ConfigError("proj needs positive ball radius and shell width");
    const double nsq = dot(theta, theta);
    const double h = (nsq - w_bar * w_bar) / (eps * w_bar * w_bar);
    if (h <= 0.0) return;
    const double along = dot(theta, rate);
    if (along <= 0.0) return;
    axpy(-std::min(1.0, h) * along / nsq, theta, rate);
}

Vec proj(const Vec& theta, const Vec& raw, double w_bar, double eps) {
    Vec out = raw;
    proj_inplace(theta, out, w_bar, eps);
    return out;
}

void proj_frobenius_inplace(const Mat& theta, Mat& rate, double bar, double eps) {
    if (!theta.same_shape(rate))
        throw DimensionError("proj_frobenius: theta / rate shape mismatch");
    if (!(bar > 0.0) || !(eps > 0.0))
        throw ConfigError("proj_frobenius needs positive ball radius and shell width");
    const double nsq = fro_dot(theta, theta);
    const double h = (nsq - bar * bar) / (eps * bar * bar);
    if (h <= 0.0) return;
    const double along = fro_dot(theta, rate);
    if (along <= 0.0) return;
    mat_axpy(-std::min(1.0, h) * along / nsq, theta, rate);
}

Mat proj_frobenius(const Mat& theta, const Mat& raw, double bar, double eps) {
    Mat out = raw;
    proj_frobenius_inplace(theta, out, bar, eps);
    return out;
}

Vec actor_rate(const ActorState& as, const CriticState& cs,
               const ControlKernels& kernels, const Mat& phi_jac,
               const BarrierFunction* b, const Vec& x, const Vec& omega,
               double delta, double lambda) {
    const std::size_t p = as.wa.size();
    if (cs.wc.size() != p || omega.size() != p || kernels.rs.rows() != p ||
        kernels.rs.cols() != p || phi_jac.rows() != p)
        throw DimensionError("actor_rate: weight / kernel size mismatch");

    Vec diff = sub(as.wa, cs.wc);
    Vec raw = matvec(kernels.rs, diff);
    scale(-as.eta_a1 * delta / std::sqrt(1.0 + dot(omega, omega)), raw);
    axpy(-as.eta_a2, diff, raw);
    if (lambda != 0.0) {
        if (!b)
            throw ConfigError("actor_rate: barrier required when lambda != 0");
        axpy(-0.5 * lambda, matvec(phi_jac, matvec(kernels.rg, b->gradient(x))),
             raw);
    }
    return proj(as.wa, raw, as.w_bar, as.proj_eps);
}

}  // namespace safeaci

#include "safeaci/value.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "safeaci/errors.hpp"
#include "safeaci/kern.hpp"

namespace safeaci {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_dim(std::size_t got, std::size_t want, const char* what) {
    if (got != want)
        throw DimensionError(std::string(what) + ": expected " +
                             std::to_string(want) + " entries, got " +
                             std::to_string(got));
}

}  // namespace

CostConfig CostConfig::quadratic(int m) {
    CostConfig c;
    c.state_cost = [](const Vec& x) { return dot(x, x); };
    c.r = Mat::identity(static_cast<std::size_t>(m));
    c.r_inv = c.r;
    return c;
}

CostConfig CostConfig::make(std::function<double(const Vec&)> q, Mat r) {
    if (r.rows() != r.cols() || r.rows() == 0)
        throw ConfigError("input weight R must be square and nonempty");
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = i + 1; j < r.cols(); ++j)
            if (std::abs(r(i, j) - r(j, i)) > 1e-12 * (1.0 + std::abs(r(i, j))))
                throw ConfigError("input weight R must be symmetric");
    CostConfig c;
    c.state_cost = std::move(q);
    try {
        c.r_inv = spd_inverse(r);
    } catch (const NumericError&) {
        throw ConfigError("input weight R must be positive definite");
    }
    c.r = std::move(r);
    return c;
}

SigmoidBasis::SigmoidBasis(int n, int p, double scale, Rng& rng) {
    if (n <= 0 || p <= 0)
        throw ConfigError("sigmoid basis needs positive dimensions");
    if (!(scale > 0.0))
        throw ConfigError("sigmoid basis needs a positive weight scale");
    w_ = Mat(static_cast<std::size_t>(p), static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < w_.size(); ++i)
        w_.data()[i] = rng.uniform(-scale, scale);
}

void SigmoidBasis::eval_into(const Vec& x, Vec& phi) const {
    check_dim(x.size(), w_.cols(), "sigmoid basis eval");
    phi.resize(w_.rows());
    kern::matvec(w_.data(), w_.rows(), w_.cols(), x.data(), phi.data());
    for (double& v : phi) v = sigmoid(v) - 0.5;
}

void SigmoidBasis::jacobian_into(const Vec& x, Mat& jac) const {
    check_dim(x.size(), w_.cols(), "sigmoid basis jacobian");
    if (jac.rows() != w_.rows() || jac.cols() != w_.cols())
        jac = Mat(w_.rows(), w_.cols());
    // row i: sigma'(w_i . x) * w_i
    for (std::size_t i = 0; i < w_.rows(); ++i) {
        const double* wi = w_.data() + i * w_.cols();
        const double s = sigmoid(kern::dot(wi, x.data(), x.size()));
        const double ds = s * (1.0 - s);
        double* ji = jac.data() + i * jac.cols();
        for (std::size_t j = 0; j < w_.cols(); ++j) ji[j] = ds * wi[j];
    }
}

double instantaneous_cost(const CostConfig& cost, const Vec& x, const Vec& u) {
    check_dim(u.size(), cost.r.rows(), "instantaneous_cost input");
    return cost.state_cost(x) + dot(u, matvec(cost.r, u));
}

double hamiltonian(const CostConfig& cost, const SystemModel& model, const Vec& x,
                   const Vec& u, const Vec& grad_v) {
    Vec xdot = model.drift(x);
    axpy(1.0, matvec(model.input_map(x), u), xdot);
    return instantaneous_cost(cost, x, u) + dot(grad_v, xdot);
}

Vec unconstrained_optimal_control(const CostConfig& cost, const SystemModel& model,
                                  const Vec& x, const Vec& grad_v) {
    check_dim(grad_v.size(), static_cast<std::size_t>(model.n),
              "unconstrained_optimal_control gradient");
    Vec u = matvec(cost.r_inv, tmatvec(model.input_map(x), grad_v));
    scale(-0.5, u);
    return u;
}

Vec safe_optimal_control(const CostConfig& cost, const SystemModel& model,
                         const BarrierFunction& b, const Vec& x, const Vec& grad_v,
                         double lambda) {
    Vec v = grad_v;
    if (lambda != 0.0) axpy(lambda, b.gradient(x), v);
    return unconstrained_optimal_control(cost, model, x, v);
}

Vec estimated_safe_control(const CostConfig& cost, const SystemModel& model,
                           const BarrierFunction& b, const Basis& basis,
                           const Vec& wa, const Vec& x, double lambda) {
    check_dim(wa.size(), static_cast<std::size_t>(basis.features()),
              "estimated_safe_control actor weights");
    Vec v = tmatvec(basis.jacobian(x), wa);
    if (lambda != 0.0) axpy(lambda, b.gradient(x), v);
    return unconstrained_optimal_control(cost, model, x, v);
}

ControlKernels control_kernels(const CostConfig& cost, const SystemModel& model,
                               const Basis& basis, const Vec& x) {
    const Mat gx = model.input_map(x);
    ControlKernels k;
    k.rg = matmul(matmul(gx, cost.r_inv), transpose(gx));
    symmetrize(k.rg);
    const Mat jac = basis.jacobian(x);
    k.rs = matmul(matmul(jac, k.rg), transpose(jac));
    symmetrize(k.rs);
    return k;
}

BellmanResidual bellman_residual(const CostConfig& cost, const Vec& f_hat,
                                 const Mat& gx, const Mat& phi_jac, const Vec& wc,
                                 const Vec& x, const Vec& u) {
    check_dim(f_hat.size(), gx.rows(), "bellman_residual drift estimate");
    check_dim(wc.size(), phi_jac.rows(), "bellman_residual critic weights");
    Vec xdot_hat = f_hat;
    axpy(1.0, matvec(gx, u), xdot_hat);
    BellmanResidual out;
    out.omega = matvec(phi_jac, xdot_hat);
    out.delta = dot(wc, out.omega) + instantaneous_cost(cost, x, u);
    return out;
}

}  // namespace safeaci

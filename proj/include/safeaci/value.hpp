#ifndef SAFEACI_VALUE_HPP
#define SAFEACI_VALUE_HPP

#include <functional>

#include "safeaci/barrier.hpp"
#include "safeaci/dynamics.hpp"
#include "safeaci/linalg.hpp"
#include "safeaci/rng.hpp"

// Value-function machinery: running cost, Hamiltonian, the control laws
// derived from a value gradient, and the feature basis used to approximate
// the value function online. The safe control laws fold lambda * grad B
// into the value gradient, which is what keeps the closed loop inside the
// safe set while the critic is still learning.

namespace safeaci {

struct CostConfig {
    std::function<double(const Vec&)> state_cost;  // Q(x), positive definite
    Mat r;       // input weight, symmetric positive definite
    Mat r_inv;

    // Q(x) = x^T x, R = I_m.
    static CostConfig quadratic(int m);
    // Validates R and precomputes its inverse.
    static CostConfig make(std::function<double(const Vec&)> q, Mat r);
};

class Basis {
  public:
    virtual ~Basis() = default;

    virtual int features() const = 0;  // p
    virtual int dim() const = 0;       // n

    // phi(x), with phi(0) = 0 so the approximated value vanishes at the
    // origin.
    virtual void eval_into(const Vec& x, Vec& phi) const = 0;
    // Jacobian, p x n.
    virtual void jacobian_into(const Vec& x, Mat& jac) const = 0;

    Vec eval(const Vec& x) const {
        Vec phi;
        eval_into(x, phi);
        return phi;
    }
    Mat jacobian(const Vec& x) const {
        Mat jac;
        jacobian_into(x, jac);
        return jac;
    }
};

// phi_i(x) = sigmoid(w_i . x) - 1/2 with fixed random directions w_i drawn
// uniformly from [-scale, scale]^n.
class SigmoidBasis final : public Basis {
  public:
    SigmoidBasis(int n, int p, double scale, Rng& rng);

    const Mat& inner_weights() const { return w_; }  // p x n

    int features() const override { return static_cast<int>(w_.rows()); }
    int dim() const override { return static_cast<int>(w_.cols()); }
    void eval_into(const Vec& x, Vec& phi) const override;
    void jacobian_into(const Vec& x, Mat& jac) const override;

  private:
    Mat w_;
};

// r(x, u) = Q(x) + u^T R u
double instantaneous_cost(const CostConfig& cost, const Vec& x, const Vec& u);

// H(x, u, grad_v) = r(x, u) + grad_v . (f(x) + g(x) u)
double hamiltonian(const CostConfig& cost, const SystemModel& model, const Vec& x,
                   const Vec& u, const Vec& grad_v);

// u = -1/2 R^-1 g(x)^T grad_v
Vec unconstrained_optimal_control(const CostConfig& cost, const SystemModel& model,
                                  const Vec& x, const Vec& grad_v);

// u = -1/2 R^-1 g(x)^T (grad_v + lambda grad B(x)); the closed form of the
// constrained stationarity condition with multiplier lambda.
Vec safe_optimal_control(const CostConfig& cost, const SystemModel& model,
                         const BarrierFunction& b, const Vec& x, const Vec& grad_v,
                         double lambda);

// Same law with grad_v replaced by the actor estimate grad(phi)^T wa.
// lambda = 0 removes the barrier term entirely (the barrier is then never
// evaluated, so states outside the safe set are representable).
Vec estimated_safe_control(const CostConfig& cost, const SystemModel& model,
                           const BarrierFunction& b, const Basis& basis,
                           const Vec& wa, const Vec& x, double lambda);

struct ControlKernels {
    Mat rg;  // g R^-1 g^T, n x n
    Mat rs;  // grad(phi) rg grad(phi)^T, p x p
};

ControlKernels control_kernels(const CostConfig& cost, const SystemModel& model,
                               const Basis& basis, const Vec& x);

struct BellmanResidual {
    double delta = 0.0;  // wc . omega + r(x, u)
    Vec omega;           // grad(phi) (f_hat + g u)
};

// Residual of the stationary optimality identity under the current critic
// weights, evaluated with the supplied drift estimate.
BellmanResidual bellman_residual(const CostConfig& cost, const Vec& f_hat,
                                 const Mat& gx, const Mat& phi_jac, const Vec& wc,
                                 const Vec& x, const Vec& u);

}  // namespace safeaci

#endif

#ifndef SAFEACI_HARNESS_HPP
#define SAFEACI_HARNESS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "safeaci/barrier.hpp"
#include "safeaci/dynamics.hpp"
#include "safeaci/identifier.hpp"
#include "safeaci/learner.hpp"
#include "safeaci/value.hpp"

// Closed-loop episode machinery: plant, observer, critic covariance, critic,
// actor and identifier weights integrated together as one augmented ODE with
// classical RK4, plus the safety/boundedness monitors and the sampled decay
// bound used to certify forward invariance before and after a run.

namespace safeaci {

enum class ControllerMode { safe, baseline_aci };

struct ExcitationConfig {
    bool enabled = false;
    double amplitude = 0.5;
    Vec frequencies{1.0, 3.3, 7.7};  // rad/s
};

// Additive probing signal, one sinusoid sum per input channel with fixed
// channel-dependent phases. Deterministic in t. Disabled -> zero vector.
Vec excitation(const ExcitationConfig& exc, int m, double t);

// Actor projection radius: explicit when positive, else 3 sqrt(p) for a
// p-feature basis (the feature map is bounded by sqrt(p)/2 elementwise).
inline double resolve_actor_radius(double w_bar, int p) {
    return w_bar > 0.0 ? w_bar : 3.0 * std::sqrt(static_cast<double>(p));
}

// Everything that defines the controller and plant but survives across
// episodes. Per-episode state (weights, covariance, observer) is drawn
// inside run_episode from the episode seed.
struct ClosedLoop {
    SystemModel model;
    std::shared_ptr<const BarrierFunction> barrier;
    CostConfig cost;
    // Called once per episode with the episode RNG (which it may ignore);
    // the sigmoid basis consumes its inner weights from this stream first.
    std::function<std::shared_ptr<const Basis>(Rng&)> basis_factory;

    double lambda = 100.0;  // barrier weight in the control/actor laws

    // critic / actor gains
    double eta_c = 2.0;
    double eta_a1 = 1.0;
    double eta_a2 = 50.0;
    double nu = 5.0;
    double beta = 0.001;
    double w_bar = 0.0;  // actor projection radius; 0 resolves to 3 sqrt(p)
    double proj_eps = 0.1;
    double gamma_max = 0.0;  // covariance reset threshold; 0 = never reset

    // identifier
    int ident_l = 5;
    double ident_k = 10.0;
    double ident_gamma_wf = 10.0;
    double ident_gamma_vf = 10.0;
    double ident_wf_bar = 10.0;
    double ident_vf_bar = 10.0;
    double ident_proj_eps = 0.1;

    // Use the true drift instead of the identifier estimate in the Bellman
    // residual (for oracle experiments).
    bool perfect_model = false;

    ExcitationConfig excitation;
};

struct EpisodeConfig {
    double dt = 1e-3;
    double horizon = 60.0;  // seconds; rounded to a whole number of steps
    std::uint64_t seed = 0;
    Vec x0{2.0, -2.0, 0.0, 0.0};
    ControllerMode mode = ControllerMode::safe;
    double weight_init_lo = -1.0;  // uniform init range for Wc, Wa, Wf, Vf
    double weight_init_hi = 1.0;
    double gamma0 = 1.0;  // Gamma(0) = gamma0 * I
    int decimate = 1;     // log every decimate-th step
    // Baseline mode: stop at the first exit from the safe set (true) or keep
    // integrating unconstrained (false). Safe mode always stops.
    bool stop_on_violation = true;
    bool sample_hold = false;  // hold u over each step instead of per stage
    double pe_window = 5.0;    // seconds per excitation-level window; 0 = off
    double norm_ceiling = 1e6;  // boundedness proxy threshold for sup norms
};

struct TrajectoryRecord {
    double t = 0.0;
    Vec x;
    Vec x_hat;
    Vec u;  // actor control, probing excluded
    double delta_hjb = 0.0;
    double bf = 0.0;  // +inf when outside the safe set
    double xtilde_norm = 0.0;
    double wc_norm = 0.0;
    double wa_norm = 0.0;
    double gamma_min = 0.0;
    double gamma_max = 0.0;
    bool safe = true;
};

enum class EpisodeStatus { completed, violated };

struct EpisodeSummary {
    EpisodeStatus status = EpisodeStatus::completed;
    double first_violation_t = 0.0;  // +inf when no violation
    long steps = 0;                  // integration steps actually taken
    double max_bf = 0.0;             // max barrier value while inside C
    double max_ratio = 0.0;          // max_i max_t |x_i| / a_i
    double sup_x = 0.0;
    double sup_wc = 0.0;
    double sup_wa = 0.0;
    double sup_xtilde = 0.0;
    double sup_wf = 0.0;  // Frobenius
    double sup_vf = 0.0;
    bool gamma_pd_every_step = false;
    bool proj_ball_ok = false;
    bool within_ceiling = false;
    double pe_min_eig = 0.0;  // min over windows of lambda_min(int psi psi^T dt)
    int gamma_resets = 0;
    bool gamma_warned = false;  // lambda_max(Gamma) drifted above 1e6, no cap set
    double w_bar = 0.0;         // resolved actor radius used by the run
};

struct TrajectoryLog {
    std::vector<TrajectoryRecord> records;
    // Per-step |x - x_hat|, including t=0; finer than the decimated records.
    Vec xtilde_steps;
    EpisodeSummary summary;
};

// Stacked state of the augmented closed-loop ODE.
struct AugmentedState {
    Vec x;      // plant state, n
    Vec x_hat;  // observer state, n
    Vec wc;     // critic weights, p
    Vec wa;     // actor weights, p
    Mat gamma;  // critic covariance, p x p
    Mat wf;     // identifier output weights, l x n
    Mat vf;     // identifier input weights, n x l
};

struct AugmentedRateInfo {
    Vec u;          // actor control
    Vec u_applied;  // actor control plus probing signal
    Vec omega;      // critic regressor
    double delta = 0.0;
    double denom = 0.0;  // 1 + nu omega^T Gamma omega
};

// One evaluation of the full closed-loop vector field: plant, observer,
// critic, covariance, actor and identifier rates share a single control
// evaluation. lambda is the effective barrier weight (0 for baseline mode).
// Throws OutsideSafeSetError when lambda != 0 and x is not strictly inside
// the safe set.
AugmentedState augmented_rate(const ClosedLoop& loop, const Basis& basis,
                              double w_bar, double lambda, double t,
                              const AugmentedState& y,
                              AugmentedRateInfo* info = nullptr);

// Classical RK4. k1..k4 and tmp are caller-owned scratch shaped like y.
// state_axpy(y, c, k) must implement y += c k for the state type.
inline void state_axpy(Vec& y, double c, const Vec& k) { axpy(c, k, y); }

inline void state_axpy(AugmentedState& y, double c, const AugmentedState& k) {
    axpy(c, k.x, y.x);
    axpy(c, k.x_hat, y.x_hat);
    axpy(c, k.wc, y.wc);
    axpy(c, k.wa, y.wa);
    mat_axpy(c, k.gamma, y.gamma);
    mat_axpy(c, k.wf, y.wf);
    mat_axpy(c, k.vf, y.vf);
}

template <class State, class RateFn>
void rk4_step(RateFn&& rate, double t, double dt, State& y, State& k1, State& k2,
              State& k3, State& k4, State& tmp) {
    rate(t, y, k1);
    tmp = y;
    state_axpy(tmp, 0.5 * dt, k1);
    rate(t + 0.5 * dt, tmp, k2);
    tmp = y;
    state_axpy(tmp, 0.5 * dt, k2);
    rate(t + 0.5 * dt, tmp, k3);
    tmp = y;
    state_axpy(tmp, dt, k3);
    rate(t + dt, tmp, k4);
    state_axpy(y, dt / 6.0, k1);
    state_axpy(y, dt / 3.0, k2);
    state_axpy(y, dt / 3.0, k3);
    state_axpy(y, dt / 6.0, k4);
}

// Convenience single-step form for plain vector ODEs.
Vec rk4_step(const std::function<void(double, const Vec&, Vec&)>& rate,
             const Vec& y0, double t, double dt);

// Integrate one episode. Throws ConfigError for invalid configs,
// NonFiniteError / CovarianceError / ProjectionEscapeError on numeric
// failures (with a dump of the last records in the message). A safety
// violation is not an exception: it ends the episode with
// status == violated.
TrajectoryLog run_episode(const EpisodeConfig& cfg, const ClosedLoop& loop);

struct SafetyCertificate {
    double b_bar_d = 0.0;   // sampled decay bound
    double gamma = 0.0;     // barrier construction constant
    double bound = 0.0;     // max(B_f(x0), gamma * b_bar_d)
    double bf_x0 = 0.0;
    double f_bar = 0.0;     // max |f|
    double phi_d_bar = 0.0; // max sigma_max(grad phi)
    double rg_bar = 0.0;    // max lambda_max(g R^-1 g^T)
    double rg_min = 0.0;    // min over samples of the restricted minimum
                            // eigenvalue of g R^-1 g^T (on range(g))
    long samples = 0;
};

// Monte-Carlo estimate of the certificate constants over 0.999-scaled
// samples of the safe set. Throws DegenerateKernelError when the sampled
// restricted minimum eigenvalue falls below 1e-10 (g lost column rank).
SafetyCertificate compute_certificate(const BarrierFunction& b,
                                      const SystemModel& model,
                                      const CostConfig& cost, const Basis& basis,
                                      double w_bar, double lambda, long samples,
                                      const Vec& x0, std::uint64_t seed);

struct BarrierBoundReport {
    double max_bf = 0.0;
    double bound = 0.0;
    bool holds = false;  // max_bf <= bound * 1.01 (slack for sampling error)
};

BarrierBoundReport monitor_barrier_bound(const TrajectoryLog& log,
                                         const SafetyCertificate& cert);

struct ComparisonReport {
    TrajectoryLog safe_log;
    TrajectoryLog baseline_log;
    double safe_first_violation = 0.0;      // +inf when clean
    double baseline_first_violation = 0.0;  // +inf when clean
    double safe_max_ratio = 0.0;
    double baseline_max_ratio = 0.0;
};

// Runs the same seed/x0/dt in safe and baseline mode. Horizons may differ.
ComparisonReport compare_runs(const EpisodeConfig& safe_cfg,
                              const EpisodeConfig& baseline_cfg,
                              const ClosedLoop& loop);

// Schema: t, x1..xn, xhat1..xhatn, u1..um, delta_hjb, Bf, xtilde_norm,
// Wc_norm, Wa_norm, gamma_min, gamma_max, safe. Floats are written with
// %.17g so re-runs are byte-comparable.
void write_trajectory_csv(const TrajectoryLog& log, std::ostream& os);

}  // namespace safeaci

#endif

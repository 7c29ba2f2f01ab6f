#include "safeaci/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>

#include "safeaci/errors.hpp"
#include "safeaci/kern.hpp"

namespace safeaci {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGoldenRatioFrac = 0.6180339887498949;
// lambda_max(Gamma) past this with no cap configured flips a warning flag.
constexpr double kGammaWarnLevel = 1e6;

void excitation_into(const ExcitationConfig& exc, int m, double t, Vec& e) {
    e.assign(static_cast<std::size_t>(m), 0.0);
    if (!exc.enabled || exc.amplitude == 0.0) return;
    for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < exc.frequencies.size(); ++k) {
            // fixed per-channel phases, spread by the golden ratio so
            // channels stay decorrelated
            const double frac =
                std::fmod((j + 1.0) * (k + 1.0) * kGoldenRatioFrac, 1.0);
            s += std::sin(exc.frequencies[k] * t + 2.0 * M_PI * frac);
        }
        e[j] = exc.amplitude * s;
    }
}

// Preallocated scratch for one episode; compute_rates never allocates once
// this is sized.
struct RateCtx {
    const ClosedLoop* loop = nullptr;
    const Basis* basis = nullptr;
    double lambda = 0.0;
    double w_bar = 0.0;
    int n = 0, m = 0, p = 0, l = 0;

    Mat phi_jac;  // p x n
    Mat gx;       // n x m
    Mat tmp_nm;   // n x m
    Mat rg;       // n x n
    Mat tmp_pn;   // p x n
    Mat rs;       // p x p
    Vec grad_b, grad_v, f, f_hat, x_tilde, xdot_pol, tmp_n;
    Vec gtv, u, e, u_applied, ru;
    Vec sigma_z, sig, slope, wde;
    Vec omega, gw, diff, tmp_p;
    double delta = 0.0;
    double denom = 0.0;
};

RateCtx make_ctx(const ClosedLoop& loop, const Basis& basis, double w_bar,
                 double lambda) {
    RateCtx c;
    c.loop = &loop;
    c.basis = &basis;
    c.lambda = lambda;
    c.w_bar = w_bar;
    c.n = loop.model.n;
    c.m = loop.model.m;
    c.p = basis.features();
    c.l = loop.ident_l;
    const auto n = static_cast<std::size_t>(c.n);
    const auto m = static_cast<std::size_t>(c.m);
    const auto p = static_cast<std::size_t>(c.p);
    const auto l = static_cast<std::size_t>(c.l);
    c.phi_jac = Mat(p, n);
    c.gx = Mat(n, m);
    c.tmp_nm = Mat(n, m);
    c.rg = Mat(n, n);
    c.tmp_pn = Mat(p, n);
    c.rs = Mat(p, p);
    c.grad_b.resize(n);
    c.grad_v.resize(n);
    c.f.resize(n);
    c.f_hat.resize(n);
    c.x_tilde.resize(n);
    c.xdot_pol.resize(n);
    c.tmp_n.resize(n);
    c.gtv.resize(m);
    c.u.resize(m);
    c.e.resize(m);
    c.u_applied.resize(m);
    c.ru.resize(m);
    c.sigma_z.resize(l);
    c.sig.resize(l);
    c.slope.resize(l);
    c.wde.resize(l);
    c.omega.resize(p);
    c.gw.resize(p);
    c.diff.resize(p);
    c.tmp_p.resize(p);
    return c;
}

void size_like(AugmentedState& s, const AugmentedState& proto) {
    s.x.resize(proto.x.size());
    s.x_hat.resize(proto.x_hat.size());
    s.wc.resize(proto.wc.size());
    s.wa.resize(proto.wa.size());
    if (!s.gamma.same_shape(proto.gamma))
        s.gamma = Mat(proto.gamma.rows(), proto.gamma.cols());
    if (!s.wf.same_shape(proto.wf)) s.wf = Mat(proto.wf.rows(), proto.wf.cols());
    if (!s.vf.same_shape(proto.vf)) s.vf = Mat(proto.vf.rows(), proto.vf.cols());
}

// The full vector field. With use_held the control block is skipped and the
// values left in the workspace by the first stage are reused (sample-hold
// integration).
void compute_rates(RateCtx& c, double t, const AugmentedState& y,
                   AugmentedState& dy, bool use_held) {
    const ClosedLoop& L = *c.loop;
    size_like(dy, y);

    c.basis->jacobian_into(y.x, c.phi_jac);
    L.model.input_map_into(y.x, c.gx);
    if (c.lambda != 0.0) L.barrier->gradient_into(y.x, c.grad_b);

    if (!use_held) {
        // u = -1/2 R^-1 g^T (grad(phi)^T wa + lambda grad B)
        tmatvec_into(c.phi_jac, y.wa, c.grad_v);
        if (c.lambda != 0.0) axpy(c.lambda, c.grad_b, c.grad_v);
        tmatvec_into(c.gx, c.grad_v, c.gtv);
        matvec_into(L.cost.r_inv, c.gtv, c.u);
        scale(-0.5, c.u);
        excitation_into(L.excitation, c.m, t, c.e);
        c.u_applied = c.u;
        axpy(1.0, c.e, c.u_applied);
    }

    // plant
    L.model.drift_into(y.x, c.f);
    matvec_into(c.gx, c.u_applied, dy.x);
    axpy(1.0, c.f, dy.x);

    // observer + identifier adaptation (regressor at the measured state)
    tmatvec_into(y.vf, y.x, c.sigma_z);
    for (int i = 0; i < c.l; ++i) {
        const double s = 1.0 / (1.0 + std::exp(-c.sigma_z[i]));
        c.sig[i] = s;
        c.slope[i] = s * (1.0 - s);
    }
    tmatvec_into(y.wf, c.sig, c.f_hat);
    c.x_tilde = y.x;
    axpy(-1.0, y.x_hat, c.x_tilde);
    matvec_into(c.gx, c.u_applied, dy.x_hat);
    axpy(1.0, c.f_hat, dy.x_hat);
    axpy(L.ident_k, c.x_tilde, dy.x_hat);

    fill(dy.wf, 0.0);
    ger(L.ident_gamma_wf, c.sig, c.x_tilde, dy.wf);
    proj_frobenius_inplace(y.wf, dy.wf, L.ident_wf_bar, L.ident_proj_eps);
    matvec_into(y.wf, c.x_tilde, c.wde);
    for (int i = 0; i < c.n; ++i)
        for (int j = 0; j < c.l; ++j)
            dy.vf(i, j) = L.ident_gamma_vf * y.x[i] * c.wde[j] * c.slope[j];
    proj_frobenius_inplace(y.vf, dy.vf, L.ident_vf_bar, L.ident_proj_eps);

    // Bellman residual at the actor control (probing excluded)
    const Vec& f_res = L.perfect_model ? c.f : c.f_hat;
    matvec_into(c.gx, c.u, c.xdot_pol);
    axpy(1.0, f_res, c.xdot_pol);
    matvec_into(c.phi_jac, c.xdot_pol, c.omega);
    matvec_into(L.cost.r, c.u, c.ru);
    c.delta = dot(y.wc, c.omega) + L.cost.state_cost(y.x) + dot(c.u, c.ru);

    // critic + covariance
    matvec_into(y.gamma, c.omega, c.gw);
    c.denom = 1.0 + L.nu * dot(c.omega, c.gw);
    dy.wc = c.gw;
    scale(-L.eta_c * c.delta / c.denom, dy.wc);
    dy.gamma = y.gamma;
    mat_scale(L.beta, dy.gamma);
    ger(-L.eta_c / c.denom, c.gw, c.gw, dy.gamma);

    // actor
    c.diff = y.wa;
    axpy(-1.0, y.wc, c.diff);
    matmul_into(c.gx, L.cost.r_inv, c.tmp_nm);
    matmul_nt_into(c.tmp_nm, c.gx, c.rg);
    matmul_into(c.phi_jac, c.rg, c.tmp_pn);
    matmul_nt_into(c.tmp_pn, c.phi_jac, c.rs);
    matvec_into(c.rs, c.diff, dy.wa);
    scale(-L.eta_a1 * c.delta / std::sqrt(1.0 + dot(c.omega, c.omega)), dy.wa);
    axpy(-L.eta_a2, c.diff, dy.wa);
    if (c.lambda != 0.0) {
        matvec_into(c.rg, c.grad_b, c.tmp_n);
        matvec_into(c.phi_jac, c.tmp_n, c.tmp_p);
        axpy(-0.5 * c.lambda, c.tmp_p, dy.wa);
    }
    proj_inplace(y.wa, dy.wa, c.w_bar, L.proj_eps);
}

bool bundle_finite(const AugmentedState& y) {
    return all_finite(y.x) && all_finite(y.x_hat) && all_finite(y.wc) &&
           all_finite(y.wa) && all_finite(y.gamma) && all_finite(y.wf) &&
           all_finite(y.vf);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump_tail(const TrajectoryLog& log, double t) {
    std::ostringstream os;
    os << " at t=" << fmt(t) << "; last records:";
    const std::size_t n = log.records.size();
    for (std::size_t i = n > 10 ? n - 10 : 0; i < n; ++i) {
        const TrajectoryRecord& r = log.records[i];
        os << "\n  t=" << fmt(r.t) << " |x|=" << fmt(norm2(r.x))
           << " |Wc|=" << fmt(r.wc_norm) << " |Wa|=" << fmt(r.wa_norm)
           << " delta=" << fmt(r.delta_hjb);
    }
    return os.str();
}

}  // namespace

Vec excitation(const ExcitationConfig& exc, int m, double t) {
    Vec e;
    excitation_into(exc, m, t, e);
    return e;
}

AugmentedState augmented_rate(const ClosedLoop& loop, const Basis& basis,
                              double w_bar, double lambda, double t,
                              const AugmentedState& y, AugmentedRateInfo* info) {
    if (lambda != 0.0 && !loop.barrier)
        throw ConfigError("augmented_rate: barrier required when lambda != 0");
    RateCtx ctx = make_ctx(loop, basis, w_bar, lambda);
    AugmentedState dy;
    compute_rates(ctx, t, y, dy, false);
    if (info) {
        info->u = ctx.u;
        info->u_applied = ctx.u_applied;
        info->omega = ctx.omega;
        info->delta = ctx.delta;
        info->denom = ctx.denom;
    }
    return dy;
}

Vec rk4_step(const std::function<void(double, const Vec&, Vec&)>& rate,
             const Vec& y0, double t, double dt) {
    Vec y = y0;
    Vec k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
    rk4_step(rate, t, dt, y, k1, k2, k3, k4, tmp);
    return y;
}

TrajectoryLog run_episode(const EpisodeConfig& cfg, const ClosedLoop& loop) {
    // ---- validation ----
    if (!(cfg.dt > 0.0)) throw ConfigError("episode.dt must be positive");
    if (!(cfg.horizon >= 0.0) || (cfg.horizon != 0.0 && cfg.horizon < cfg.dt))
        throw ConfigError("episode.T must be 0 or at least episode.dt");
    if (cfg.decimate < 1) throw ConfigError("episode.decimate must be >= 1");
    if (!(cfg.weight_init_lo <= cfg.weight_init_hi))
        throw ConfigError("episode.weight_init range is inverted");
    if (!(cfg.gamma0 > 0.0)) throw ConfigError("episode.gamma0 must be positive");
    if (loop.model.n <= 0 || loop.model.m <= 0 || !loop.model.drift_into ||
        !loop.model.input_map_into)
        throw ConfigError("closed loop: plant model is incomplete");
    if (!loop.barrier) throw ConfigError("closed loop: barrier is required");
    if (!loop.basis_factory) throw ConfigError("closed loop: basis factory is required");
    if (loop.ident_l < 1) throw ConfigError("identifier.l must be >= 1");
    if (loop.lambda < 0.0) throw ConfigError("safety.lambda must be nonnegative");

    const auto n = static_cast<std::size_t>(loop.model.n);
    const auto m = static_cast<std::size_t>(loop.model.m);
    const auto l = static_cast<std::size_t>(loop.ident_l);
    if (cfg.x0.size() != n)
        throw ConfigError("episode.x0 must have " + std::to_string(n) + " entries");
    if (static_cast<std::size_t>(loop.barrier->dim()) != n)
        throw ConfigError("barrier.a dimension does not match the plant state");
    if (loop.cost.r.rows() != m)
        throw ConfigError("cost.R dimension does not match the plant input");

    const BarrierFunction& barrier = *loop.barrier;
    const double lambda = cfg.mode == ControllerMode::baseline_aci ? 0.0 : loop.lambda;

    if (cfg.mode == ControllerMode::safe) {
        try {
            barrier.value(cfg.x0);
        } catch (const OutsideSafeSetError&) {
            throw ConfigError(
                "episode.x0 must be strictly inside the safe set in safe mode");
        }
    }

    // ---- per-episode init; draw order: basis, Wc, Wa, Wf, Vf ----
    Rng rng(cfg.seed);
    std::shared_ptr<const Basis> basis = loop.basis_factory(rng);
    if (!basis || basis->dim() != loop.model.n)
        throw ConfigError("critic basis dimension does not match the plant state");
    const auto p = static_cast<std::size_t>(basis->features());
    const double w_bar = resolve_actor_radius(loop.w_bar, p);

    AugmentedState y;
    y.x = cfg.x0;
    y.x_hat = cfg.x0;
    y.wc.resize(p);
    y.wa.resize(p);
    for (double& v : y.wc) v = rng.uniform(cfg.weight_init_lo, cfg.weight_init_hi);
    for (double& v : y.wa) v = rng.uniform(cfg.weight_init_lo, cfg.weight_init_hi);
    y.gamma = Mat::identity(p);
    mat_scale(cfg.gamma0, y.gamma);
    y.wf = Mat(l, n);
    y.vf = Mat(n, l);
    for (std::size_t i = 0; i < y.wf.size(); ++i)
        y.wf.data()[i] = rng.uniform(cfg.weight_init_lo, cfg.weight_init_hi);
    for (std::size_t i = 0; i < y.vf.size(); ++i)
        y.vf.data()[i] = rng.uniform(cfg.weight_init_lo, cfg.weight_init_hi);

    if (norm2(y.wa) > proj_shell(w_bar, loop.proj_eps))
        throw ConfigError("initial actor weights fall outside the projection shell");
    if (fro_norm(y.wf) > proj_shell(loop.ident_wf_bar, loop.ident_proj_eps) ||
        fro_norm(y.vf) > proj_shell(loop.ident_vf_bar, loop.ident_proj_eps))
        throw ConfigError("initial identifier weights fall outside the projection shell");

    RateCtx ctx = make_ctx(loop, *basis, w_bar, lambda);
    AugmentedState k1, k2, k3, k4, tmp;
    size_like(k1, y);
    size_like(k2, y);
    size_like(k3, y);
    size_like(k4, y);
    size_like(tmp, y);

    TrajectoryLog log;
    EpisodeSummary& sum = log.summary;
    sum.first_violation_t = kInf;
    sum.w_bar = w_bar;
    sum.gamma_pd_every_step = true;
    sum.proj_ball_ok = true;
    sum.pe_min_eig = std::numeric_limits<double>::quiet_NaN();

    const long steps =
        cfg.horizon == 0.0 ? 0 : static_cast<long>(std::llround(cfg.horizon / cfg.dt));
    const long window_steps =
        cfg.pe_window > 0.0 ? static_cast<long>(std::llround(cfg.pe_window / cfg.dt)) : 0;
    Mat pe_acc(p, p);
    long pe_count = 0;
    Vec psi(p);

    Mat chol_scratch(p, p);
    Vec scratch_n(n);

    const double shell_wa = proj_shell(w_bar, loop.proj_eps);
    const double shell_wf = proj_shell(loop.ident_wf_bar, loop.ident_proj_eps);
    const double shell_vf = proj_shell(loop.ident_vf_bar, loop.ident_proj_eps);
    constexpr double kShellSlack = 1.0 + 1e-6;

    // Last successfully evaluated control/residual, for the final record when
    // the closing evaluation is impossible (violation halt).
    Vec last_u(m, 0.0);
    double last_delta = 0.0;

    auto guarded_bf = [&](const Vec& x) -> double {
        if (!barrier.contains(x)) return kInf;
        try {
            return barrier.value(x);
        } catch (const OutsideSafeSetError&) {
            return kInf;  // inside but within the numeric guard band
        }
    };

    auto monitor = [&](const AugmentedState& s) {
        sum.sup_x = std::max(sum.sup_x, norm2(s.x));
        sum.sup_wc = std::max(sum.sup_wc, norm2(s.wc));
        sum.sup_wa = std::max(sum.sup_wa, norm2(s.wa));
        sum.sup_wf = std::max(sum.sup_wf, fro_norm(s.wf));
        sum.sup_vf = std::max(sum.sup_vf, fro_norm(s.vf));
        scratch_n = s.x;
        axpy(-1.0, s.x_hat, scratch_n);
        const double xt = norm2(scratch_n);
        sum.sup_xtilde = std::max(sum.sup_xtilde, xt);
        log.xtilde_steps.push_back(xt);
        const double bf = guarded_bf(s.x);
        if (std::isfinite(bf)) sum.max_bf = std::max(sum.max_bf, bf);
        sum.max_ratio = std::max(sum.max_ratio, barrier.boundary_fraction(s.x));
    };

    auto push_record = [&](double t, const AugmentedState& s, const Vec& u,
                           double delta, bool episode_safe) {
        TrajectoryRecord r;
        r.t = t;
        r.x = s.x;
        r.x_hat = s.x_hat;
        r.u = u;
        r.delta_hjb = delta;
        r.bf = guarded_bf(s.x);
        scratch_n = s.x;
        axpy(-1.0, s.x_hat, scratch_n);
        r.xtilde_norm = norm2(scratch_n);
        r.wc_norm = norm2(s.wc);
        r.wa_norm = norm2(s.wa);
        sym_eig_range(s.gamma, r.gamma_min, r.gamma_max);
        if (loop.gamma_max == 0.0 && r.gamma_max > kGammaWarnLevel)
            sum.gamma_warned = true;
        r.safe = episode_safe && barrier.contains(s.x);
        log.records.push_back(std::move(r));
    };

    auto rate_fn = [&](double t, const AugmentedState& s, AugmentedState& ds,
                       bool held) { compute_rates(ctx, t, s, ds, held); };

    monitor(y);

    bool violated = false;
    double t_now = 0.0;
    long k = 0;
    for (; k < steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        bool stage_exit = false;
        try {
            rate_fn(t, y, k1, false);
        } catch (const OutsideSafeSetError&) {
            stage_exit = true;
        }

        if (!stage_exit) {
            last_u = ctx.u;
            last_delta = ctx.delta;
            if (window_steps > 0) {
                psi = ctx.omega;
                scale(1.0 / std::sqrt(ctx.denom), psi);
                ger(cfg.dt, psi, psi, pe_acc);
                if (++pe_count == window_steps) {
                    const double lmin = sym_eigenvalues(pe_acc).front();
                    sum.pe_min_eig = std::isnan(sum.pe_min_eig)
                                         ? lmin
                                         : std::min(sum.pe_min_eig, lmin);
                    fill(pe_acc, 0.0);
                    pe_count = 0;
                }
            }
            if (k % cfg.decimate == 0) push_record(t, y, ctx.u, ctx.delta, !violated);

            try {
                tmp = y;
                state_axpy(tmp, 0.5 * cfg.dt, k1);
                rate_fn(t + 0.5 * cfg.dt, tmp, k2, cfg.sample_hold);
                tmp = y;
                state_axpy(tmp, 0.5 * cfg.dt, k2);
                rate_fn(t + 0.5 * cfg.dt, tmp, k3, cfg.sample_hold);
                tmp = y;
                state_axpy(tmp, cfg.dt, k3);
                rate_fn(t + cfg.dt, tmp, k4, cfg.sample_hold);
                state_axpy(y, cfg.dt / 6.0, k1);
                state_axpy(y, cfg.dt / 3.0, k2);
                state_axpy(y, cfg.dt / 3.0, k3);
                state_axpy(y, cfg.dt / 6.0, k4);
            } catch (const OutsideSafeSetError&) {
                stage_exit = true;
            }
        }

        if (stage_exit) {
            // A stage evaluation left the safe set: halt with the last state
            // that was still inside.
            sum.status = EpisodeStatus::violated;
            if (!violated) sum.first_violation_t = t;
            violated = true;
            break;
        }

        t_now = static_cast<double>(k + 1) * cfg.dt;

        // ---- post-step invariants ----
        if (!bundle_finite(y))
            throw NonFiniteError("augmented state became non-finite" +
                                 dump_tail(log, t_now));
        symmetrize(y.gamma);
        if (!is_positive_definite(y.gamma, chol_scratch)) {
            sum.gamma_pd_every_step = false;
            throw CovarianceError("critic covariance lost positive definiteness" +
                                  dump_tail(log, t_now));
        }
        // The continuous projected laws cannot leave their shells, but an RK4
        // step can overshoot by integration error when an estimate rides the
        // shell. Retract radially; anything beyond roundoff scale means the
        // adaptation law itself escaped and stays fatal.
        const double wa_nrm = norm2(y.wa);
        if (wa_nrm > shell_wa) {
            if (wa_nrm > shell_wa * kShellSlack) {
                sum.proj_ball_ok = false;
                throw ProjectionEscapeError(
                    "actor weights escaped the projection shell" + dump_tail(log, t_now));
            }
            scale(shell_wa / wa_nrm, y.wa);
        }
        const double wf_nrm = fro_norm(y.wf);
        const double vf_nrm = fro_norm(y.vf);
        if (wf_nrm > shell_wf || vf_nrm > shell_vf) {
            if (wf_nrm > shell_wf * kShellSlack || vf_nrm > shell_vf * kShellSlack) {
                sum.proj_ball_ok = false;
                throw ProjectionEscapeError(
                    "identifier weights escaped the projection shell" + dump_tail(log, t_now));
            }
            if (wf_nrm > shell_wf) mat_scale(shell_wf / wf_nrm, y.wf);
            if (vf_nrm > shell_vf) mat_scale(shell_vf / vf_nrm, y.vf);
        }
        if (loop.gamma_max > 0.0 && fro_norm(y.gamma) > loop.gamma_max) {
            // cheap bound first; exact eigenvalue only when it may matter
            if (sym_eigenvalues(y.gamma).back() > loop.gamma_max) {
                y.gamma = Mat::identity(p);
                mat_scale(cfg.gamma0, y.gamma);
                ++sum.gamma_resets;
            }
        }

        monitor(y);

        if (!barrier.contains(y.x)) {
            if (!violated) sum.first_violation_t = t_now;
            violated = true;
            sum.status = EpisodeStatus::violated;
            const bool stop =
                cfg.mode == ControllerMode::safe || cfg.stop_on_violation;
            if (stop) {
                ++k;
                break;
            }
        }
    }
    sum.steps = k;

    // final record at the halt state; re-evaluate the control there if the
    // state still admits it
    double fin_delta = last_delta;
    Vec fin_u = last_u;
    try {
        rate_fn(t_now, y, k1, false);
        fin_u = ctx.u;
        fin_delta = ctx.delta;
    } catch (const OutsideSafeSetError&) {
        // keep the last good control values
    }
    if (!log.records.empty() && log.records.back().t == t_now)
        log.records.pop_back();  // halted exactly on a decimation point
    push_record(t_now, y, fin_u, fin_delta, !violated);

    sum.within_ceiling =
        sum.sup_x < cfg.norm_ceiling && sum.sup_wc < cfg.norm_ceiling &&
        sum.sup_wa < cfg.norm_ceiling && sum.sup_xtilde < cfg.norm_ceiling &&
        sum.sup_wf < cfg.norm_ceiling && sum.sup_vf < cfg.norm_ceiling;
    return log;
}

SafetyCertificate compute_certificate(const BarrierFunction& b,
                                      const SystemModel& model,
                                      const CostConfig& cost, const Basis& basis,
                                      double w_bar, double lambda, long samples,
                                      const Vec& x0, std::uint64_t seed) {
    if (samples < 1000)
        throw ConfigError("compute_certificate needs at least 1000 samples");
    if (!(lambda > 0.0))
        throw ConfigError("compute_certificate needs a positive lambda");
    if (!(w_bar > 0.0))
        throw ConfigError("compute_certificate needs a positive weight radius");

    Mat r_chol;
    if (!cholesky(cost.r, r_chol))
        throw ConfigError("compute_certificate: input weight R is not positive definite");

    Rng rng(seed);
    SafetyCertificate cert;
    cert.samples = samples;
    cert.gamma = b.gamma();
    cert.rg_min = kInf;

    const auto m = static_cast<std::size_t>(model.m);
    Mat gx, jac;
    Vec f;
    Mat gram(m, m), half(m, m), restricted(m, m);
    Vec work(m);
    // in-place solve L y = y for lower-triangular L
    auto fwd = [&](Vec& v) {
        for (std::size_t i = 0; i < m; ++i) {
            double s = v[i];
            for (std::size_t kk = 0; kk < i; ++kk) s -= r_chol(i, kk) * v[kk];
            v[i] = s / r_chol(i, i);
        }
    };
    for (long s = 0; s < samples; ++s) {
        const Vec x = b.sample_interior(0.999, rng);
        model.drift_into(x, f);
        cert.f_bar = std::max(cert.f_bar, norm2(f));
        model.input_map_into(x, gx);

        // Restricted spectrum of g R^-1 g^T: the nonzero eigenvalues agree
        // with those of L^-1 (g^T g) L^-T where R = L L^T, an m x m problem
        // that stays positive definite exactly while g has full column rank.
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                double acc = 0.0;
                for (std::size_t rr = 0; rr < gx.rows(); ++rr)
                    acc += gx(rr, i) * gx(rr, j);
                gram(i, j) = acc;
            }
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < m; ++i) work[i] = gram(i, j);
            fwd(work);
            for (std::size_t i = 0; i < m; ++i) half(i, j) = work[i];
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) work[j] = half(i, j);
            fwd(work);
            for (std::size_t j = 0; j < m; ++j) restricted(i, j) = work[j];
        }
        symmetrize(restricted);
        Vec ev = sym_eigenvalues(restricted);
        cert.rg_min = std::min(cert.rg_min, ev.front());
        cert.rg_bar = std::max(cert.rg_bar, ev.back());

        basis.jacobian_into(x, jac);
        cert.phi_d_bar = std::max(cert.phi_d_bar, spectral_norm(jac));
    }

    if (cert.rg_min < 1e-10)
        throw DegenerateKernelError(
            "sampled control-effectiveness kernel is degenerate (restricted "
            "lambda_min = " +
            fmt(cert.rg_min) + ")");

    cert.b_bar_d = (cert.f_bar + 0.5 * cert.phi_d_bar * w_bar * cert.rg_bar) /
                   (0.5 * lambda * cert.rg_min);
    cert.bf_x0 = b.value(x0);
    cert.bound = std::max(cert.bf_x0, cert.gamma * cert.b_bar_d);
    if (!std::isfinite(cert.b_bar_d) || !(cert.b_bar_d > 0.0) ||
        !std::isfinite(cert.bound))
        throw NumericError("compute_certificate produced a non-finite bound");
    return cert;
}

BarrierBoundReport monitor_barrier_bound(const TrajectoryLog& log,
                                         const SafetyCertificate& cert) {
    BarrierBoundReport rep;
    rep.bound = cert.bound;
    rep.max_bf = log.summary.max_bf;
    for (const TrajectoryRecord& r : log.records)
        rep.max_bf = std::max(rep.max_bf, r.bf);
    rep.holds = rep.max_bf <= rep.bound * 1.01;
    return rep;
}

ComparisonReport compare_runs(const EpisodeConfig& safe_cfg,
                              const EpisodeConfig& baseline_cfg,
                              const ClosedLoop& loop) {
    if (safe_cfg.mode != ControllerMode::safe ||
        baseline_cfg.mode != ControllerMode::baseline_aci)
        throw ConfigError("compare_runs: configs must be safe and baseline modes");
    if (safe_cfg.seed != baseline_cfg.seed || safe_cfg.x0 != baseline_cfg.x0 ||
        safe_cfg.dt != baseline_cfg.dt)
        throw ConfigError("compare_runs: configs must share seed, x0 and dt");
    ComparisonReport rep;
    rep.safe_log = run_episode(safe_cfg, loop);
    rep.baseline_log = run_episode(baseline_cfg, loop);
    rep.safe_first_violation = rep.safe_log.summary.first_violation_t;
    rep.baseline_first_violation = rep.baseline_log.summary.first_violation_t;
    rep.safe_max_ratio = rep.safe_log.summary.max_ratio;
    rep.baseline_max_ratio = rep.baseline_log.summary.max_ratio;
    return rep;
}

void write_trajectory_csv(const TrajectoryLog& log, std::ostream& os) {
    if (log.records.empty()) return;
    const std::size_t n = log.records.front().x.size();
    const std::size_t m = log.records.front().u.size();
    os << "t";
    for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
    for (std::size_t i = 1; i <= n; ++i) os << ",xhat" << i;
    for (std::size_t i = 1; i <= m; ++i) os << ",u" << i;
    os << ",delta_hjb,Bf,xtilde_norm,Wc_norm,Wa_norm,gamma_min,gamma_max,safe\n";
    for (const TrajectoryRecord& r : log.records) {
        os << fmt(r.t);
        for (double v : r.x) os << ',' << fmt(v);
        for (double v : r.x_hat) os << ',' << fmt(v);
        for (double v : r.u) os << ',' << fmt(v);
        os << ',' << fmt(r.delta_hjb) << ',' << fmt(r.bf) << ','
           << fmt(r.xtilde_norm) << ',' << fmt(r.wc_norm) << ',' << fmt(r.wa_norm)
           << ',' << fmt(r.gamma_min) << ',' << fmt(r.gamma_max) << ','
           << (r.safe ? 1 : 0) << '\n';
    }
}

}  // namespace safeaci

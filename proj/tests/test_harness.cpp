#include <cmath>
#include <sstream>

#include "doctest.h"
#include "safeaci/config.hpp"
#include "safeaci/errors.hpp"
#include "safeaci/harness.hpp"
#include "safeaci/identifier.hpp"
#include "safeaci/learner.hpp"
#include "safeaci/setup.hpp"
#include "safeaci/value.hpp"

using namespace safeaci;

namespace {

std::string csv_of(const TrajectoryLog& log) {
    std::ostringstream os;
    write_trajectory_csv(log, os);
    return os.str();
}

AugmentedState random_bundle(const Setup& s, const Basis& basis, Rng& rng) {
    const auto n = static_cast<std::size_t>(s.loop.model.n);
    const auto l = static_cast<std::size_t>(s.loop.ident_l);
    const auto p = static_cast<std::size_t>(basis.features());
    AugmentedState y;
    y.x.resize(n);
    const Vec a = s.loop.barrier ? Vec{5.0, 5.0, 5.0, 5.0} : Vec(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) y.x[i] = rng.uniform(-0.5, 0.5) * a[i];
    y.x_hat = y.x;
    for (std::size_t i = 0; i < n; ++i) y.x_hat[i] += rng.uniform(-0.2, 0.2);
    y.wc.resize(p);
    y.wa.resize(p);
    for (std::size_t i = 0; i < p; ++i) y.wc[i] = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < p; ++i) y.wa[i] = rng.uniform(-1.0, 1.0);
    y.gamma = Mat::identity(static_cast<int>(p));
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = 0.05 * rng.uniform(-1.0, 1.0);
            y.gamma(i, j) += v;
            if (i != j) y.gamma(j, i) += v;
        }
    y.wf = Mat(static_cast<int>(l), static_cast<int>(n));
    y.vf = Mat(static_cast<int>(n), static_cast<int>(l));
    for (std::size_t i = 0; i < y.wf.size(); ++i)
        y.wf.data()[i] = rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < y.vf.size(); ++i)
        y.vf.data()[i] = rng.uniform(-1.0, 1.0);
    return y;
}

}  // namespace

TEST_CASE("rk4 single step matches the fourth-order polynomial on y' = -y") {
    const auto rate = [](double, const Vec& y, Vec& dy) {
        dy = y;
        scale(-1.0, dy);
    };
    const double h = 0.1;
    const Vec y1 = rk4_step(rate, Vec{1.0}, 0.0, h);
    const double expect = 1.0 - h + h * h / 2.0 - h * h * h / 6.0 +
                          h * h * h * h / 24.0;
    CHECK(y1[0] == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("rk4 leaves the state exactly unchanged under a zero field") {
    const auto rate = [](double, const Vec& y, Vec& dy) {
        dy.assign(y.size(), 0.0);
    };
    const Vec y0{1.25, -3.5};
    const Vec y1 = rk4_step(rate, y0, 0.0, 0.37);
    CHECK(y1[0] == 1.25);
    CHECK(y1[1] == -3.5);
}

TEST_CASE("augmented rate is the composition of the public module operations") {
    const Config cfg = Config::defaults();
    const Setup s = build_setup(cfg);
    ClosedLoop loop = s.loop;
    loop.excitation.enabled = true;  // keep u and u_applied distinct
    Rng rng(7);
    const auto basis = loop.basis_factory(rng);
    const int p = basis->features();
    const double w_bar = resolve_actor_radius(loop.w_bar, p);
    const AugmentedState y = random_bundle(s, *basis, rng);
    const double t = 0.25;

    AugmentedRateInfo info;
    const AugmentedState dy =
        augmented_rate(loop, *basis, w_bar, loop.lambda, t, y, &info);

    // control and plant
    const Vec u = estimated_safe_control(loop.cost, loop.model, *loop.barrier,
                                         *basis, y.wa, y.x, loop.lambda);
    Vec u_app = u;
    axpy(1.0, excitation(loop.excitation, loop.model.m, t), u_app);
    REQUIRE(norm2(sub(u_app, u)) > 0.0);
    Mat gx(loop.model.n, loop.model.m);
    loop.model.input_map_into(y.x, gx);
    Vec xdot(static_cast<std::size_t>(loop.model.n));
    loop.model.drift_into(y.x, xdot);
    Vec gu(xdot.size());
    matvec_into(gx, u_app, gu);
    axpy(1.0, gu, xdot);
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(info.u[i] == doctest::Approx(u[i]).epsilon(1e-13));
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(info.u_applied[i] == doctest::Approx(u_app[i]).epsilon(1e-13));
    for (std::size_t i = 0; i < xdot.size(); ++i)
        CHECK(dy.x[i] == doctest::Approx(xdot[i]).epsilon(1e-13));

    // identifier block
    IdentifierState id;
    id.wf = y.wf;
    id.vf = y.vf;
    id.x_hat = y.x_hat;
    id.k = loop.ident_k;
    id.gamma_wf = loop.ident_gamma_wf;
    id.gamma_vf = loop.ident_gamma_vf;
    id.wf_bar = loop.ident_wf_bar;
    id.vf_bar = loop.ident_vf_bar;
    id.proj_eps = loop.ident_proj_eps;
    const Vec xh_dot = estimator_rate(id, loop.model, y.x, u_app);
    for (std::size_t i = 0; i < xh_dot.size(); ++i)
        CHECK(dy.x_hat[i] == doctest::Approx(xh_dot[i]).epsilon(1e-13));
    Vec x_tilde = y.x;
    axpy(-1.0, y.x_hat, x_tilde);
    const IdentifierRates ir = weight_rates(id, y.x, x_tilde);
    for (std::size_t i = 0; i < ir.wf_rate.size(); ++i)
        CHECK(dy.wf.data()[i] ==
              doctest::Approx(ir.wf_rate.data()[i]).epsilon(1e-13));
    for (std::size_t i = 0; i < ir.vf_rate.size(); ++i)
        CHECK(dy.vf.data()[i] ==
              doctest::Approx(ir.vf_rate.data()[i]).epsilon(1e-13));

    // residual at the actor control with the identifier drift
    const Mat phi_jac = basis->jacobian(y.x);
    const BellmanResidual br = bellman_residual(
        loop.cost, estimated_drift(id, y.x), gx, phi_jac, y.wc, y.x, u);
    CHECK(info.delta == doctest::Approx(br.delta).epsilon(1e-12));
    for (std::size_t i = 0; i < br.omega.size(); ++i)
        CHECK(info.omega[i] == doctest::Approx(br.omega[i]).epsilon(1e-12));

    // critic, covariance, actor
    CriticState cs;
    cs.wc = y.wc;
    cs.gamma = y.gamma;
    cs.eta_c = loop.eta_c;
    cs.nu = loop.nu;
    cs.beta = loop.beta;
    const Vec wc_dot = critic_rate(cs, br.omega, br.delta);
    for (std::size_t i = 0; i < wc_dot.size(); ++i)
        CHECK(dy.wc[i] == doctest::Approx(wc_dot[i]).epsilon(1e-12));
    Mat g_ref = covariance_rate(cs, br.omega);
    mat_axpy(-1.0, dy.gamma, g_ref);
    CHECK(fro_norm(g_ref) <= 1e-10 * (1.0 + fro_norm(dy.gamma)));

    ActorState as;
    as.wa = y.wa;
    as.eta_a1 = loop.eta_a1;
    as.eta_a2 = loop.eta_a2;
    as.w_bar = w_bar;
    as.proj_eps = loop.proj_eps;
    const ControlKernels ker = control_kernels(loop.cost, loop.model, *basis, y.x);
    const Vec wa_dot = actor_rate(as, cs, ker, phi_jac, loop.barrier.get(), y.x,
                                  br.omega, br.delta, loop.lambda);
    for (std::size_t i = 0; i < wa_dot.size(); ++i)
        CHECK(dy.wa[i] == doctest::Approx(wa_dot[i]).epsilon(1e-12));
}

TEST_CASE("origin with zero weights is an equilibrium except covariance growth") {
    const Config cfg = Config::defaults();
    const Setup s = build_setup(cfg);
    Rng rng(3);
    const auto basis = s.loop.basis_factory(rng);
    const int p = basis->features();
    AugmentedState y;
    y.x.assign(4, 0.0);
    y.x_hat.assign(4, 0.0);
    y.wc.assign(static_cast<std::size_t>(p), 0.0);
    y.wa.assign(static_cast<std::size_t>(p), 0.0);
    y.gamma = Mat::identity(p);
    y.wf = Mat(s.loop.ident_l, 4);
    y.vf = Mat(4, s.loop.ident_l);
    const AugmentedState dy = augmented_rate(
        s.loop, *basis, resolve_actor_radius(s.loop.w_bar, p), s.loop.lambda,
        0.0, y);
    CHECK(norm2(dy.x) == 0.0);
    CHECK(norm2(dy.x_hat) == 0.0);
    CHECK(norm2(dy.wc) == 0.0);
    CHECK(norm2(dy.wa) == 0.0);
    CHECK(fro_norm(dy.wf) == 0.0);
    CHECK(fro_norm(dy.vf) == 0.0);
    Mat expect = Mat::identity(p);
    mat_scale(s.loop.beta, expect);
    mat_axpy(-1.0, dy.gamma, expect);
    CHECK(fro_norm(expect) == 0.0);
}

TEST_CASE("baseline mode reproduces safe mode with the barrier weight zeroed") {
    const Config cfg = Config::defaults();
    Setup s = build_setup(cfg);
    s.episode.horizon = 1.5;
    s.episode.decimate = 100;

    EpisodeConfig base_cfg = s.episode;
    base_cfg.mode = ControllerMode::baseline_aci;
    const TrajectoryLog base_log = run_episode(base_cfg, s.loop);

    ClosedLoop unweighted = s.loop;
    unweighted.lambda = 0.0;
    const TrajectoryLog safe_log = run_episode(s.episode, unweighted);

    CHECK(csv_of(base_log) == csv_of(safe_log));
}

TEST_CASE("zero horizon produces exactly the initial record") {
    const Config cfg = Config::defaults();
    Setup s = build_setup(cfg);
    s.episode.horizon = 0.0;
    const TrajectoryLog log = run_episode(s.episode, s.loop);
    REQUIRE(log.records.size() == 1);
    CHECK(log.records[0].t == 0.0);
    CHECK(log.summary.steps == 0);
    CHECK(log.xtilde_steps.size() == 1);
    CHECK(log.xtilde_steps[0] == 0.0);  // observer starts at the plant state
    CHECK(log.records[0].x[0] == 2.0);
}

TEST_CASE("same seed twice gives byte-identical logs") {
    const Config cfg = Config::defaults();
    Setup s = build_setup(cfg);
    s.episode.horizon = 0.8;
    const std::string a = csv_of(run_episode(s.episode, s.loop));
    const std::string b = csv_of(run_episode(s.episode, s.loop));
    CHECK(a == b);
    s.episode.seed = 1;
    const std::string c = csv_of(run_episode(s.episode, s.loop));
    CHECK(a != c);
}

TEST_CASE("per-step observer error trace covers every step") {
    const Config cfg = Config::defaults();
    Setup s = build_setup(cfg);
    s.episode.horizon = 0.25;
    s.episode.decimate = 50;
    const TrajectoryLog log = run_episode(s.episode, s.loop);
    CHECK(log.summary.steps == 250);
    CHECK(log.xtilde_steps.size() ==
          static_cast<std::size_t>(log.summary.steps) + 1);
    CHECK(log.xtilde_steps[0] == 0.0);
    CHECK(log.xtilde_steps[1] > 0.0);  // weights are random, mismatch immediate
}

TEST_CASE("episode validation rejects malformed configs") {
    const Config cfg = Config::defaults();
    const Setup s = build_setup(cfg);

    EpisodeConfig bad = s.episode;
    bad.dt = 0.0;
    CHECK_THROWS_AS(run_episode(bad, s.loop), ConfigError);

    bad = s.episode;
    bad.x0 = Vec{1.0, 2.0};
    CHECK_THROWS_AS(run_episode(bad, s.loop), ConfigError);

    bad = s.episode;
    bad.x0 = Vec{6.0, 0.0, 0.0, 0.0};  // outside the safe set
    CHECK_THROWS_AS(run_episode(bad, s.loop), ConfigError);

    bad = s.episode;
    bad.weight_init_lo = 1.0;
    bad.weight_init_hi = -1.0;
    CHECK_THROWS_AS(run_episode(bad, s.loop), ConfigError);

    bad = s.episode;
    bad.decimate = 0;
    CHECK_THROWS_AS(run_episode(bad, s.loop), ConfigError);

    bad = s.episode;
    bad.gamma0 = 0.0;
    CHECK_THROWS_AS(run_episode(bad, s.loop), ConfigError);
}

TEST_CASE("sample-hold integration differs from per-stage control") {
    const Config cfg = Config::defaults();
    Setup s = build_setup(cfg);
    s.episode.horizon = 0.5;
    const std::string fresh = csv_of(run_episode(s.episode, s.loop));
    s.episode.sample_hold = true;
    const std::string held = csv_of(run_episode(s.episode, s.loop));
    CHECK(fresh != held);
}

TEST_CASE("covariance cap resets gamma when its top eigenvalue crosses it") {
    const Config cfg = Config::defaults();
    Setup s = build_setup(cfg);
    ClosedLoop capped = s.loop;
    capped.gamma_max = 1.0005;  // beta growth alone crosses this within ~0.5 s
    s.episode.horizon = 1.2;
    s.episode.decimate = 200;
    const TrajectoryLog log = run_episode(s.episode, capped);
    CHECK(log.summary.gamma_resets >= 1);
    CHECK(log.summary.gamma_pd_every_step);
}

TEST_CASE("excitation signal is deterministic, bounded and off by default") {
    ExcitationConfig exc;
    CHECK(norm2(excitation(exc, 2, 1.23)) == 0.0);
    exc.enabled = true;
    const Vec a = excitation(exc, 2, 1.23);
    const Vec b = excitation(exc, 2, 1.23);
    REQUIRE(a.size() == 2);
    CHECK(a[0] == b[0]);
    CHECK(a[1] == b[1]);
    CHECK(norm2(a) > 0.0);
    const double per_channel =
        exc.amplitude * static_cast<double>(exc.frequencies.size());
    for (double t : {0.0, 0.37, 2.9, 11.0}) {
        const Vec e = excitation(exc, 2, t);
        CHECK(std::abs(e[0]) <= per_channel);
        CHECK(std::abs(e[1]) <= per_channel);
    }
}

TEST_CASE("PE diagnostic reports a finite window eigenvalue") {
    const Config cfg = Config::defaults();
    Setup s = build_setup(cfg);
    s.episode.horizon = 0.5;
    s.episode.pe_window = 0.2;
    ClosedLoop probed = s.loop;
    probed.excitation.enabled = true;
    const TrajectoryLog log = run_episode(s.episode, probed);
    CHECK(std::isfinite(log.summary.pe_min_eig));
    // the window Gram matrix is PSD; its bottom eigenvalue may compute to a
    // roundoff-scale negative
    CHECK(log.summary.pe_min_eig >= -1e-12);
}

TEST_CASE("certificate scales as the formula dictates") {
    const Config cfg = Config::defaults();
    const Setup s = build_setup(cfg);
    Rng rng(0);
    const auto basis = s.loop.basis_factory(rng);
    const double w_bar = resolve_actor_radius(s.loop.w_bar, basis->features());
    const SafetyCertificate c1 =
        compute_certificate(*s.loop.barrier, s.loop.model, s.loop.cost, *basis,
                            w_bar, 100.0, 2000, s.episode.x0, 11);
    const SafetyCertificate c2 =
        compute_certificate(*s.loop.barrier, s.loop.model, s.loop.cost, *basis,
                            w_bar, 200.0, 2000, s.episode.x0, 11);
    CHECK(c2.b_bar_d == doctest::Approx(0.5 * c1.b_bar_d).epsilon(1e-14));
    const SafetyCertificate c3 =
        compute_certificate(*s.loop.barrier, s.loop.model, s.loop.cost, *basis,
                            2.0 * w_bar, 100.0, 2000, s.episode.x0, 11);
    CHECK(c3.b_bar_d > c1.b_bar_d);
    CHECK(c1.bound == std::max(c1.bf_x0, c1.gamma * c1.b_bar_d));
    CHECK(c1.samples == 2000);
    CHECK_THROWS_AS(compute_certificate(*s.loop.barrier, s.loop.model,
                                        s.loop.cost, *basis, w_bar, 100.0, 999,
                                        s.episode.x0, 11),
                    ConfigError);
}

TEST_CASE("barrier bound monitor flags injected out-of-bound rows") {
    SafetyCertificate cert;
    cert.bound = 10.0;
    TrajectoryLog log;
    TrajectoryRecord r;
    r.bf = 4.0;
    log.records.push_back(r);
    r.bf = 9.0;
    log.records.push_back(r);
    BarrierBoundReport rep = monitor_barrier_bound(log, cert);
    CHECK(rep.holds);
    CHECK(rep.max_bf == 9.0);
    r.bf = 10.05;  // above bound but within the 1% sampling slack
    log.records.push_back(r);
    rep = monitor_barrier_bound(log, cert);
    CHECK(rep.holds);
    r.bf = 10.2;
    log.records.push_back(r);
    rep = monitor_barrier_bound(log, cert);
    CHECK_FALSE(rep.holds);
    CHECK(rep.max_bf == 10.2);
}

TEST_CASE("paired comparison demands matching seed, start and step") {
    const Config cfg = Config::defaults();
    const Setup s = build_setup(cfg);
    EpisodeConfig safe_cfg = s.episode;
    safe_cfg.horizon = 0.05;
    EpisodeConfig base_cfg = safe_cfg;
    base_cfg.mode = ControllerMode::baseline_aci;

    EpisodeConfig wrong = base_cfg;
    wrong.seed = 99;
    CHECK_THROWS_AS(compare_runs(safe_cfg, wrong, s.loop), ConfigError);
    wrong = base_cfg;
    wrong.x0[0] = 1.5;
    CHECK_THROWS_AS(compare_runs(safe_cfg, wrong, s.loop), ConfigError);
    wrong = base_cfg;
    wrong.dt = 2e-3;
    CHECK_THROWS_AS(compare_runs(safe_cfg, wrong, s.loop), ConfigError);

    const ComparisonReport rep = compare_runs(safe_cfg, base_cfg, s.loop);
    REQUIRE(rep.safe_log.records.size() == rep.baseline_log.records.size());
    for (std::size_t i = 0; i < rep.safe_log.records.size(); ++i)
        CHECK(rep.safe_log.records[i].t == rep.baseline_log.records[i].t);
    CHECK(std::isinf(rep.safe_first_violation));
    CHECK(std::isinf(rep.baseline_first_violation));
}

TEST_CASE("actor weights stay on the projection shell under a hostile pull") {
    // A tiny actor ball makes the critic chase drag the actor onto its shell
    // within the first fraction of a second; the integrated norm must never
    // exceed the shell radius.
    const Config cfg = Config::defaults();
    Setup s = build_setup(cfg);
    ClosedLoop tight = s.loop;
    tight.w_bar = 0.05;
    s.episode.weight_init_lo = -0.001;
    s.episode.weight_init_hi = 0.001;
    s.episode.horizon = 2.0;
    s.episode.decimate = 100;
    const TrajectoryLog log = run_episode(s.episode, tight);
    const double shell = proj_shell(0.05, tight.proj_eps);
    CHECK(log.summary.sup_wa <= shell * (1.0 + 1e-12));
    CHECK(log.summary.sup_wa > 0.9 * shell);  // it really was pinned
    CHECK(log.summary.proj_ball_ok);
    CHECK(log.summary.status == EpisodeStatus::completed);
}

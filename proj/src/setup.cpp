#include "safeaci/setup.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "safeaci/barrier.hpp"
#include "safeaci/dynamics.hpp"
#include "safeaci/errors.hpp"
#include "safeaci/value.hpp"

namespace safeaci {

Mat parse_control_weight(const Config& cfg, int m) {
    const std::string& spec = cfg.get_str("cost.R");
    if (spec == "identity") return Mat::identity(m);
    Vec vals;
    try {
        vals = cfg.get_list("cost.R");
    } catch (const ConfigError&) {
        throw ConfigError("cost.R: expected 'identity', a scalar, or " +
                          std::to_string(m * m) + " entries, got '" + spec + "'");
    }
    if (vals.size() == 1) {
        if (!(vals[0] > 0)) throw ConfigError("cost.R: scalar weight must be positive");
        Mat r = Mat::identity(m);
        mat_scale(vals[0], r);
        return r;
    }
    if (static_cast<int>(vals.size()) != m * m)
        throw ConfigError("cost.R: expected " + std::to_string(m * m) +
                          " row-major entries, got " + std::to_string(vals.size()));
    Mat r(m, m);
    for (int i = 0; i < m * m; ++i) r.data()[i] = vals[i];
    return r;
}

Setup build_setup(const Config& cfg) {
    Setup s;

    ManipulatorParams params;
    params.p1 = cfg.get_double("plant.p1");
    params.p2 = cfg.get_double("plant.p2");
    params.p3 = cfg.get_double("plant.p3");
    params.fd1 = cfg.get_double("plant.fd1");
    params.fd2 = cfg.get_double("plant.fd2");
    validate(params);
    s.loop.model = two_link_model(params);

    const Vec a = cfg.get_list("barrier.a");
    if (static_cast<int>(a.size()) != s.loop.model.n)
        throw ConfigError("barrier.a: expected " + std::to_string(s.loop.model.n) +
                          " half-widths, got " + std::to_string(a.size()));
    s.loop.barrier =
        std::make_shared<LogBarrier>(a, cfg.get_double("barrier.gamma"));

    s.loop.cost = CostConfig::make([](const Vec& x) { return dot(x, x); },
                                   parse_control_weight(cfg, s.loop.model.m));

    const int p = static_cast<int>(cfg.get_int("critic.p"));
    const double inner_scale = cfg.get_double("critic.inner_scale");
    if (p < 1) throw ConfigError("critic.p: need at least one feature");
    if (!(inner_scale > 0)) throw ConfigError("critic.inner_scale: must be positive");
    const int n = s.loop.model.n;
    s.loop.basis_factory = [n, p, inner_scale](Rng& rng) {
        return std::make_shared<SigmoidBasis>(n, p, inner_scale, rng);
    };

    s.loop.lambda = cfg.get_double("safety.lambda");
    s.loop.eta_c = cfg.get_double("learner.eta_c");
    s.loop.eta_a1 = cfg.get_double("learner.eta_a1");
    s.loop.eta_a2 = cfg.get_double("learner.eta_a2");
    s.loop.nu = cfg.get_double("learner.nu");
    s.loop.beta = cfg.get_double("learner.beta");
    s.loop.w_bar = cfg.get_double("learner.W_bar");
    s.loop.proj_eps = cfg.get_double("learner.proj_eps");
    s.loop.gamma_max = cfg.get_double("learner.gamma_max");

    s.loop.ident_l = static_cast<int>(cfg.get_int("identifier.l"));
    s.loop.ident_k = cfg.get_double("identifier.k");
    s.loop.ident_gamma_wf = cfg.get_double("identifier.gamma_wf");
    s.loop.ident_gamma_vf = cfg.get_double("identifier.gamma_vf");
    s.loop.ident_wf_bar = cfg.get_double("identifier.wf_bar");
    s.loop.ident_vf_bar = cfg.get_double("identifier.vf_bar");
    s.loop.ident_proj_eps = cfg.get_double("identifier.proj_eps");

    s.loop.perfect_model = cfg.get_bool("harness.perfect_model");

    s.loop.excitation.enabled = cfg.get_bool("excitation.enabled");
    s.loop.excitation.amplitude = cfg.get_double("excitation.amplitude");
    s.loop.excitation.frequencies = cfg.get_list("excitation.frequencies");

    s.episode.dt = cfg.get_double("episode.dt");
    s.episode.horizon = cfg.get_double("episode.T");
    s.episode.seed = cfg.get_u64("episode.seed");
    s.episode.x0 = cfg.get_list("episode.x0");

    const std::string& mode = cfg.get_str("episode.mode");
    s.episode.mode =
        mode == "safe" ? ControllerMode::safe : ControllerMode::baseline_aci;

    const Vec init = cfg.get_list("episode.weight_init");
    if (init.size() != 2)
        throw ConfigError("episode.weight_init: expected 'lo,hi', got " +
                          std::to_string(init.size()) + " values");
    s.episode.weight_init_lo = init[0];
    s.episode.weight_init_hi = init[1];

    s.episode.gamma0 = cfg.get_double("episode.gamma0");
    s.episode.decimate = static_cast<int>(cfg.get_int("episode.decimate"));
    s.episode.stop_on_violation = cfg.get_bool("episode.stop_on_violation");
    s.episode.sample_hold = cfg.get_bool("episode.sample_hold");
    s.episode.pe_window = cfg.get_double("harness.pe_window");
    s.episode.norm_ceiling = cfg.get_double("harness.norm_ceiling");

    return s;
}

}  // namespace safeaci

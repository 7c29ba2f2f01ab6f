#include "safeaci/identifier.hpp"

#include <cmath>

#include "safeaci/errors.hpp"
#include "safeaci/learner.hpp"

namespace safeaci {

namespace {

void check_sizes(const IdentifierState& id, const Vec& x) {
    const std::size_t n = x.size();
    const std::size_t l = id.wf.rows();
    if (id.wf.cols() != n || id.vf.rows() != n || id.vf.cols() != l)
        throw DimensionError("identifier: weight shapes do not match state size");
}

}  // namespace

Vec sigma(const Vec& z) {
    Vec s(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) s[i] = 1.0 / (1.0 + std::exp(-z[i]));
    return s;
}

Vec sigma_slope(const Vec& z) {
    Vec d(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double s = 1.0 / (1.0 + std::exp(-z[i]));
        d[i] = s * (1.0 - s);
    }
    return d;
}

Vec estimated_drift(const IdentifierState& id, const Vec& x) {
    check_sizes(id, x);
    return tmatvec(id.wf, sigma(tmatvec(id.vf, x)));
}

Vec estimator_rate(const IdentifierState& id, const SystemModel& model,
                   const Vec& x, const Vec& u) {
    check_sizes(id, x);
    if (id.x_hat.size() != x.size())
        throw DimensionError("identifier: observer state size mismatch");
    Vec rate = estimated_drift(id, x);
    axpy(1.0, matvec(model.input_map(x), u), rate);
    axpy(id.k, x, rate);
    axpy(-id.k, id.x_hat, rate);
    return rate;
}

IdentifierRates weight_rates(const IdentifierState& id, const Vec& x,
                             const Vec& x_tilde) {
    check_sizes(id, x);
    if (x_tilde.size() != x.size())
        throw DimensionError("identifier: estimation error size mismatch");
    const std::size_t n = x.size();
    const std::size_t l = id.wf.rows();

    const Vec z = tmatvec(id.vf, x);
    const Vec s = sigma(z);
    const Vec ds = sigma_slope(z);

    Mat wf_raw(l, n);
    ger(id.gamma_wf, s, x_tilde, wf_raw);

    // gamma_vf * x x_tilde^T Wf^T diag(sigma') -- column j scales by ds[j].
    const Vec wde = matvec(id.wf, x_tilde);  // Wf x_tilde, length l
    Mat vf_raw(n, l);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < l; ++j)
            vf_raw(i, j) = id.gamma_vf * x[i] * wde[j] * ds[j];

    IdentifierRates rates;
    rates.wf_rate = proj_frobenius(id.wf, wf_raw, id.wf_bar, id.proj_eps);
    rates.vf_rate = proj_frobenius(id.vf, vf_raw, id.vf_bar, id.proj_eps);
    return rates;
}

}  // namespace safeaci

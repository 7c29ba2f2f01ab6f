#include "safeaci/barrier.hpp"

#include <cmath>
#include <string>

#include "safeaci/errors.hpp"

namespace safeaci {

namespace {
constexpr double kBoundaryGuard = 1e-12;
}

LogBarrier::LogBarrier(Vec half_widths, double gamma)
    : a_(std::move(half_widths)), gamma_(gamma) {
    if (a_.empty()) throw ConfigError("log barrier needs at least one half-width");
    for (double ai : a_)
        if (!(ai > 0.0) || !std::isfinite(ai))
            throw ConfigError("log barrier half-widths must be positive and finite");
    if (!(gamma_ > 0.0) || !std::isfinite(gamma_))
        throw ConfigError("log barrier gamma must be positive and finite");
}

bool LogBarrier::contains(const Vec& x) const {
    if (x.size() != a_.size())
        throw DimensionError("barrier dimension mismatch: state has " +
                             std::to_string(x.size()) + " entries, barrier " +
                             std::to_string(a_.size()));
    for (std::size_t i = 0; i < a_.size(); ++i)
        if (!(std::abs(x[i]) < a_[i])) return false;
    return true;
}

double LogBarrier::boundary_fraction(const Vec& x) const {
    if (x.size() != a_.size())
        throw DimensionError("barrier dimension mismatch: state has " +
                             std::to_string(x.size()) + " entries, barrier " +
                             std::to_string(a_.size()));
    double f = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i)
        f = std::max(f, std::abs(x[i]) / a_[i]);
    return f;
}

void LogBarrier::check_interior(const Vec& x) const {
    if (x.size() != a_.size())
        throw DimensionError("barrier dimension mismatch: state has " +
                             std::to_string(x.size()) + " entries, barrier " +
                             std::to_string(a_.size()));
    for (std::size_t i = 0; i < a_.size(); ++i) {
        if (!(a_[i] - std::abs(x[i]) > kBoundaryGuard))
            throw OutsideSafeSetError(
                "state component " + std::to_string(i + 1) + " = " +
                std::to_string(x[i]) + " is outside or on the safe-set bound " +
                std::to_string(a_[i]));
    }
}

double LogBarrier::value(const Vec& x) const {
    check_interior(x);
    double b = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) {
        const double a2 = a_[i] * a_[i];
        b += std::log(a2 / (a2 - x[i] * x[i]));
    }
    return b;
}

void LogBarrier::gradient_into(const Vec& x, Vec& g) const {
    check_interior(x);
    g.resize(a_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) {
        const double a2 = a_[i] * a_[i];
        g[i] = 2.0 * x[i] / (a2 - x[i] * x[i]);
    }
}

Vec LogBarrier::gradient(const Vec& x) const {
    Vec g;
    gradient_into(x, g);
    return g;
}

Vec LogBarrier::sample_interior(double shrink, Rng& rng) const {
    Vec x(a_.size());
    for (std::size_t i = 0; i < a_.size(); ++i)
        x[i] = rng.uniform(-shrink * a_[i], shrink * a_[i]);
    return x;
}

double barrier_rate(const BarrierFunction& b, const Vec& x, const Vec& xdot) {
    return dot(b.gradient(x), xdot);
}

ConstructionReport verify_construction(const BarrierFunction& b, long samples,
                                       std::uint64_t seed) {
    if (samples < 1000)
        throw ConfigError("verify_construction needs at least 1000 samples");
    Rng rng(seed);
    ConstructionReport rep;
    rep.samples = samples;
    rep.holds = true;
    Vec g;
    for (long s = 0; s < samples; ++s) {
        const Vec x = b.sample_interior(0.999, rng);
        const double bf = b.value(x);
        b.gradient_into(x, g);
        const double gn = norm2(g);
        if (gn == 0.0) continue;  // only x = 0, where B = 0 holds trivially
        const double ratio = bf / gn;
        if (ratio > rep.worst_ratio) rep.worst_ratio = ratio;
        if (!(b.gamma() * gn >= bf)) rep.holds = false;
    }
    return rep;
}

}  // namespace safeaci

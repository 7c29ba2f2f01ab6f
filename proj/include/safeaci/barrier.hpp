#ifndef SAFEACI_BARRIER_HPP
#define SAFEACI_BARRIER_HPP

#include <cstdint>

#include "safeaci/linalg.hpp"
#include "safeaci/rng.hpp"

// Barrier functions over box-shaped safe sets. A barrier is finite on the
// interior, grows without bound toward the boundary, and comes with a
// constant gamma such that gamma * |grad B(x)| >= B(x) on the whole safe
// set. That inequality is what converts a bound on the barrier's decay rate
// into forward invariance, so verify_construction() checks it by sampling
// before a certificate is trusted.

namespace safeaci {

class BarrierFunction {
  public:
    virtual ~BarrierFunction() = default;

    virtual int dim() const = 0;
    virtual double gamma() const = 0;

    // Strict interior test.
    virtual bool contains(const Vec& x) const = 0;

    // How far along the way to the boundary x sits: 0 at the origin, 1 on
    // the boundary, > 1 outside. Never throws.
    virtual double boundary_fraction(const Vec& x) const = 0;

    // Throw OutsideSafeSetError when x is outside the safe set or within
    // 1e-12 of its boundary. Values are never clamped.
    virtual double value(const Vec& x) const = 0;
    virtual Vec gradient(const Vec& x) const = 0;
    virtual void gradient_into(const Vec& x, Vec& g) const = 0;

    // Uniform draw from the safe set scaled by `shrink` about the origin.
    virtual Vec sample_interior(double shrink, Rng& rng) const = 0;
};

// B(x) = sum_i log(a_i^2 / (a_i^2 - x_i^2)) over the box |x_i| < a_i.
class LogBarrier final : public BarrierFunction {
  public:
    LogBarrier(Vec half_widths, double gamma);

    const Vec& half_widths() const { return a_; }

    int dim() const override { return static_cast<int>(a_.size()); }
    double gamma() const override { return gamma_; }
    bool contains(const Vec& x) const override;
    double boundary_fraction(const Vec& x) const override;  // max_i |x_i| / a_i
    double value(const Vec& x) const override;
    Vec gradient(const Vec& x) const override;
    void gradient_into(const Vec& x, Vec& g) const override;
    Vec sample_interior(double shrink, Rng& rng) const override;

  private:
    void check_interior(const Vec& x) const;

    Vec a_;
    double gamma_;
};

// d/dt B(x(t)) along a flow direction.
double barrier_rate(const BarrierFunction& b, const Vec& x, const Vec& xdot);

struct ConstructionReport {
    bool holds = false;
    double worst_ratio = 0.0;  // max over samples of B(x) / |grad B(x)|
    long samples = 0;
};

// Monte-Carlo check of gamma * |grad B| >= B over 0.999-scaled samples of
// the safe set.
ConstructionReport verify_construction(const BarrierFunction& b, long samples,
                                       std::uint64_t seed);

}  // namespace safeaci

#endif

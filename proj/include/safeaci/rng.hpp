#ifndef SAFEACI_RNG_HPP
#define SAFEACI_RNG_HPP

#include <cstdint>
#include <random>

namespace safeaci {

// Deterministic RNG. mt19937_64's output sequence is fixed by the standard
// and the uniform mapping below is explicit, so a (seed, draw order) pair
// yields identical doubles on every platform. Never draw through
// std::uniform_real_distribution here: its algorithm is
// implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  private:
    std::mt19937_64 eng_;
};

}  // namespace safeaci

#endif

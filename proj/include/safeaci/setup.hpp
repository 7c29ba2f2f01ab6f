#ifndef SAFEACI_SETUP_HPP
#define SAFEACI_SETUP_HPP

#include "safeaci/config.hpp"
#include "safeaci/harness.hpp"

// Bridges the flat config to the simulator: constructs the plant model,
// barrier, cost, and basis factory, and copies every gain into place.

namespace safeaci {

struct Setup {
    ClosedLoop loop;
    EpisodeConfig episode;
};

// Throws ConfigError for values that parse but make no sense (non-positive
// dt, wrong-length x0, inverted init range, ...).
Setup build_setup(const Config& cfg);

// Parses cost.R for an m-input plant: "identity", a positive scalar c
// (meaning c*I), or m*m comma-separated row-major entries.
Mat parse_control_weight(const Config& cfg, int m);

}  // namespace safeaci

#endif

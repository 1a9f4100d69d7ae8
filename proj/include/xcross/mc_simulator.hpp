#pragma once

#include <cstdint>
#include <optional>

#include "xcross/renewal_model.hpp"

namespace xcross {

struct SimConfig {
    std::int64_t n_paths = 100000;
    std::uint64_t seed = 1;
    double u = 0.0;
    double c = 1.0;
    double t = 1.0;
    ModelSpec model;
    // When set, T1 = v and the estimate is P{v < tau <= t | T1 = v}; ruin at the first
    // claim is then outside the event.
    std::optional<double> conditioning;
};

void validate(const SimConfig& cfg);

struct SimEstimate {
    double p_hat = 0.0;
    double ci_low = 0.0;   // 95% Wilson interval
    double ci_high = 0.0;
    double std_error = 0.0;
    std::int64_t n_ruined = 0;
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
};

struct WilsonInterval {
    double lo;
    double hi;
};
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t n, double z);

inline constexpr double kZ95 = 1.959963984540054;
inline constexpr double kZ99 = 2.5758293035489004;

// Path i draws from its own Philox stream (seed, i), so the estimate depends only on
// (cfg, seed, n_paths), never on how paths are split across threads.
SimEstimate simulate_ruin(const SimConfig& cfg);
SimEstimate simulate_ruin(const SimConfig& cfg, int threads);

// Thread count for parallel work: XCROSS_THREADS if set to a positive integer, otherwise the
// hardware concurrency, and never more than that env cap.
int thread_cap();

}  // namespace xcross

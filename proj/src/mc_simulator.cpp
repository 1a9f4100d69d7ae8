#include "xcross/mc_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "xcross/errors.hpp"
#include "xcross/philox.hpp"

namespace xcross {

namespace {

// Per-path sampler for one law; draws come from the caller's stream.
class Sampler {
public:
    explicit Sampler(const DistSpec& d) : spec_(d) {}

    double operator()(Philox4x32& rng) {
        return std::visit(
            [&](const auto& law) -> double {
                using L = std::decay_t<decltype(law)>;
                if constexpr (std::is_same_v<L, Exponential>) {
                    return -std::log(rng.uniform()) / law.rate;
                } else if constexpr (std::is_same_v<L, Gamma>) {
                    std::gamma_distribution<double> g(law.shape, 1.0 / law.rate);
                    return g(rng);
                } else {
                    return law.value;
                }
            },
            spec_);
    }

private:
    DistSpec spec_;
};

bool path_ruined(const SimConfig& cfg, std::uint64_t path) {
    Philox4x32 rng(cfg.seed, path);
    Sampler first(cfg.model.first_arrival_law());
    Sampler inter(cfg.model.t);
    Sampler claim(cfg.model.y);

    double epoch = cfg.conditioning ? *cfg.conditioning : first(rng);
    double claims = 0.0;
    bool first_jump = true;
    while (epoch <= cfg.t) {
        claims += claim(rng);
        // Conditioned runs estimate P{v < tau <= t | T1 = v}; a crossing at the first claim
        // has tau = v and is outside that event.
        const bool counted = !(first_jump && cfg.conditioning);
        if (cfg.u + cfg.c * epoch - claims < 0.0) return counted;
        first_jump = false;
        epoch += inter(rng);
    }
    return false;
}

double mean_of(const DistSpec& d) {
    return std::visit(
        [](const auto& law) -> double {
            using L = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<L, Exponential>) return 1.0 / law.rate;
            else if constexpr (std::is_same_v<L, Gamma>) return law.shape / law.rate;
            else return law.value;
        },
        d);
}

}  // namespace

void validate(const SimConfig& cfg) {
    if (cfg.n_paths < 1) throw DomainError("simulate_ruin: n_paths must be at least 1");
    if (!std::isfinite(cfg.t)) throw DomainError("simulate_ruin: horizon t must be finite");
    if (!std::isfinite(cfg.u) || !std::isfinite(cfg.c)) throw DomainError("simulate_ruin: u and c must be finite");
    validate(cfg.model.t);
    validate(cfg.model.y);
    if (cfg.model.first_arrival) validate(*cfg.model.first_arrival);
    // A zero-mean inter-arrival law would never let the clock pass t.
    if (!(mean_of(cfg.model.t) > 0.0)) throw DomainError("simulate_ruin: inter-arrival law must have positive mean");
    if (cfg.conditioning) {
        const double v = *cfg.conditioning;
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("simulate_ruin: v must be finite and nonnegative");
        if (!(cfg.t > v)) throw DomainError("simulate_ruin: t must exceed v");
    }
}

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t n, double z) {
    if (n < 1 || successes < 0 || successes > n) throw DomainError("wilson_interval: need 0 <= k <= n, n >= 1");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    // Pin the endpoints at the boundary cases, where rounding could leave p_hat just outside.
    const double lo = successes == 0 ? 0.0 : std::min(p, std::max(0.0, centre - half));
    const double hi = successes == n ? 1.0 : std::max(p, std::min(1.0, centre + half));
    return {lo, hi};
}

int thread_cap() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("XCROSS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, 1024));
    }
    return hw;
}

SimEstimate simulate_ruin(const SimConfig& cfg) { return simulate_ruin(cfg, thread_cap()); }

SimEstimate simulate_ruin(const SimConfig& cfg, int threads) {
    validate(cfg);
    const auto n = cfg.n_paths;
    const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(1, n / 1024)));

    std::vector<std::int64_t> counts(workers, 0);
    auto work = [&](int w) {
        const std::int64_t lo = n * w / workers;
        const std::int64_t hi = n * (w + 1) / workers;
        std::int64_t k = 0;
        for (std::int64_t i = lo; i < hi; ++i) k += path_ruined(cfg, static_cast<std::uint64_t>(i)) ? 1 : 0;
        counts[w] = k;
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    SimEstimate est;
    for (auto k : counts) est.n_ruined += k;
    est.n_paths = n;
    est.seed = cfg.seed;
    est.p_hat = static_cast<double>(est.n_ruined) / static_cast<double>(n);
    est.std_error = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n));
    const auto ci = wilson_interval(est.n_ruined, n, kZ95);
    est.ci_low = ci.lo;
    est.ci_high = ci.hi;
    return est;
}

}  // namespace xcross

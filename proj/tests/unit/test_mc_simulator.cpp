#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "xcross/errors.hpp"
#include "xcross/exact_exponential.hpp"
#include "xcross/mc_simulator.hpp"
#include "xcross/philox.hpp"

using namespace xcross;

TEST(Philox, KnownAnswers) {
    using B = Philox4x32::Block;
    EXPECT_EQ(Philox4x32::generate(B{0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::generate(B{~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}),
              (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsDiffer) {
    Philox4x32 a(1, 0), b(1, 1), c(2, 0);
    const auto x = a(), y = b(), z = c();
    EXPECT_NE(x, y);
    EXPECT_NE(x, z);
    Philox4x32 a2(1, 0);
    EXPECT_EQ(a2(), x);
}

TEST(Philox, UniformOpenInterval) {
    Philox4x32 g(5, 9);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = g.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Wilson, Bounds) {
    const auto w = wilson_interval(0, 100, kZ95);
    EXPECT_EQ(w.lo, 0.0);
    EXPECT_GT(w.hi, 0.0);
    const auto all = wilson_interval(100, 100, kZ95);
    EXPECT_EQ(all.hi, 1.0);
    const auto mid = wilson_interval(30, 100, kZ95);
    EXPECT_NEAR(mid.lo, 0.21894885294932756, 1e-14);
    EXPECT_NEAR(mid.hi, 0.39584854633346667, 1e-14);
    EXPECT_THROW(wilson_interval(3, 2, kZ95), DomainError);
}

TEST(Simulate, ZeroClaimsNeverRuin) {
    SimConfig cfg;
    cfg.n_paths = 5000;
    cfg.u = 0.5;
    cfg.c = 0.1;
    cfg.t = 50.0;
    cfg.model = ModelSpec{Exponential{1.0}, Deterministic{0.0}, std::nullopt};
    const auto e = simulate_ruin(cfg);
    EXPECT_EQ(e.p_hat, 0.0);
    EXPECT_EQ(e.n_ruined, 0);
}

TEST(Simulate, RuinAtFirstClaim) {
    SimConfig cfg;
    cfg.n_paths = 1000;
    cfg.u = 0.0;
    cfg.c = 1e-12;
    cfg.t = 2.0;
    cfg.model = ModelSpec{Deterministic{1.0}, Deterministic{1.0}, std::nullopt};
    const auto e = simulate_ruin(cfg);
    EXPECT_EQ(e.p_hat, 1.0);
    EXPECT_LE(e.ci_low, e.p_hat);
    EXPECT_EQ(e.ci_high, 1.0);
    // Conditioned on T1 = v the crossing at the first claim is outside the event.
    cfg.conditioning = 1.0;
    cfg.t = 1.5;
    EXPECT_EQ(simulate_ruin(cfg).p_hat, 0.0);
}

TEST(Simulate, Validation) {
    SimConfig cfg;
    cfg.t = kInfinity;
    EXPECT_THROW(simulate_ruin(cfg), DomainError);
    cfg.t = 1.0;
    cfg.n_paths = 0;
    EXPECT_THROW(simulate_ruin(cfg), DomainError);
    cfg.n_paths = 10;
    cfg.conditioning = 2.0;
    EXPECT_THROW(simulate_ruin(cfg), DomainError);
    cfg.conditioning.reset();
    cfg.model.t = Deterministic{0.0};
    EXPECT_THROW(simulate_ruin(cfg), DomainError);
}

TEST(Simulate, IndependentOfThreadCount) {
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.seed = 123;
    cfg.u = 5.0;
    cfg.c = 1.3;
    cfg.t = 30.0;
    cfg.model = ModelSpec{Gamma{2.0, 2.0}, Exponential{1.0}, std::nullopt};
    const auto one = simulate_ruin(cfg, 1);
    for (int th : {2, 3, 7}) {
        const auto many = simulate_ruin(cfg, th);
        EXPECT_EQ(one.n_ruined, many.n_ruined) << th;
        EXPECT_EQ(one.p_hat, many.p_hat) << th;
        EXPECT_EQ(one.ci_low, many.ci_low) << th;
    }
    EXPECT_EQ(simulate_ruin(cfg, 1).n_ruined, one.n_ruined);
    EXPECT_EQ(one.seed, 123u);
    EXPECT_LE(one.ci_low, one.p_hat);
    EXPECT_GE(one.ci_high, one.p_hat);
}

TEST(Simulate, ThreadCapFromEnvironment) {
    setenv("XCROSS_THREADS", "3", 1);
    EXPECT_EQ(thread_cap(), 3);
    setenv("XCROSS_THREADS", "junk", 1);
    EXPECT_GE(thread_cap(), 1);
    unsetenv("XCROSS_THREADS");
}

TEST(Simulate, CoverageCalibration) {
    const CrossingQuery q{5.0, 1.5, 0.3, 20.0};
    const double exact = exact_conditional_exp(q, {1.0, 1.0});
    SimConfig cfg;
    cfg.n_paths = 4000;
    cfg.u = q.u;
    cfg.c = q.c;
    cfg.t = q.t;
    cfg.conditioning = q.v;
    int covered = 0;
    for (int s = 0; s < 200; ++s) {
        cfg.seed = 1000 + s;
        const auto e = simulate_ruin(cfg);
        covered += (e.ci_low <= exact && exact <= e.ci_high) ? 1 : 0;
    }
    EXPECT_GE(covered, 180);
}

TEST(Simulate, MonotoneInLevelWithCommonNumbers) {
    SimConfig cfg;
    cfg.n_paths = 100000;
    cfg.seed = 77;
    cfg.c = 1.1;
    cfg.t = 200.0;
    cfg.u = 50.0;
    const auto a = simulate_ruin(cfg);
    cfg.u = 100.0;
    const auto b = simulate_ruin(cfg);
    const double pooled = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
    EXPECT_LE(b.p_hat, a.p_hat + 3.0 * pooled);
}

TEST(Simulate, LongHorizonAgainstExact) {
    const CrossingQuery q{50.0, 1.2, 0.0, 1000.0};
    const double exact = exact_conditional_exp(q, {1.0, 1.0});
    SimConfig cfg;
    cfg.n_paths = 1000000;
    cfg.seed = 42;
    cfg.u = q.u;
    cfg.c = q.c;
    cfg.t = q.t;
    cfg.conditioning = q.v;
    const auto e = simulate_ruin(cfg);
    EXPECT_LE(e.ci_low, exact);
    EXPECT_GE(e.ci_high, exact);
    const auto ci99 = wilson_interval(e.n_ruined, e.n_paths, kZ99);
    EXPECT_LE(ci99.lo, exact);
    EXPECT_GE(ci99.hi, exact);
    const auto series = exact_conditional_series_auto(q, {1.0, 1.0});
    EXPECT_LE(std::abs(series.value - e.p_hat), 3.0 * std::sqrt(series.value * (1 - series.value) / e.n_paths));
}

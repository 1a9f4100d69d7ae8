#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <random>

#include "xcross/errors.hpp"
#include "xcross/renewal_model.hpp"

using namespace xcross;

TEST(Moments, Exponential) {
    const auto m = moments_of(DistSpec{Exponential{1.0}});
    EXPECT_DOUBLE_EQ(m.mean, 1.0);
    EXPECT_DOUBLE_EQ(m.variance, 1.0);
    EXPECT_DOUBLE_EQ(m.mu3, 2.0);
    EXPECT_DOUBLE_EQ(m.raw4, 24.0);
    const auto m2 = moments_of(DistSpec{Exponential{2.0}});
    EXPECT_DOUBLE_EQ(m2.variance, 0.25);
    EXPECT_DOUBLE_EQ(m2.raw4, 1.5);
}

TEST(Moments, Deterministic) {
    const auto m = moments_of(DistSpec{Deterministic{3.0}});
    EXPECT_EQ(m.mean, 3.0);
    EXPECT_EQ(m.variance, 0.0);
    EXPECT_EQ(m.mu3, 0.0);
    EXPECT_EQ(m.raw4, 81.0);
}

TEST(Moments, GammaMatchesQuadrature) {
    const double k = 2.0, rate = 2.0;
    const auto m = moments_of(DistSpec{Gamma{k, rate}});
    EXPECT_DOUBLE_EQ(m.mean, 1.0);
    EXPECT_DOUBLE_EQ(m.variance, 0.5);
    boost::math::quadrature::exp_sinh<double> integrator;
    auto raw = [&](int j) {
        return integrator.integrate([&](double x) {
            return x > 0.0 ? std::exp((j + k - 1) * std::log(x) + k * std::log(rate) - rate * x - std::lgamma(k)) : 0.0;
        });
    };
    const double e1 = raw(1), e2 = raw(2), e3 = raw(3), e4 = raw(4);
    EXPECT_NEAR(m.mean, e1, 1e-12);
    EXPECT_NEAR(m.variance, e2 - e1 * e1, 1e-12);
    EXPECT_NEAR(m.mu3, e3 - 3 * e1 * e2 + 2 * e1 * e1 * e1, 1e-12);
    EXPECT_NEAR(m.raw4, e4, 1e-11);
}

TEST(Moments, Validation) {
    EXPECT_THROW(validate(DistSpec{Exponential{0.0}}), DomainError);
    EXPECT_THROW(validate(DistSpec{Gamma{-1.0, 1.0}}), DomainError);
    MomentSet bad;
    bad.e_y2 = 3.0;
    EXPECT_THROW(validate(bad), DomainError);
    MomentSet bad4;
    bad4.e_t4 = 1.0;
    EXPECT_THROW(validate(bad4), DomainError);
    EXPECT_NO_THROW(validate(MomentSet{}));
}

TEST(DerivedConstants, ExponentialUnitRates) {
    const auto k = derive_constants(moments_of(ModelSpec{}), 1.0);
    EXPECT_DOUBLE_EQ(k.m, 1.0);
    EXPECT_DOUBLE_EQ(k.d2, 2.0);
    EXPECT_DOUBLE_EQ(k.b1, 2.0);
    EXPECT_DOUBLE_EQ(k.b2, 1.0);
    EXPECT_DOUBLE_EQ(k.b3, 1.0);
    EXPECT_DOUBLE_EQ(k.b4, 1.0);
    EXPECT_DOUBLE_EQ(k.k_f, 0.25);
    EXPECT_DOUBLE_EQ(k.k_s, 0.25);
    EXPECT_EQ(k.c_star * k.m, 1.0);
}

TEST(DerivedConstants, DSquaredForEqualRates) {
    for (double lam : {0.5, 1.0, 3.0}) {
        ModelSpec model{Exponential{lam}, Exponential{lam}, std::nullopt};
        EXPECT_NEAR(derive_constants(moments_of(model), 1.0).d2, 2.0 / lam, 1e-15);
    }
}

TEST(DerivedConstants, GammaTExponentialY) {
    ModelSpec model{Gamma{2.0, 2.0}, Exponential{1.0}, std::nullopt};
    const auto k = derive_constants(moments_of(model), 2.0);
    EXPECT_NEAR(k.m, 1.0, 1e-15);
    EXPECT_NEAR(k.d2, 1.5, 1e-15);
    EXPECT_NEAR(k.k_f, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(k.k_s, 1.0 / 9.0, 1e-15);
}

TEST(DerivedConstants, ScaleAsInverseDrift) {
    ModelSpec model{Gamma{2.0, 2.0}, Gamma{3.0, 1.5}, std::nullopt};
    const auto mo = moments_of(model);
    const auto ref = derive_constants(mo, 1.0);
    for (double c : {0.5, 1.0, 2.0, 4.0}) {
        const auto k = derive_constants(mo, c);
        EXPECT_NEAR(k.k_f * c, ref.k_f, 1e-15);
        EXPECT_NEAR(k.k_s * c, ref.k_s, 1e-15);
        EXPECT_EQ(k.drift, c);
    }
}

TEST(DerivedConstants, Errors) {
    ModelSpec det{Deterministic{1.0}, Deterministic{1.0}, std::nullopt};
    for (double c : {0.5, 1.0, 3.0}) EXPECT_THROW(derive_constants(moments_of(det), c), DegenerateModelError);
    EXPECT_THROW(derive_constants(MomentSet{}, 0.0), DomainError);
    EXPECT_THROW(derive_constants(MomentSet{}, -1.0), DomainError);
}

TEST(DerivedConstants, OneVarianceZero) {
    ModelSpec model{Deterministic{1.0}, Exponential{1.0}, std::nullopt};
    const auto k = derive_constants(moments_of(model), 1.0);
    EXPECT_DOUBLE_EQ(k.d2, 1.0);
    EXPECT_TRUE(std::isfinite(k.k_f));
    EXPECT_TRUE(std::isfinite(k.k_s));
}

TEST(DerivedConstants, FromMD2) {
    const auto k = constants_from_md2(1.0, 6.0, 0.0);
    EXPECT_EQ(k.c_star, 1.0);
    EXPECT_TRUE(std::isnan(k.k_f));
    EXPECT_THROW(constants_from_md2(1.0, 0.0, 1.0), DegenerateModelError);
}

TEST(DerivedConstants, SignCorrectedKF) {
    // Exponential unit rates at c = 1: 0.25 - (1/2 + 1/2).
    EXPECT_DOUBLE_EQ(sign_corrected_k_f(MomentSet{}, 1.0), -0.75);
}

TEST(Identities, AllKernelsVanishAtTheMeans) {
    // Exactly representable moments, so every kernel is computed as an exact zero.
    ModelSpec model{Gamma{4.0, 2.0}, Gamma{2.0, 0.5}, std::nullopt};
    const auto mo = moments_of(model);
    const auto k = identity_kernels(mo, 1, mo.e_y, mo.e_t);
    EXPECT_EQ(k.y_n, 0.0);
    EXPECT_EQ(k.t_n, 0.0);
    EXPECT_EQ(k.delta_n, 0.0);
    const auto r = fundamental_identity_residuals(mo, 1, mo.e_y, mo.e_t);
    EXPECT_EQ(r[0], 0.0);
    EXPECT_EQ(r[2], 0.0);
    EXPECT_EQ(r[3], 0.0);
    EXPECT_EQ(r[4], 0.0);
    EXPECT_LT(r[1], 1e-15);
}

TEST(Identities, ExponentialExample) {
    for (double r : fundamental_identity_residuals(MomentSet{}, 10, 12.0, 9.0)) EXPECT_LE(r, 1e-12);
}

TEST(Identities, Randomized) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> shape(0.5, 5.0), rate(0.2, 4.0), frac(0.2, 2.0);
    std::uniform_int_distribution<long> nd(1, 500);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        ModelSpec model{Gamma{shape(gen), rate(gen)}, Gamma{shape(gen), rate(gen)}, std::nullopt};
        const auto mo = moments_of(model);
        const long n = nd(gen);
        const double a = frac(gen) * n * mo.e_y;
        const double b = frac(gen) * n * mo.e_t;
        for (double r : fundamental_identity_residuals(mo, n, a, b)) worst = std::max(worst, r);
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(Identities, Errors) {
    ModelSpec det{Deterministic{1.0}, Exponential{1.0}, std::nullopt};
    EXPECT_THROW(fundamental_identity_residuals(moments_of(det), 3, 1.0, 1.0), DegenerateModelError);
    EXPECT_THROW(fundamental_identity_residuals(MomentSet{}, 0, 1.0, 1.0), DomainError);
}

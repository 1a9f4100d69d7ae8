#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "xcross/errors.hpp"
#include "xcross/quadrature.hpp"
#include "xcross/special_functions.hpp"

using namespace xcross;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(NormalCdf, ReferenceValues) {
    EXPECT_EQ(std_normal_cdf(0.0), 0.5);
    EXPECT_NEAR(std_normal_cdf(1.5811388), 0.94307684755808179864, 1e-15);
    EXPECT_LT(rel(std_normal_cdf(-8.0), 6.2209605742717841235e-16), 1e-14);
    EXPECT_EQ(std_normal_cdf(kInfinity), 1.0);
    EXPECT_EQ(std_normal_cdf(-kInfinity), 0.0);
}

TEST(NormalCdf, DeepTailStaysPositive) {
    EXPECT_GT(std_normal_cdf(-38.0), 0.0);
    EXPECT_LT(rel(std::log(std_normal_cdf(-37.5)), log_std_normal_cdf(-37.5)), 1e-14);
}

TEST(NormalCdf, Symmetry) {
    for (double x = -8.0; x <= 8.0; x += 0.05) EXPECT_NEAR(std_normal_cdf(x) + std_normal_cdf(-x), 1.0, 1e-15) << x;
}

TEST(NormalCdf, DerivativeIsPdf) {
    const double h = 1e-5;
    for (double x = -4.0; x <= 4.0; x += 0.1) {
        const double fd = (std_normal_cdf(x + h) - std_normal_cdf(x - h)) / (2 * h);
        EXPECT_LT(rel(fd, std_normal_pdf(x)), 1e-6) << x;
    }
}

TEST(NormalCdf, Monotone) {
    double prev = 0.0;
    for (double x = -40.0; x <= 9.0; x += 0.01) {
        const double v = std_normal_cdf(x);
        EXPECT_GE(v, prev) << x;
        prev = v;
    }
}

TEST(LogNormalCdf, ReferenceValues) {
    EXPECT_LT(rel(log_std_normal_cdf(-40.0), -804.60844201375378817), 1e-15);
    EXPECT_LT(rel(log_std_normal_cdf(-3.0), -6.6077262215103495433), 1e-14);
    EXPECT_LT(rel(log_std_normal_cdf(6.0), -9.8658764552437573169e-10), 1e-9);
}

TEST(ExpNormalCdf, FusedProduct) {
    EXPECT_LT(rel(exp_normal_cdf(800.0, -40.0), 0.0099673351883013099835), 1e-12);
    EXPECT_LT(rel(exp_normal_cdf(2.0, -2.0), 0.16810200122317060643), 1e-14);
    EXPECT_EQ(exp_normal_cdf(5.0, -kInfinity), 0.0);
    // Neither factor is representable here, the product is.
    EXPECT_TRUE(std::isfinite(exp_normal_cdf(5000.0, -100.0)));
}

TEST(NormalInterval, MatchesDifference) {
    EXPECT_NEAR(normal_interval(-1.0, 2.0), std_normal_cdf(2.0) - std_normal_cdf(-1.0), 3e-16);
    EXPECT_LT(rel(normal_interval(9.0, 10.0), std_normal_cdf(-9.0) - std_normal_cdf(-10.0)), 1e-13);
}

TEST(MillsRatio, ReferenceValues) {
    EXPECT_NEAR(mills_ratio(0.0), 1.2533141373155002512, 1e-15);
    EXPECT_LT(rel(mills_ratio(1.0), 0.65567954241879847154), 1e-14);
    EXPECT_LT(rel(mills_ratio(-3.0), 225.33489622034912058), 1e-14);
    EXPECT_LT(rel(mills_ratio(2.0), 0.42136922928805447322), 1e-14);
    EXPECT_LT(rel(mills_ratio(7.0), 0.1401041834530502416), 1e-14);
    EXPECT_LT(rel(mills_ratio(20.0), 0.049875925981836783658), 1e-14);
    EXPECT_LT(rel(mills_ratio(40.0), 0.024984404205720571147), 1e-14);
    EXPECT_LT(rel(mills_ratio(40.0), 1.0 / 40.0), 1e-3);
}

TEST(MillsRatio, BothSidesOfTheSwitch) {
    EXPECT_LT(rel(mills_ratio(4.999), 0.19284407069824491657), 1e-13);
    EXPECT_LT(rel(mills_ratio(5.001), 0.19277215174310960352), 1e-13);
}

TEST(MillsRatio, InequalityOnGrid) {
    for (int i = -100; i <= 500; ++i) {
        const double x = 0.1 * i;
        const double m = mills_ratio(x);
        EXPECT_GT(m, 0.0) << x;
        EXPECT_GT(1.0 - x * m, 0.0) << x;
    }
}

TEST(BesselI1, ReferenceValues) {
    EXPECT_EQ(bessel_i1(0.0), 0.0);
    const struct {
        double z, plain, scaled;
    } cases[] = {
        {0.5, 0.25789430539089631636, 0.15642080318487169714},
        {1.0, 0.56515910399248502721, 0.20791041534970844887},
        {5.0, 24.335642142450527199, 0.16397226694454235693},
        {14.999, 327807.30174089291353, 0.10037734144948541921},
        {15.001, 328442.85059784060256, 0.10037100893893788363},
        {30.0, 768532038938.95699949, 0.071916330598647554706},
        {100.0, 1.0683693903381624812e42, 0.039744153025130252674},
        {700.0, 1.5285003902339006881e302, 0.015070519444716846949},
    };
    for (const auto& c : cases) {
        EXPECT_LT(rel(bessel_i1(c.z), c.plain), 1e-13) << c.z;
        EXPECT_LT(rel(bessel_i1(c.z, Scaling::exponential), c.scaled), 1e-13) << c.z;
    }
}

TEST(BesselI1, ScaledLargeArgumentsStayFinite) {
    for (double z : {1e3, 1e5, 1e8}) {
        const double s = bessel_i1(z, Scaling::exponential);
        EXPECT_TRUE(std::isfinite(s));
        EXPECT_LT(rel(s, 1.0 / std::sqrt(2.0 * M_PI * z)), 1.0 / z);
    }
}

TEST(BesselI1, SeamAgreement) {
    const double lo = std::nextafter(kBesselI1Switch, 0.0);
    const double hi = std::nextafter(kBesselI1Switch, 100.0);
    EXPECT_LT(rel(bessel_i1(lo), bessel_i1(hi)), 1e-12);
}

TEST(BesselI1, ScaledConsistency) {
    for (double z = 0.1; z <= 30.0; z += 0.37)
        EXPECT_LT(rel(bessel_i1(z, Scaling::exponential) * std::exp(z), bessel_i1(z)), 1e-12) << z;
}

TEST(BesselI1, NegativeArgumentRejected) { EXPECT_THROW(bessel_i1(-1.0), DomainError); }

TEST(BesselK, HalfOrders) {
    EXPECT_LT(rel(bessel_k_half_order(1, 1.0), 0.46106850444789455844), 1e-15);
    EXPECT_LT(rel(bessel_k_half_order(3, 1.0), 0.92213700889578911688), 1e-15);
    EXPECT_LT(rel(bessel_k_half_order(5, 1.0), 3.2274795311352619091), 1e-15);
    for (double z : {0.3, 2.0, 17.0}) {
        EXPECT_EQ(bessel_k_half_order(-3, z), bessel_k_half_order(3, z));
        EXPECT_NEAR(bessel_k_half_order(3, z) / bessel_k_half_order(1, z), 1.0 + 1.0 / z, 1e-15);
    }
}

TEST(BesselK, Errors) {
    EXPECT_THROW(bessel_k_half_order(7, 1.0), UnsupportedError);
    EXPECT_THROW(bessel_k_half_order(2, 1.0), UnsupportedError);
    EXPECT_THROW(bessel_k_half_order(1, 0.0), DomainError);
}

TEST(IncompleteK, ReferenceValues) {
    EXPECT_EQ(incomplete_k_half(1.0, 1.0, {0.7, 0.7}), 0.0);
    EXPECT_LT(rel(incomplete_k_half(1.0, 1.0, {0.0, kInfinity}), 0.46106850444789455844), 1e-14);
    EXPECT_LT(rel(incomplete_k_half(1.0, 1.0, {0.0, 1.0}), 0.30804079052261269247), 1e-12);
    EXPECT_LT(rel(incomplete_k_half(0.3, 2.0, {0.5, 7.0}), 0.6598074703810984788), 1e-12);
}

TEST(IncompleteK, MatchesQuadrature) {
    auto raw = [](double x, double z, double a, double b) {
        auto f = [&](double t) { return std::sqrt(z) / 2 * std::pow(t, -1.5) * std::exp(-(x / 2) * (t + z * z / t)); };
        return integrate(f, {a, b}).value;
    };
    EXPECT_NEAR(incomplete_k_half(1.0, 1.0, {1e-9, 1.0}), raw(1.0, 1.0, 1e-9, 1.0), 1e-10);
    EXPECT_NEAR(incomplete_k_half(2.5, 0.4, {0.1, 3.0}), raw(2.5, 0.4, 0.1, 3.0), 1e-10);
}

TEST(IncompleteK, Additive) {
    for (double x : {0.2, 1.0, 4.0})
        for (double z : {0.5, 1.5}) {
            const double whole = incomplete_k_half(x, z, {0.2, 5.0});
            const double parts = incomplete_k_half(x, z, {0.2, 1.1}) + incomplete_k_half(x, z, {1.1, 5.0});
            EXPECT_NEAR(whole, parts, 1e-12);
        }
}

TEST(IncompleteK, Errors) {
    EXPECT_THROW(incomplete_k_half(1.0, 1.0, {2.0, 1.0}), DomainError);
    EXPECT_THROW(incomplete_k_half(0.0, 1.0, {0.0, 1.0}), DomainError);
}

TEST(Binet, ReferenceValues) {
    EXPECT_EQ(binet_split(0.5, 1.0, {1.3, 1.3}), 0.0);
    EXPECT_LT(rel(binet_split(0.5, 1.0, {0.5, 2.0}), 0.39946311169713081405), 1e-10);
    EXPECT_LT(rel(binet_split(2.0, 0.25, {0.1, 10.0}), 0.92213559839022291937), 1e-10);
    EXPECT_LT(rel(binet_split(1.0, 1.0, {1.5, 3.0}), 0.0071586522857842604217), 1e-10);
    EXPECT_LT(rel(binet_split(0.1, 3.0, {0.2, 1.5}), 0.31100740483093243915), 1e-10);
}

TEST(Binet, RandomTuplesMatchQuadrature) {
    std::mt19937_64 gen(20261014);
    std::uniform_real_distribution<double> lq(std::log(0.05), std::log(5.0));
    std::uniform_real_distribution<double> lr(std::log(0.1), std::log(4.0));
    std::uniform_real_distribution<double> ly(std::log(0.05), std::log(10.0));
    for (int i = 0; i < 100; ++i) {
        const double q = std::exp(lq(gen));
        const double r = std::exp(lr(gen));
        double a = std::exp(ly(gen));
        double b = std::exp(ly(gen));
        if (a > b) std::swap(a, b);
        if (b / a < 1.01) b = a * 1.5;
        auto f = [&](double y) { return std::exp(-q * (y * y + r * r / (y * y))) / (y * y); };
        std::vector<double> pts{a, b};
        if (a < std::sqrt(r) && std::sqrt(r) < b) pts.push_back(std::sqrt(r));
        const auto ref = integrate(f, pts, {.abs_tol = 0.0, .rel_tol = 1e-14});
        const double got = binet_split(q, r, {a, b});
        if (ref.value < 1e-280) continue;
        EXPECT_LT(rel(got, ref.value), 1e-9) << q << " " << r << " " << a << " " << b;
    }
}

TEST(Binet, Errors) {
    EXPECT_THROW(binet_split(0.0, 1.0, {0.5, 2.0}), DomainError);
    EXPECT_THROW(binet_split(1.0, 1.0, {0.0, 2.0}), DomainError);
    EXPECT_THROW(binet_split(1.0, 1.0, {3.0, 2.0}), DomainError);
}

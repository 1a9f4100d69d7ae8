#pragma once

#include <limits>

namespace xcross {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Interval {
    double lo = 0.0;
    double hi = kInfinity;
};

enum class Scaling { none, exponential };

double std_normal_pdf(double x);
double std_normal_cdf(double x);
double log_std_normal_cdf(double x);

// e^s * Phi(x) without forming either factor when it would overflow or underflow.
double exp_normal_cdf(double s, double x);

// Phi(b) - Phi(a) for a <= b, taken on the side of the axis where it does not cancel.
double normal_interval(double a, double b);

// Phi(-x) / phi(x).
double mills_ratio(double x);

// Modified Bessel I1. Power series up to kBesselI1Switch, Hankel asymptotic series above.
inline constexpr double kBesselI1Switch = 15.0;
double bessel_i1(double z, Scaling scaling = Scaling::none);

// K_{n/2}(z) for odd n with |n| in {1, 3, 5}.
double bessel_k_half_order(int order_num, double z);

// (sqrt(z)/2) * int_lo^hi t^{-3/2} exp(-(x/2)(t + z^2/t)) dt.
double incomplete_k_half(double x, double z, Interval range);

// int_lo^hi y^{-2} exp(-q(y^2 + r^2/y^2)) dy via the two Gaussian-kernel antiderivatives.
double binet_split(double q, double r, Interval range);

}  // namespace xcross

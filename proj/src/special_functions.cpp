#include "xcross/special_functions.hpp"

#include <cmath>
#include <numbers>

#include "xcross/errors.hpp"

namespace xcross {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))
constexpr double kSqrtPi = 1.7724538509055160273;

// Modified Lentz evaluation of x + 1/(x + 2/(x + 3/(x + ...))), whose reciprocal is Mi(x).
double mills_continued_fraction(double x) {
    constexpr double tiny = 1e-300;
    double f = x;
    double c = f;
    double d = 0.0;
    for (int n = 1; n < 5000; ++n) {
        d = x + n * d;
        if (d == 0.0) d = tiny;
        c = x + n / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

}  // namespace

double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

double std_normal_cdf(double x) {
    if (std::isnan(x)) return x;
    if (x == kInfinity) return 1.0;
    if (x == -kInfinity) return 0.0;
    if (x < -37.0) return std::exp(log_std_normal_cdf(x));
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

double log_std_normal_cdf(double x) {
    if (std::isnan(x)) return x;
    if (x == kInfinity) return 0.0;
    if (x == -kInfinity) return -kInfinity;
    if (x < -5.0) return std::fma(-0.5 * x, x, -kLogSqrt2Pi) + std::log(mills_continued_fraction(-x));
    if (x > 5.0) return std::log1p(-0.5 * std::erfc(x * std::numbers::sqrt2 / 2.0));
    return std::log(0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0));
}

double exp_normal_cdf(double s, double x) {
    if (std::isnan(s) || std::isnan(x)) return std::nan("");
    if (x == -kInfinity) return 0.0;
    if (x >= -37.0 && std::abs(s) < 700.0) return std::exp(s) * std_normal_cdf(x);
    if (x < -5.0 && std::isfinite(x)) {
        // s - x^2/2 with one rounding, then the slowly varying Mills factor.
        return std::exp(std::fma(-0.5 * x, x, s) - kLogSqrt2Pi) * mills_continued_fraction(-x);
    }
    return std::exp(s + log_std_normal_cdf(x));
}

double normal_interval(double a, double b) {
    if (a > 0.0) return std_normal_cdf(-a) - std_normal_cdf(-b);
    if (b < 0.0) return std_normal_cdf(b) - std_normal_cdf(a);
    return 1.0 - std_normal_cdf(a) - std_normal_cdf(-b);
}

double mills_ratio(double x) {
    if (x > 5.0) return mills_continued_fraction(x);
    // Phi(-x)/phi(x); for x below about -37.7 the true value exceeds the double range.
    return 0.5 * std::erfc(x * std::numbers::sqrt2 / 2.0) * std::exp(std::fma(0.5 * x, x, kLogSqrt2Pi));
}

double bessel_i1(double z, Scaling scaling) {
    if (!(z >= 0.0)) throw DomainError("bessel_i1: argument must be nonnegative");
    if (z == 0.0) return 0.0;
    const bool scaled = scaling == Scaling::exponential;
    if (z <= kBesselI1Switch) {
        const double half = 0.5 * z;
        const double q = half * half;
        double term = half;
        double sum = half;
        for (int k = 1; k < 200; ++k) {
            term *= q / (static_cast<double>(k) * (k + 1));
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return scaled ? sum * std::exp(-z) : sum;
    }
    // Hankel expansion truncated just before the smallest term.
    double term = 1.0;
    double sum = 1.0;
    double smallest = 1.0;
    for (int k = 1; k < 100; ++k) {
        const double m = 2.0 * k - 1.0;
        const double next = term * -(4.0 - m * m) / (8.0 * k * z);
        if (std::abs(next) > smallest) break;
        smallest = std::abs(next);
        term = next;
        sum += term;
    }
    const double scaled_value = sum / std::sqrt(2.0 * std::numbers::pi * z);
    return scaled ? scaled_value : scaled_value * std::exp(z);
}

double bessel_k_half_order(int order_num, double z) {
    const int n = order_num < 0 ? -order_num : order_num;
    if (n != 1 && n != 3 && n != 5) throw UnsupportedError("bessel_k_half_order: order must be 1/2, 3/2 or 5/2");
    if (!(z > 0.0)) throw DomainError("bessel_k_half_order: argument must be positive");
    const double k = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z);
    if (n == 1) return k;
    if (n == 3) return k * (1.0 + 1.0 / z);
    return k * (1.0 + 3.0 / z + 3.0 / (z * z));
}

double incomplete_k_half(double x, double z, Interval range) {
    if (!(x > 0.0) || !(z > 0.0)) throw DomainError("incomplete_k_half: x and z must be positive");
    if (!(range.lo >= 0.0) || !(range.hi >= range.lo)) throw DomainError("incomplete_k_half: invalid range");
    if (range.lo == range.hi) return 0.0;

    // Inverse Gaussian cdf with mean z and shape x*z^2, split into its two Phi terms.
    const double lambda = x * z * z;
    const double xz = x * z;
    auto arg_a = [&](double t) {
        if (t == 0.0) return -kInfinity;
        if (t == kInfinity) return kInfinity;
        return std::sqrt(lambda / t) * (t / z - 1.0);
    };
    auto term_b = [&](double t) {
        if (t == 0.0 || t == kInfinity) return 0.0;
        return exp_normal_cdf(xz, -std::sqrt(lambda / t) * (t / z + 1.0));
    };
    const double pre = std::sqrt(std::numbers::pi / (2.0 * xz));
    const double a_part = std::exp(-xz) * normal_interval(arg_a(range.lo), arg_a(range.hi));
    return pre * (a_part + (term_b(range.hi) - term_b(range.lo)));
}

double binet_split(double q, double r, Interval range) {
    if (!(q > 0.0) || !(r > 0.0)) throw DomainError("binet_split: q and r must be positive");
    if (!(range.lo > 0.0) || !(range.hi >= range.lo) || !std::isfinite(range.hi))
        throw DomainError("binet_split: range must satisfy 0 < lo <= hi < infinity");
    if (range.lo == range.hi) return 0.0;

    const double s2q = std::sqrt(2.0 * q);
    const double alpha = 1.0 / (32.0 * q * std::sqrt(q) * r * r);
    const double beta = 1.0 / (8.0 * std::sqrt(q) * r);
    const double e_minus = std::exp(-2.0 * q * r);
    auto kernel = [&](double y) { return std::exp(-q * (y * y + r * r / (y * y))) / (8.0 * q * r * y); };

    // u = y + r/y antiderivative, times e^{2qr}. sigma picks the root of u^2 - 4r on each side
    // of y = sqrt(r); there sqrt(u^2 - 4r) = |y - r/y|.
    auto u_part = [&](double y, double sigma) {
        const double u = y + r / y;
        const double w = std::abs(y - r / y);
        return -kernel(y) - 2.0 * kSqrtPi * (alpha - beta) * exp_normal_cdf(2.0 * q * r, -s2q * u) +
               sigma * 2.0 * kSqrtPi * alpha * e_minus * std_normal_cdf(-s2q * w);
    };
    // x = y - r/y antiderivative, times e^{-2qr}; the 2*Phi(.) - 1 term is differenced separately.
    auto x_part = [&](double y) {
        const double u = y + r / y;
        return kernel(y) + 2.0 * kSqrtPi * alpha * exp_normal_cdf(2.0 * q * r, -s2q * u);
    };

    const double root = std::sqrt(r);
    double u_sum = 0.0;
    auto u_segment = [&](double a, double b) {
        const double sigma = a >= root ? 1.0 : -1.0;
        u_sum += u_part(b, sigma) - u_part(a, sigma);
    };
    if (range.lo < root && root < range.hi) {
        u_segment(range.lo, root);
        u_segment(root, range.hi);
    } else {
        u_segment(range.lo, range.hi);
    }

    const double xa = range.lo - r / range.lo;
    const double xb = range.hi - r / range.hi;
    const double x_sum = x_part(range.hi) - x_part(range.lo) +
                         kSqrtPi * (alpha + beta) * e_minus * 2.0 * normal_interval(s2q * xa, s2q * xb);
    return 2.0 * u_sum + 2.0 * x_sum;
}

}  // namespace xcross

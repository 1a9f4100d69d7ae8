#include "xcross/gig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "xcross/errors.hpp"
#include "xcross/special_functions.hpp"

namespace xcross {

namespace {

void validate(const GigParams& g) {
    if (!(g.mu > 0.0) || !(g.lambda > 0.0) || !std::isfinite(g.mu) || !std::isfinite(g.lambda))
        throw DomainError("GIG parameters mu and lambda must be positive and finite");
    if (!std::isfinite(g.p)) throw DomainError("GIG order p must be finite");
}

// Only the exact binary values are accepted, so 0.5 - 1e-17 does not sneak into a closed path.
int closed_index(double p) {
    if (p == 0.5) return 0;
    if (p == -0.5) return 1;
    if (p == -1.5) return 2;
    if (p == -2.5) return 3;
    return -1;
}

// -lambda (x - mu)^2 / (2 mu^2 x), the shared exponent after pulling out e^{lambda/mu}.
double centered_exponent(const GigParams& g, double x) {
    const double d = x - g.mu;
    return -g.lambda * d * d / (2.0 * g.mu * g.mu * x);
}

}  // namespace

bool has_closed_cdf(double p) { return closed_index(p) >= 0; }

double gig_pdf(const GigParams& g, double x) {
    validate(g);
    if (!(x > 0.0)) throw DomainError("gig_pdf: x must be positive");
    if (x == kInfinity) return 0.0;
    const double mu = g.mu;
    const double lam = g.lambda;
    const double e = std::exp(centered_exponent(g, x));
    const double root = std::sqrt(lam / (2.0 * std::numbers::pi));
    switch (closed_index(g.p)) {
        case 0:
            return root / mu * std::pow(x, -0.5) * e;
        case 1:
            return root * std::pow(x, -1.5) * e;
        case 2:
            return root * mu * lam / (lam + mu) * std::pow(x, -2.5) * e;
        case 3:
            return root * mu * mu * lam * lam / (lam * lam + 3.0 * lam * mu + 3.0 * mu * mu) * std::pow(x, -3.5) * e;
        default:
            break;
    }
    // General order: normalizer 1 / (2 mu^p K_p(lambda/mu)) with K_p = K_{-p}; the full exponent is the centered one minus lambda/mu.
    const double z = lam / mu;
    const double log_norm = -std::log(2.0) - g.p * std::log(mu) - std::log(std::cyl_bessel_k(std::abs(g.p), z));
    return std::exp(log_norm + (g.p - 1.0) * std::log(x) + centered_exponent(g, x) - z);
}

double gig_cdf_closed(const GigParams& g, double x) {
    validate(g);
    const int idx = closed_index(g.p);
    if (idx < 0) throw UnsupportedError("gig_cdf_closed: order " + std::to_string(g.p) + " has no closed form");
    if (!(x > 0.0)) throw DomainError("gig_cdf_closed: x must be positive");
    if (x == kInfinity) return 1.0;

    const double mu = g.mu;
    const double lam = g.lambda;
    const double s = std::sqrt(lam / x);
    const double a = std_normal_cdf(s * (x / mu - 1.0));
    const double b = exp_normal_cdf(2.0 * lam / mu, -s * (x / mu + 1.0));
    double f = 0.0;
    switch (idx) {
        case 0:
            f = a - b;
            break;
        case 1:
            f = a + b;
            break;
        case 2: {
            const double gterm = std::exp(centered_exponent(g, x));
            f = a - (lam - mu) / (lam + mu) * b + std::sqrt(2.0 * lam) * mu / (std::sqrt(std::numbers::pi * x) * (lam + mu)) * gterm;
            break;
        }
        default: {
            const double gterm = std::exp(centered_exponent(g, x));
            const double q = lam * lam + 3.0 * lam * mu + 3.0 * mu * mu;
            f = a + (lam * lam - 3.0 * lam * mu + 3.0 * mu * mu) / q * b +
                std::sqrt(2.0 * lam) * mu * mu * (lam + 3.0 * x) / (std::sqrt(std::numbers::pi) * q * x * std::sqrt(x)) * gterm;
            break;
        }
    }
    return std::clamp(f, 0.0, 1.0);
}

QuadResult gig_cdf_quadrature(const GigParams& g, double x) {
    validate(g);
    if (!(x > 0.0)) throw DomainError("gig_cdf_quadrature: x must be positive");

    // Unnormalized density, scaled so its peak is O(1).
    const double pm1 = g.p - 1.0;
    const double mode = g.mu * (pm1 * g.mu + std::sqrt(pm1 * pm1 * g.mu * g.mu + g.lambda * g.lambda)) / g.lambda;
    const double log_peak = pm1 * std::log(mode) + centered_exponent(g, mode);
    auto dens = [&](double s) {
        if (s <= 0.0) return 0.0;
        return std::exp(pm1 * std::log(s) + centered_exponent(g, s) - log_peak);
    };

    std::vector<double> pts{0.0, mode};
    for (double f = 0.5; f > 1e-6; f *= 0.5) pts.push_back(mode * f);
    for (double f = 2.0; f < 1e6; f *= 2.0) pts.push_back(mode * f);

    QuadOptions opt;
    opt.abs_tol = 1e-15;
    opt.rel_tol = 1e-14;
    auto total_pts = pts;
    total_pts.push_back(kInfinity);
    const QuadResult total = integrate(dens, total_pts, opt);

    QuadResult out;
    if (x == kInfinity) {
        out.value = 1.0;
    } else {
        std::vector<double> part_pts;
        for (double p : pts)
            if (p < x) part_pts.push_back(p);
        part_pts.push_back(x);
        const QuadResult part = integrate(dens, part_pts, opt);
        out.value = part.value / total.value;
        out.abs_error = (part.abs_error + out.value * total.abs_error) / total.value;
        out.converged = part.converged;
        out.segments = part.segments;
    }
    out.converged = out.converged && total.converged;
    out.segments += total.segments;
    if (!out.converged || out.abs_error > 1e-12)
        throw ConvergenceError("gig_cdf_quadrature did not reach 1e-12", out.value, out.abs_error);
    return out;
}

}  // namespace xcross

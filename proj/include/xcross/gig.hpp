#pragma once

#include "xcross/quadrature.hpp"

namespace xcross {

// Generalized inverse Gaussian law with density proportional to
// x^{p-1} exp(-lambda (x^2 + mu^2) / (2 mu^2 x)).
struct GigParams {
    double mu = 1.0;
    double lambda = 1.0;
    double p = -0.5;
};

// True when p is one of the four orders with closed-form cdfs: 1/2, -1/2, -3/2, -5/2.
bool has_closed_cdf(double p);

double gig_pdf(const GigParams& params, double x);

// Closed-form cdf for the four supported orders. x = +inf gives 1.
double gig_cdf_closed(const GigParams& params, double x);

// Quadrature of the unnormalized density over (0, x] divided by its integral over (0, inf).
// Works for any real p. Throws ConvergenceError if the 1e-12 target is missed.
QuadResult gig_cdf_quadrature(const GigParams& params, double x);

}  // namespace xcross

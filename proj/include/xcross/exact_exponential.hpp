#pragma once

#include "xcross/quadrature.hpp"
#include "xcross/query.hpp"

namespace xcross {

struct ExpModel {
    double rate_t = 1.0;
    double rate_y = 1.0;
};

// P{v < tau <= t | T1 = v} for exponential inter-arrivals and claims, by quadrature of the
// Bessel-I1 product formula in log space. Ruin at the first claim itself (at time v) is not
// part of the event. t = inf is accepted unless the drift is within 1e-8 (relative) of the
// critical value rate_t / rate_y, where the integrand stops decaying geometrically.
double exact_conditional_exp(const CrossingQuery& q, const ExpModel& m);
QuadResult exact_conditional_exp_detail(const CrossingQuery& q, const ExpModel& m);

struct SeriesResult {
    double value = 0.0;
    double tail_bound = 1.0;  // bound on the omitted terms n > n_max
    double quad_error = 0.0;  // summed quadrature error estimates of the kept terms
    int terms = 0;
};

// Same probability as a Poisson-weighted sum of Erlang densities, integrated term by term and
// truncated after n_max terms. Finite t only.
SeriesResult exact_conditional_series(const CrossingQuery& q, const ExpModel& m, int n_max);

// Grows n_max until the tail bound is below tol.
SeriesResult exact_conditional_series_auto(const CrossingQuery& q, const ExpModel& m, double tol = 1e-13);

}  // namespace xcross

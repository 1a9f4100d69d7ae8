#pragma once

#include "xcross/special_functions.hpp"

namespace xcross {

// One conditional first-crossing evaluation: level u, drift c, first arrival at v, horizon t.
// t = kInfinity selects the infinite horizon.
struct CrossingQuery {
    double u = 1.0;
    double c = 1.0;
    double v = 0.0;
    double t = kInfinity;
};

// Throws DomainError unless u > 0, c > 0, v >= 0 and t >= v (t = v is the empty event).
void validate(const CrossingQuery& q);

}  // namespace xcross

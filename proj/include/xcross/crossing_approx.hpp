#pragma once

#include "xcross/quadrature.hpp"
#include "xcross/query.hpp"
#include "xcross/renewal_model.hpp"

namespace xcross {

struct GigReparam {
    double lambda = 0.0;    // (u + cv) / (c^2 D^2)
    double mu_plus = 0.0;   // 1 / (1 - cM) below c_star, NaN otherwise
    double mu_minus = 0.0;  // 1 / (cM - 1) above c_star, NaN otherwise
};
GigReparam gig_reparam(const CrossingQuery& q, const DerivedConstants& k);

// Half-width of the window around c_star, relative to c_star, inside which E0 is integrated
// numerically instead of through its 1/(1 - cM) closed form.
inline constexpr double kBranchWindow = 1e-4;

enum class EvalPath { closed_form, quadrature_fallback };

struct ComponentValue {
    double value = 0.0;
    EvalPath path = EvalPath::closed_form;
};

// E_k = int_0^{c(t-v)/(u+cv)} (1+x)^{-k} phi(x; cM(1+x), c^2 D^2 (1+x)/(u+cv)) dx.
QuadResult elementary_component_quadrature(int k, const CrossingQuery& q, const DerivedConstants& consts);

// Normal-form closed expressions for k = 0..3, valid on both sides of c_star.
ComponentValue elementary_component_closed(int k, const CrossingQuery& q, const DerivedConstants& consts);

// The same components through branch-wise GIG cdf differences (mu_plus below c_star,
// mu_minus above). Undefined at c = c_star exactly.
double elementary_component_gig(int k, const CrossingQuery& q, const DerivedConstants& consts);

// I_M accepts c = 0 and then returns its c -> 0 limit.
double integral_M(const CrossingQuery& q, const DerivedConstants& consts);
double integral_F(const CrossingQuery& q, const DerivedConstants& consts);
double integral_S(const CrossingQuery& q, const DerivedConstants& consts);

QuadResult integral_F_quadrature(const CrossingQuery& q, const DerivedConstants& consts);
QuadResult integral_S_quadrature(const CrossingQuery& q, const DerivedConstants& consts);

struct ApproxTerms {
    double i_m = 0.0;
    double i_f = 0.0;
    double i_s = 0.0;
    double value = 0.0;  // i_m + k_f i_f + k_s i_s
};

// consts must come from derive_constants at q.c.
ApproxTerms approx_terms(const CrossingQuery& q, const DerivedConstants& consts);
double approx_conditional(const CrossingQuery& q, const DerivedConstants& consts);
double approx_conditional_clamped(const CrossingQuery& q, const DerivedConstants& consts);

enum class ConditionalKernel { approximation, exact_exponential };

// P{tau <= t} by integrating the first-claim ruin term and the conditional term over the
// first arrival time. Y must be Exponential or Gamma.
double prob_ruin(double u, double c, double t, const ModelSpec& model,
                 ConditionalKernel kernel = ConditionalKernel::approximation);

}  // namespace xcross

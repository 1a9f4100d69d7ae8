#include "xcross/crossing_approx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "xcross/errors.hpp"
#include "xcross/exact_exponential.hpp"
#include "xcross/gig.hpp"
#include "xcross/special_functions.hpp"

namespace xcross {

void validate(const CrossingQuery& q) {
    if (!(q.u > 0.0) || !std::isfinite(q.u)) throw DomainError("query: u must be positive and finite");
    if (!(q.c > 0.0) || !std::isfinite(q.c)) throw DomainError("query: c must be positive and finite");
    if (!(q.v >= 0.0) || !std::isfinite(q.v)) throw DomainError("query: v must be nonnegative and finite");
    if (!(q.t >= q.v)) throw DomainError("query: t must not be below v");
}

namespace {

void require_md2(const DerivedConstants& k) {
    if (!(k.m > 0.0) || !std::isfinite(k.m)) throw DomainError("constants: M must be positive");
    if (!(k.d2 > 0.0) || !std::isfinite(k.d2)) throw DegenerateModelError("constants: D^2 must be positive");
}

// The pieces every normal-form expression is built from, with s = 1 + x running over [1, X]:
//   A(s) = Phi(sqrt(L/s) (s delta - 1))
//   B(s) = e^{2 L delta} Phi(-sqrt(L/s) (s delta + 1))
//   G(s) = exp(-L (s delta - 1)^2 / (2 s))
// where L = (u+cv)/(c^2 D^2) and delta = 1 - cM.
struct NormalForm {
    double L;
    double delta;
    double X;

    NormalForm(const CrossingQuery& q, const DerivedConstants& k) {
        const double w = q.u + q.c * q.v;
        L = w / (q.c * q.c * k.d2);
        delta = 1.0 - q.c * k.m;
        X = std::isinf(q.t) ? kInfinity : q.c * (q.t - q.v) / w + 1.0;
    }

    bool infinite() const { return std::isinf(X); }
    double arg_a(double s) const { return std::sqrt(L / s) * (s * delta - 1.0); }
    double b(double s) const { return exp_normal_cdf(2.0 * L * delta, -std::sqrt(L / s) * (s * delta + 1.0)); }
    double g(double s) const {
        const double d = s * delta - 1.0;
        return std::exp(-L * d * d / (2.0 * s));
    }

    // A(X) - A(1) without cancellation between two values close to 1.
    double diff_a() const {
        const double a1 = arg_a(1.0);
        if (!infinite()) return normal_interval(a1, arg_a(X));
        if (delta > 0.0) return std_normal_cdf(-a1);
        if (delta < 0.0) return -std_normal_cdf(a1);
        return 0.5 - std_normal_cdf(a1);
    }
    double diff_b() const {
        double bx;
        if (!infinite())
            bx = b(X);
        else if (delta > 0.0)
            bx = 0.0;
        else if (delta < 0.0)
            bx = std::exp(2.0 * L * delta);
        else
            bx = 0.5;
        return bx - b(1.0);
    }
    // h(X) G(X) - h(1) G(1); the X term vanishes at the infinite horizon.
    template <class H>
    double diff_g(H h) const {
        const double upper = infinite() ? 0.0 : h(X) * g(X);
        return upper - h(1.0) * g(1.0);
    }
};

double pdf_normal(double x, double mean, double var) {
    const double d = x - mean;
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

// Breakpoints in x covering the density's peak at s = 1/|delta| and its decades of scale.
std::vector<double> crossing_points(const NormalForm& nf, double x_end) {
    const double ad = std::abs(nf.delta);
    const double s_peak = ad > 0.0 ? 1.0 / ad : kInfinity;
    const double width = std::isfinite(s_peak) ? std::pow(s_peak, 1.5) / std::sqrt(nf.L) : 1.0;

    std::vector<double> pts{0.0, x_end};
    const double x0 = std::min(1.0, width) / 16.0;
    for (double x = x0; x < x_end; x *= 2.0) pts.push_back(x);
    if (std::isfinite(s_peak)) {
        const double xp = s_peak - 1.0;
        for (double j : {-40.0, -20.0, -10.0, -6.0, -3.0, -1.5, 0.0, 1.5, 3.0, 6.0, 10.0, 20.0, 40.0}) {
            const double x = xp + j * width;
            if (x > 0.0 && x < x_end) pts.push_back(x);
        }
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

// Upper x limit of the integration: the horizon, or for t = inf the point past which the
// integrand is below e^{-100} of its peak.
double x_upper(const NormalForm& nf) {
    if (!nf.infinite()) return nf.X - 1.0;
    const double ad = std::abs(nf.delta);
    if (ad == 0.0) return 1e60;
    const double s_peak = 1.0 / ad;
    const double width = std::pow(s_peak, 1.5) / std::sqrt(nf.L);
    return std::max(s_peak + 80.0 * width, 2.0 * s_peak + 400.0 / (nf.L * ad * ad));
}

template <class W>
QuadResult crossing_quadrature(const CrossingQuery& q, const DerivedConstants& k, W weight) {
    const NormalForm nf(q, k);
    const double x_end = x_upper(nf);
    const double w = q.u + q.c * q.v;
    const double cm = q.c * k.m;
    const double var_scale = q.c * q.c * k.d2 / w;
    auto f = [&](double x) {
        const double s = 1.0 + x;
        return weight(x, s) * pdf_normal(x, cm * s, var_scale * s);
    };
    QuadOptions opt;
    opt.abs_tol = 2e-13;
    opt.rel_tol = 1e-14;
    opt.max_segments = 20000;
    QuadResult r = integrate(f, crossing_points(nf, x_end), opt);
    // Converged means within 1e-11 absolute, or 1e-13 relative for large values such as E0 near c_star.
    r.converged = std::isfinite(r.value) && r.abs_error <= std::max(1e-11, 1e-13 * std::abs(r.value));
    return r;
}

void check_k(int k) {
    if (k < 0) throw DomainError("elementary component index must be nonnegative");
}

}  // namespace

GigReparam gig_reparam(const CrossingQuery& q, const DerivedConstants& k) {
    validate(q);
    require_md2(k);
    const NormalForm nf(q, k);
    const double nan = std::nan("");
    return {nf.L, nf.delta > 0.0 ? 1.0 / nf.delta : nan, nf.delta < 0.0 ? -1.0 / nf.delta : nan};
}

QuadResult elementary_component_quadrature(int k, const CrossingQuery& q, const DerivedConstants& consts) {
    check_k(k);
    validate(q);
    require_md2(consts);
    if (q.t == q.v) return {};
    QuadResult r = crossing_quadrature(q, consts, [k](double, double s) { return std::pow(s, -k); });
    if (!r.converged)
        throw ConvergenceError("elementary_component_quadrature: E" + std::to_string(k) + " did not converge", r.value,
                               r.abs_error);
    return r;
}

ComponentValue elementary_component_closed(int k, const CrossingQuery& q, const DerivedConstants& consts) {
    check_k(k);
    if (k > 3) throw UnsupportedError("elementary_component_closed: no closed form for k > 3");
    validate(q);
    require_md2(consts);
    if (q.t == q.v) return {};

    const NormalForm nf(q, consts);
    const double L = nf.L;
    const double d = nf.delta;
    const double da = nf.diff_a();
    const double db = nf.diff_b();
    switch (k) {
        case 0: {
            if (std::abs(d) < kBranchWindow) {
                if (d == 0.0 && nf.infinite()) return {kInfinity, EvalPath::quadrature_fallback};
                return {elementary_component_quadrature(0, q, consts).value, EvalPath::quadrature_fallback};
            }
            return {(da - db) / d, EvalPath::closed_form};
        }
        case 1:
            return {da + db, EvalPath::closed_form};
        case 2: {
            const double gterm = nf.diff_g([](double s) { return 1.0 / std::sqrt(s); });
            return {(d + 1.0 / L) * da - (L * d - 1.0) / L * db + std::sqrt(2.0 / (std::numbers::pi * L)) * gterm,
                    EvalPath::closed_form};
        }
        default: {
            // Multiplying the bracket through by its prefactor removes every 1/(1 - cM) factor.
            const double qq = L * L * d * d + 3.0 * L * d + 3.0;
            const double qb = L * L * d * d - 3.0 * L * d + 3.0;
            const double gterm = nf.diff_g([L](double s) { return (L + 3.0 * s) / (s * std::sqrt(s)); });
            return {qq / (L * L) * da + qb / (L * L) * db + std::sqrt(2.0 * L / std::numbers::pi) / (L * L) * gterm,
                    EvalPath::closed_form};
        }
    }
}

double elementary_component_gig(int k, const CrossingQuery& q, const DerivedConstants& consts) {
    check_k(k);
    if (k > 3) throw UnsupportedError("elementary_component_gig: no closed form for k > 3");
    validate(q);
    require_md2(consts);
    const NormalForm nf(q, consts);
    if (nf.delta == 0.0) throw DomainError("elementary_component_gig: undefined at c = c_star");
    if (q.t == q.v) return 0.0;

    const bool below = nf.delta > 0.0;
    const double mu = below ? 1.0 / nf.delta : -1.0 / nf.delta;
    const double L = nf.L;
    const double damp = below ? 1.0 : std::exp(-2.0 * L / mu);
    static constexpr double orders[4] = {0.5, -0.5, -1.5, -2.5};
    const GigParams g{mu, L, orders[k]};
    const double diff = gig_cdf_closed(g, nf.X) - gig_cdf_closed(g, 1.0);
    double pre = 1.0;
    if (k == 0) pre = mu;
    if (k == 2) pre = (L + mu) / (mu * L);
    if (k == 3) pre = (L * L + 3.0 * L * mu + 3.0 * mu * mu) / (mu * mu * L * L);
    return pre * damp * diff;
}

double integral_M(const CrossingQuery& q, const DerivedConstants& consts) {
    require_md2(consts);
    if (q.c == 0.0) {
        CrossingQuery probe = q;
        probe.c = 1.0;
        validate(probe);
        const double sd = std::sqrt(consts.d2 * q.u);
        const double hi = std::isinf(q.t) ? kInfinity : (q.t - q.v - consts.m * q.u) / sd;
        return normal_interval(-consts.m * q.u / sd, hi);
    }
    validate(q);
    if (q.t == q.v) return 0.0;
    const NormalForm nf(q, consts);
    if (std::abs(nf.delta) <= 4.0 * std::numeric_limits<double>::epsilon()) {
        // At c_star both Phi terms coincide: 2[Phi(sqrt(L)) - Phi(sqrt(L/X))].
        const double lo = nf.infinite() ? 0.0 : std::sqrt(nf.L / nf.X);
        return 2.0 * normal_interval(lo, std::sqrt(nf.L));
    }
    return elementary_component_closed(1, q, consts).value;
}

double integral_F(const CrossingQuery& q, const DerivedConstants& consts) {
    validate(q);
    require_md2(consts);
    if (q.t == q.v) return 0.0;
    const NormalForm nf(q, consts);
    const double L = nf.L;
    const double da = nf.diff_a();
    const double db = nf.diff_b();
    const double gterm = nf.diff_g([](double s) { return 1.0 / std::sqrt(s); });
    return -(da + db) / L + 2.0 * nf.delta * db - std::sqrt(2.0 / (std::numbers::pi * L)) * gterm;
}

double integral_S(const CrossingQuery& q, const DerivedConstants& consts) {
    validate(q);
    require_md2(consts);
    if (q.t == q.v) return 0.0;
    const NormalForm nf(q, consts);
    const double L = nf.L;
    const double d = nf.delta;
    const double da = nf.diff_a();
    const double db = nf.diff_b();
    const double gterm =
        nf.diff_g([L, d](double s) { return (3.0 * (1.0 - L * d) * s + L) / (s * std::sqrt(s)); });
    return -3.0 * (da + db) / L + 2.0 * d * (3.0 - 4.0 * L * d) * db - std::sqrt(2.0 / (std::numbers::pi * L)) * gterm;
}

QuadResult integral_F_quadrature(const CrossingQuery& q, const DerivedConstants& consts) {
    validate(q);
    require_md2(consts);
    if (q.t == q.v) return {};
    const double cm = q.c * consts.m;
    QuadResult r = crossing_quadrature(q, consts, [cm](double x, double s) { return (x - cm * s) / (s * s); });
    if (!r.converged) throw ConvergenceError("integral_F_quadrature did not converge", r.value, r.abs_error);
    return r;
}

QuadResult integral_S_quadrature(const CrossingQuery& q, const DerivedConstants& consts) {
    validate(q);
    require_md2(consts);
    if (q.t == q.v) return {};
    const double cm = q.c * consts.m;
    const double scale = (q.u + q.c * q.v) / (q.c * q.c * consts.d2);
    QuadResult r = crossing_quadrature(q, consts, [cm, scale](double x, double s) {
        const double z = (x - cm * s) / s;
        return scale * z * z * z;
    });
    if (!r.converged) throw ConvergenceError("integral_S_quadrature did not converge", r.value, r.abs_error);
    return r;
}

ApproxTerms approx_terms(const CrossingQuery& q, const DerivedConstants& consts) {
    validate(q);
    if (!std::isfinite(consts.k_f) || !std::isfinite(consts.k_s))
        throw UnsupportedError("approx: K_F and K_S are unknown (moments give only M and D^2)");
    if (std::abs(consts.drift - q.c) > 1e-12 * q.c)
        throw std::invalid_argument("approx: constants were derived for c = " + std::to_string(consts.drift) +
                                    ", query has c = " + std::to_string(q.c));
    ApproxTerms a;
    a.i_m = integral_M(q, consts);
    a.i_f = integral_F(q, consts);
    a.i_s = integral_S(q, consts);
    a.value = a.i_m + consts.k_f * a.i_f + consts.k_s * a.i_s;
    return a;
}

double approx_conditional(const CrossingQuery& q, const DerivedConstants& consts) {
    return approx_terms(q, consts).value;
}

double approx_conditional_clamped(const CrossingQuery& q, const DerivedConstants& consts) {
    return std::clamp(approx_conditional(q, consts), 0.0, 1.0);
}

namespace {

double claim_survival(const DistSpec& y, double level) {
    if (level < 0.0) return 1.0;
    if (const auto* e = std::get_if<Exponential>(&y)) return std::exp(-e->rate * level);
    if (const auto* g = std::get_if<Gamma>(&y)) return boost::math::gamma_q(g->shape, g->rate * level);
    throw UnsupportedError("prob_ruin: claim law needs a closed-form survival function (Exponential or Gamma)");
}

double arrival_density(const DistSpec& d, double v) {
    if (const auto* e = std::get_if<Exponential>(&d)) return e->rate * std::exp(-e->rate * v);
    const auto& g = std::get<Gamma>(d);
    if (v <= 0.0) return g.shape < 1.0 ? kInfinity : (g.shape == 1.0 ? g.rate : 0.0);
    return g.rate * boost::math::gamma_p_derivative(g.shape, g.rate * v);
}

// Point past which the first-arrival law has less than 1e-14 of its mass.
double arrival_cutoff(const DistSpec& d) {
    if (const auto* e = std::get_if<Exponential>(&d)) return -std::log(1e-14) / e->rate;
    const auto& g = std::get<Gamma>(d);
    return boost::math::gamma_q_inv(g.shape, 1e-14) / g.rate;
}

}  // namespace

double prob_ruin(double u, double c, double t, const ModelSpec& model, ConditionalKernel kernel) {
    if (!(u > 0.0) || !(c > 0.0) || !std::isfinite(u) || !std::isfinite(c))
        throw DomainError("prob_ruin: u and c must be positive");
    if (!(t >= 0.0)) throw DomainError("prob_ruin: t must be nonnegative");
    validate(model.t);
    validate(model.y);
    const DistSpec& first = model.first_arrival_law();
    validate(first);
    claim_survival(model.y, 0.0);
    if (t == 0.0) return 0.0;

    DerivedConstants consts;
    ExpModel em;
    if (kernel == ConditionalKernel::approximation) {
        consts = derive_constants(moments_of(model), c);
    } else {
        const auto* et = std::get_if<Exponential>(&model.t);
        const auto* ey = std::get_if<Exponential>(&model.y);
        if (!et || !ey) throw UnsupportedError("prob_ruin: the exact kernel needs exponential T and Y");
        em = ExpModel{et->rate, ey->rate};
    }
    auto conditional = [&](double v) {
        if (v >= t) return 0.0;
        const CrossingQuery q{u, c, v, t};
        return kernel == ConditionalKernel::approximation ? approx_conditional(q, consts) : exact_conditional_exp(q, em);
    };
    auto integrand = [&](double v) { return claim_survival(model.y, u + c * v) + conditional(v); };

    double p = 0.0;
    if (const auto* det = std::get_if<Deterministic>(&first)) {
        p = det->value <= t ? integrand(det->value) : 0.0;
    } else {
        const double v_end = std::min(t, arrival_cutoff(first));
        std::vector<double> pts{0.0, v_end};
        const double scale = moments_of(first).mean;
        for (double f : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0})
            if (f * scale < v_end) pts.push_back(f * scale);
        if (u / c < v_end) pts.push_back(u / c);
        QuadOptions opt;
        opt.abs_tol = 1e-8;
        opt.max_segments = 400;
        const QuadResult r = integrate([&](double v) { return integrand(v) * arrival_density(first, v); }, pts, opt);
        if (!r.converged) throw ConvergenceError("prob_ruin: outer quadrature did not converge", r.value, r.abs_error);
        p = r.value;
    }
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace xcross

#include "xcross/renewal_model.hpp"

#include <cmath>
#include <sstream>

#include "xcross/errors.hpp"

namespace xcross {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

void validate(const DistSpec& d) {
    std::visit(overloaded{
                   [](const Exponential& e) {
                       if (!positive_finite(e.rate)) throw DomainError("exponential rate must be positive");
                   },
                   [](const Gamma& g) {
                       if (!positive_finite(g.shape) || !positive_finite(g.rate))
                           throw DomainError("gamma shape and rate must be positive");
                   },
                   [](const Deterministic& c) {
                       if (!(c.value >= 0.0) || !std::isfinite(c.value))
                           throw DomainError("deterministic value must be finite and nonnegative");
                   },
               },
               d);
}

std::string describe(const DistSpec& d) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Exponential& e) { os << "Exponential(rate=" << e.rate << ")"; },
                   [&](const Gamma& g) { os << "Gamma(shape=" << g.shape << ", rate=" << g.rate << ")"; },
                   [&](const Deterministic& c) { os << "Deterministic(" << c.value << ")"; },
               },
               d);
    return os.str();
}

MomentSet MomentSet::from(const VariableMoments& t, const VariableMoments& y) {
    MomentSet m;
    m.e_t = t.mean;
    m.var_t = t.variance;
    m.mu3_t = t.mu3;
    m.e_t4 = t.raw4;
    m.e_y = y.mean;
    m.var_y = y.variance;
    m.mu3_y = y.mu3;
    m.e_y4 = y.raw4;
    m.e_y2 = y.variance + y.mean * y.mean;
    return m;
}

void validate(const MomentSet& m) {
    if (!positive_finite(m.e_t) || !positive_finite(m.e_y)) throw DomainError("moments: means must be positive");
    if (!(m.var_t >= 0.0) || !(m.var_y >= 0.0) || !std::isfinite(m.var_t) || !std::isfinite(m.var_y))
        throw DomainError("moments: variances must be nonnegative and finite");
    if (!std::isfinite(m.mu3_t) || !std::isfinite(m.mu3_y)) throw DomainError("moments: third moments must be finite");
    const double ey2 = m.var_y + m.e_y * m.e_y;
    if (std::abs(m.e_y2 - ey2) > 1e-12 * ey2) throw DomainError("moments: e_y2 must equal var_y + e_y^2");
    const double et2 = m.var_t + m.e_t * m.e_t;
    const double slack = 1.0 - 1e-12;
    if (!std::isfinite(m.e_t4) || !std::isfinite(m.e_y4) || m.e_t4 < slack * et2 * et2 || m.e_y4 < slack * ey2 * ey2)
        throw DomainError("moments: fourth moments must be finite and at least the squared second moment");
}

VariableMoments moments_of(const DistSpec& d) {
    validate(d);
    return std::visit(overloaded{
                          [](const Exponential& e) {
                              const double s = 1.0 / e.rate;
                              return VariableMoments{s, s * s, 2.0 * s * s * s, 24.0 * s * s * s * s};
                          },
                          [](const Gamma& g) {
                              const double k = g.shape;
                              const double s = 1.0 / g.rate;
                              return VariableMoments{k * s, k * s * s, 2.0 * k * s * s * s,
                                                     k * (k + 1.0) * (k + 2.0) * (k + 3.0) * s * s * s * s};
                          },
                          [](const Deterministic& c) {
                              const double a = c.value;
                              return VariableMoments{a, 0.0, 0.0, a * a * a * a};
                          },
                      },
                      d);
}

MomentSet moments_of(const ModelSpec& model) {
    return MomentSet::from(moments_of(model.t), moments_of(model.y));
}

DerivedConstants derive_constants(const MomentSet& mo, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("derive_constants: drift c must be positive");
    validate(mo);
    const double et = mo.e_t;
    const double ey = mo.e_y;
    const double dt = mo.var_t;
    const double dy = mo.var_y;

    DerivedConstants k;
    k.drift = c;
    k.m = et / ey;
    k.b1 = et * et * dy + ey * ey * dt;
    k.b2 = ey * dt;
    k.b3 = et * dy;
    k.b4 = dy * dt;
    k.d2 = k.b1 / (ey * ey * ey);
    if (!(k.d2 > 0.0)) throw DegenerateModelError("derive_constants: D^2 = 0 (both variances vanish)");
    k.c_star = ey / et;

    const double d2 = k.d2;
    // A vanishing variance comes with a vanishing third moment; that skewness term is then absent.
    const double skew_t = dt > 0.0 ? mo.mu3_t / (2.0 * c * d2 * dt) * (et * et * dy / (d2 * ey * ey * ey) - 1.0) : 0.0;
    const double skew_y = dy > 0.0 ? et * mo.mu3_y / (2.0 * c * d2 * ey * dy) * (dt / (d2 * ey) - 1.0) : 0.0;
    k.k_f = skew_t - skew_y + et / (2.0 * c * d2);
    k.k_s = mo.mu3_t / (6.0 * c * d2 * d2 * ey) - et * et * et * mo.mu3_y / (6.0 * c * d2 * d2 * ey * ey * ey * ey) +
            et * dy / (2.0 * c * d2 * ey * ey);
    return k;
}

DerivedConstants constants_from_md2(double m, double d2, double c) {
    if (!positive_finite(m)) throw DomainError("constants_from_md2: M must be positive");
    if (!(d2 > 0.0) || !std::isfinite(d2)) throw DegenerateModelError("constants_from_md2: D^2 must be positive");
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("constants_from_md2: drift must be nonnegative");
    const double nan = std::nan("");
    DerivedConstants k;
    k.m = m;
    k.d2 = d2;
    k.b1 = k.b2 = k.b3 = k.b4 = nan;
    k.k_f = k.k_s = nan;
    k.c_star = 1.0 / m;
    k.drift = c;
    return k;
}

double sign_corrected_k_f(const MomentSet& mo, double c) {
    const DerivedConstants k = derive_constants(mo, c);
    return k.k_f - (mo.e_t * mo.var_y / (c * k.d2 * mo.e_y * mo.e_y) + mo.e_t / (c * k.d2));
}

IdentityKernels identity_kernels(const MomentSet& mo, long n, double a, double b) {
    if (n < 1) throw DomainError("identity kernels need n >= 1");
    if (!(mo.var_t > 0.0) || !(mo.var_y > 0.0)) throw DegenerateModelError("identity kernels need positive variances");
    const double nn = static_cast<double>(n);
    const double b1 = mo.e_t * mo.e_t * mo.var_y + mo.e_y * mo.e_y * mo.var_t;
    const double b2 = mo.e_y * mo.var_t;
    const double b3 = mo.e_t * mo.var_y;
    const double b4 = mo.var_y * mo.var_t;
    return {
        (a - nn * mo.e_y) / std::sqrt(nn * mo.var_y),
        (b - nn * mo.e_t) / std::sqrt(nn * mo.var_t),
        (b * mo.e_y - a * mo.e_t) / std::sqrt(b1 * nn),
        (b1 * nn - (b2 * a + b3 * b)) / std::sqrt(b1 * b4 * nn),
    };
}

std::array<double, 5> fundamental_identity_residuals(const MomentSet& mo, long n, double a, double b) {
    if (!(a >= 0.0)) throw DomainError("fundamental identities need a >= 0");
    const IdentityKernels k = identity_kernels(mo, n, a, b);
    const IdentityKernels k1 = identity_kernels(mo, n + 1, a, b);
    const double nn = static_cast<double>(n);
    const double b1 = mo.e_t * mo.e_t * mo.var_y + mo.e_y * mo.e_y * mo.var_t;
    const double b2 = mo.e_y * mo.var_t;
    const double b3 = mo.e_t * mo.var_y;
    const double b4 = mo.var_y * mo.var_t;
    const double root = std::sqrt(b1 * nn);

    std::array<double, 5> r{};
    r[0] = std::abs(k.y_n * k.y_n + k.t_n * k.t_n - k.delta_n * k.delta_n - k.lambda_n * k.lambda_n);
    r[1] = std::abs(k1.lambda_n - k.lambda_n - std::sqrt(b1 / (b4 * nn)) - k1.lambda_n * (1.0 - std::sqrt(1.0 + 1.0 / nn)));
    const double rn = (std::sqrt(b4) * k.lambda_n + b3 / mo.e_y * k.delta_n) / root;
    const double ratio = a / (nn * mo.e_y);
    r[2] = std::abs(1.0 - ratio - rn);
    r[3] = std::abs(1.0 - std::sqrt(ratio) - rn / (1.0 + std::sqrt(ratio)));
    r[4] = std::abs(1.0 - b / (nn * mo.e_t) - (std::sqrt(b4) * k.lambda_n - b2 / mo.e_t * k.delta_n) / root);
    return r;
}

}  // namespace xcross

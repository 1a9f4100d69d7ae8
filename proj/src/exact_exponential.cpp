#include "xcross/exact_exponential.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "xcross/errors.hpp"
#include "xcross/special_functions.hpp"

namespace xcross {

namespace {

void validate(const ExpModel& m) {
    if (!(m.rate_t > 0.0) || !(m.rate_y > 0.0) || !std::isfinite(m.rate_t) || !std::isfinite(m.rate_y))
        throw DomainError("exponential model: rates must be positive and finite");
}

// log of the integrand over y = z - v in [0, t - v].
struct LogIntegrand {
    double k;       // rate_y * rate_t * c
    double w;       // v + u/c
    double decay;   // rate_y * c + rate_t
    double log_pre; // log(sqrt(k) w) - rate_y (u + c v)

    LogIntegrand(const CrossingQuery& q, const ExpModel& m) {
        k = m.rate_y * m.rate_t * q.c;
        w = q.v + q.u / q.c;
        decay = m.rate_y * q.c + m.rate_t;
        log_pre = std::log(std::sqrt(k) * w) - m.rate_y * (q.u + q.c * q.v);
    }

    double operator()(double y) const {
        const double p = (y + w) * y;
        if (!(p > 1e-280)) return log_pre + 0.5 * std::log(k);  // I1(z)/sqrt(p) -> sqrt(k) as y -> 0
        const double z = 2.0 * std::sqrt(k * p);
        return log_pre + z - decay * y + std::log(bessel_i1(z, Scaling::exponential)) - 0.5 * std::log(p);
    }
};

// Breakpoints for a unimodal-ish integrand on [0, end]: a doubling ladder plus a fine
// linear split of the ladder cells next to the largest sampled value.
template <class LogF>
std::vector<double> peak_points(const LogF& h, double end) {
    std::vector<double> ladder{0.0};
    const double y0 = std::min(1e-3, end / 64.0);
    for (double y = y0; y < end; y *= 2.0) ladder.push_back(y);
    ladder.push_back(end);
    std::size_t best = 1;
    double best_h = -kInfinity;
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        const double hv = h(ladder[i]);
        if (hv > best_h) {
            best_h = hv;
            best = i;
        }
    }
    std::vector<double> pts = ladder;
    const std::size_t lo = best > 1 ? best - 1 : 0;
    const std::size_t hi = std::min(ladder.size() - 1, best + 1);
    for (std::size_t i = lo; i < hi; ++i)
        for (int j = 1; j < 32; ++j) pts.push_back(ladder[i] + (ladder[i + 1] - ladder[i]) * j / 32.0);
    std::sort(pts.begin(), pts.end());
    return pts;
}

// Upper limit for the infinite horizon: far enough past the peak that the remaining mass,
// bounded through the local decay rate, is below 1e-14.
double infinite_horizon_end(const LogIntegrand& h, double gap) {
    double y = std::max(1.0, h.w);
    double prev = h(y / 2.0);
    for (int i = 0; i < 200; ++i) {
        const double hv = h(y);
        const double slope = (h(y * 1.01) - hv) / (0.01 * y);
        if (hv < prev && slope < -0.5 * gap && hv - std::log(-slope) < std::log(1e-14)) return y;
        prev = hv;
        y *= 2.0;
    }
    throw ConvergenceError("exact_conditional_exp: could not bound the infinite-horizon tail", 0.0, kInfinity);
}

// Omitted terms n > n_max: Pois(n; ly s) <= Pois(n; ly s_max) once n exceeds ly s_max, the
// Erlang mass on [0, span] is P{Poisson(lt span) >= n}, and both fall geometrically in n.
double series_tail_bound(const CrossingQuery& q, const ExpModel& m, int n_max) {
    const double span = q.t - q.v;
    if (span == 0.0) return 0.0;
    const double lambda_max = m.rate_y * (q.u + q.c * q.t);
    const double n1 = n_max + 1.0;
    const double rho = lambda_max / (n1 + 1.0);
    if (!(n1 > lambda_max) || !(rho < 1.0)) return 1.0;
    const double pois = std::exp(-lambda_max + n1 * std::log(lambda_max) - std::lgamma(n1 + 1.0));
    const double erlang_mass = boost::math::gamma_p(n1, m.rate_t * span);
    return std::min(1.0, pois * erlang_mass / (1.0 - rho));
}

}  // namespace

QuadResult exact_conditional_exp_detail(const CrossingQuery& q, const ExpModel& m) {
    validate(q);
    validate(m);
    if (q.t == q.v) return {};
    const LogIntegrand h(q, m);

    double end = q.t - q.v;
    if (std::isinf(q.t)) {
        const double a = std::sqrt(m.rate_y * q.c);
        const double b = std::sqrt(m.rate_t);
        const double gap = (a - b) * (a - b);
        if (!(gap > 1e-8 * h.decay))
            throw UnsupportedError("exact_conditional_exp: infinite horizon at (near-)critical drift");
        end = infinite_horizon_end(h, gap);
    }

    QuadOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-14;
    opt.max_segments = 20000;
    QuadResult r = integrate([&](double y) { return std::exp(h(y)); }, peak_points(h, end), opt);
    r.converged = r.converged || r.abs_error <= 1e-12;
    if (!r.converged)
        throw ConvergenceError("exact_conditional_exp: quadrature did not converge", r.value, r.abs_error);
    r.value = std::clamp(r.value, 0.0, 1.0);
    return r;
}

double exact_conditional_exp(const CrossingQuery& q, const ExpModel& m) {
    return exact_conditional_exp_detail(q, m).value;
}

SeriesResult exact_conditional_series(const CrossingQuery& q, const ExpModel& m, int n_max) {
    validate(q);
    validate(m);
    if (std::isinf(q.t)) throw UnsupportedError("exact_conditional_series: finite horizon only");
    if (n_max < 0) throw DomainError("exact_conditional_series: n_max must be nonnegative");

    const double lt = m.rate_t;
    const double ly = m.rate_y;
    const double w0 = q.u + q.c * q.v;
    const double span = q.t - q.v;

    SeriesResult out;
    if (span > 0.0) {
        QuadOptions opt;
        opt.abs_tol = 1e-16;
        opt.rel_tol = 1e-13;
        for (int n = 1; n <= n_max; ++n) {
            const double nn = n;
            const double lg_n1 = std::lgamma(nn + 1.0);
            const double lg_n = std::lgamma(nn);
            // (w0/s) Pois(n; ly s) Erlang_n(y; lt), s = w0 + c y
            auto logf = [&](double y) {
                const double s = w0 + q.c * y;
                double v = std::log(w0 / s) - ly * s + nn * std::log(ly * s) - lg_n1 + std::log(lt) - lt * y - lg_n;
                if (n > 1) v += (nn - 1.0) * std::log(lt * y);
                return v;
            };
            const QuadResult r = integrate([&](double y) { return y <= 0.0 && n > 1 ? 0.0 : std::exp(logf(y)); },
                                           peak_points(logf, span), opt);
            out.value += r.value;
            out.quad_error += r.abs_error;
            out.terms = n;
        }
    }

    out.tail_bound = series_tail_bound(q, m, n_max);
    return out;
}

SeriesResult exact_conditional_series_auto(const CrossingQuery& q, const ExpModel& m, double tol) {
    validate(q);
    validate(m);
    if (std::isinf(q.t)) throw UnsupportedError("exact_conditional_series: finite horizon only");
    const double lambda_max = m.rate_y * (q.u + q.c * q.t);
    int n = static_cast<int>(lambda_max + 10.0 * std::sqrt(lambda_max) + 32.0);
    for (int i = 0; i < 64; ++i, n += n / 4)
        if (series_tail_bound(q, m, n) <= tol) return exact_conditional_series(q, m, n);
    throw ConvergenceError("exact_conditional_series_auto: tail bound stayed above tolerance", 0.0, kInfinity);
}

}  // namespace xcross

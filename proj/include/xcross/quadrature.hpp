#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace xcross {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = true;
    int segments = 0;
};

struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 0.0;
    int max_segments = 5000;
};

namespace detail {

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

// One 61-point Kronrod rule on [a, b] with the Gauss-Kronrod difference as error.
template <class F>
Segment gk61_segment(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto g = [&](double s) { return f(mid + half * s); };
    double err = 0.0;
    const double r = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, -1.0, 1.0, 0, 0.0, &err);
    return {a, b, half * r, std::abs(half) * err};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration over consecutive breakpoints.
// The last breakpoint may be +infinity; that tail is mapped onto [0, 1) by x = a + s/(1-s).
// Stops when the summed error estimate falls below max(abs_tol, rel_tol*|value|).
template <class F>
QuadResult integrate(const F& f, std::vector<double> points, const QuadOptions& opt = {}) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    QuadResult out;
    if (points.size() < 2) return out;

    const bool infinite_tail = std::isinf(points.back());
    const double tail_start = infinite_tail ? points[points.size() - 2] : 0.0;
    auto mapped = [&](double s) {
        const double one_minus = 1.0 - s;
        const double x = tail_start + s / one_minus;
        const double y = f(x);
        return y == 0.0 ? 0.0 : y / (one_minus * one_minus);
    };

    // Finite segments and pieces of the mapped tail share one heap.
    struct Entry {
        detail::Segment seg;
        bool tail;
        bool operator<(const Entry& o) const { return seg.error < o.seg.error; }
    };
    std::priority_queue<Entry> heap;
    double total = 0.0;
    double total_err = 0.0;
    auto push = [&](double a, double b, bool tail) {
        detail::Segment s = tail ? detail::gk61_segment(mapped, a, b) : detail::gk61_segment(f, a, b);
        total += s.value;
        total_err += s.error;
        heap.push({s, tail});
    };

    const std::size_t finite_end = infinite_tail ? points.size() - 1 : points.size();
    for (std::size_t i = 0; i + 1 < finite_end; ++i) push(points[i], points[i + 1], false);
    if (infinite_tail) push(0.0, 1.0, true);

    int count = static_cast<int>(heap.size());
    auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
    bool stuck = false;
    while (total_err > target() && count < opt.max_segments) {
        Entry top = heap.top();
        const double a = top.seg.a;
        const double b = top.seg.b;
        const double m = 0.5 * (a + b);
        if (!(m > a && m < b) || (b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) {
            stuck = true;
            break;
        }
        heap.pop();
        total -= top.seg.value;
        total_err -= top.seg.error;
        push(a, m, top.tail);
        push(m, b, top.tail);
        ++count;
    }

    // Re-sum to remove drift from the incremental updates.
    double v = 0.0;
    double e = 0.0;
    std::vector<Entry> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Entry& x, const Entry& y) { return std::abs(x.seg.value) < std::abs(y.seg.value); });
    for (const auto& s : all) {
        v += s.seg.value;
        e += s.seg.error;
    }
    out.value = v;
    out.abs_error = e;
    out.segments = count;
    out.converged = !stuck && std::isfinite(v) && e <= std::max(opt.abs_tol, opt.rel_tol * std::abs(v));
    return out;
}

// Geometric ladder lo, lo*ratio, ... clipped to (lo, hi). Useful as extra breakpoints for
// integrands whose scale changes over many decades.
inline std::vector<double> geometric_points(double lo, double hi, double ratio = 2.0) {
    std::vector<double> pts;
    if (!(lo > 0.0) || !(hi > lo)) return pts;
    for (double x = lo * ratio; x < hi && pts.size() < 4096; x *= ratio) pts.push_back(x);
    return pts;
}

}  // namespace xcross

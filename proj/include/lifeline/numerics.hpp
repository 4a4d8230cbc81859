#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "lifeline/errors.hpp"

namespace lifeline {

using RealFn = std::function<double(double)>;

// Probabilities produced by alternating sums are allowed to stray outside
// [0,1] by at most this slack before we treat the input as inconsistent.
inline constexpr double kProbSlack = 1e-12;

inline double clamp_probability(double v, const char* what) {
    if (v < 0.0) {
        if (v >= -kProbSlack) return 0.0;
        throw ContractError(std::string(what) + ": value " + std::to_string(v) +
                            " below 0 beyond slack " + std::to_string(kProbSlack));
    }
    if (v > 1.0) {
        if (v <= 1.0 + kProbSlack) return 1.0;
        throw ContractError(std::string(what) + ": value " + std::to_string(v) +
                            " above 1 beyond slack " + std::to_string(kProbSlack));
    }
    return v;
}

// Adaptive Simpson quadrature with the classic 15x error estimate.
// Absolute tolerance; recursion depth capped to keep pathological
// integrands from overflowing the stack.
namespace detail {
inline double simpson_panel(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const RealFn& f, double a, double fa, double b, double fb,
                                   double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson_panel(a, fa, m, fm, flm);
    const double right = simpson_panel(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
} // namespace detail

inline double adaptive_simpson(const RealFn& f, double a, double b, double tol = 1e-10,
                               int max_depth = 48) {
    if (!(b >= a)) throw DomainError("adaptive_simpson: integration bounds reversed");
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = detail::simpson_panel(a, fa, b, fb, fm);
    return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// Adaptive Gauss-Kronrod (15-point) quadrature; declared here, defined in
// numerics.cpp so boost headers stay out of the public include graph.
double gk_integrate(const RealFn& f, double a, double b, double rel_tol = 1e-10,
                    int max_depth = 15);

// Central finite difference with relative step h = max(1e-5, 1e-5*|t|);
// falls back to the second-order three-point forward stencil when t - h
// would leave [0, inf), so boundary values keep O(h^2) accuracy (routes
// that cross-check derivatives at t = 0 rely on this).
inline double derivative_fd(const RealFn& f, double t) {
    const double h = std::max(1e-5, 1e-5 * std::abs(t));
    if (t - h >= 0.0) return (f(t + h) - f(t - h)) / (2.0 * h);
    return (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h);
}

// Bracketed bisection for monotone f.  `increasing` declares the direction;
// the bracket must contain y.
inline double bisect_monotone(const RealFn& f, double y, double lo, double hi, bool increasing,
                              int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (!increasing) { std::swap(flo, fhi); }
    // Now flo <= y <= fhi is the expectation in "increasing" orientation.
    const double ylo = std::min(flo, fhi), yhi = std::max(flo, fhi);
    const double slack = 1e-12 * (1.0 + std::abs(y));
    if (y < ylo - slack || y > yhi + slack)
        throw DomainError("bisect_monotone: target " + std::to_string(y) +
                          " outside bracket range [" + std::to_string(ylo) + ", " +
                          std::to_string(yhi) + "]");
    double a = lo, b = hi;
    // Shrink the bracket all the way to machine width rather than stopping at
    // f_tol: the returned root is then a smooth function of y, so finite
    // differences taken through an inversion do not inherit f_tol jitter.
    for (int i = 0; i < max_iter; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == y) return m;
        const bool go_left = increasing ? (fm > y) : (fm < y);
        if (go_left) b = m; else a = m;
        if (b - a <= std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b) + 1.0))
            break;
    }
    return 0.5 * (a + b);
}

// Cumulative integral F(t) = int_origin^t f(s) ds, memoized at every queried
// point.  Gaps between known knots are filled by adaptive Simpson, so a
// scattered query pattern (as produced by adaptive quadrature drivers or
// bisection) costs only the new sub-intervals.  Thread-safe.
class IntegralCache {
public:
    IntegralCache(RealFn f, double origin, double tol = 1e-11)
        : f_(std::move(f)), tol_(tol) {
        knots_[origin] = 0.0;
    }

    double operator()(double t) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = knots_.find(t);
        if (it != knots_.end()) return it->second;
        // Integrate from the nearest cached knot.
        auto hi = knots_.lower_bound(t);
        double base_x, base_v;
        if (hi == knots_.end()) {
            auto last = std::prev(hi);
            base_x = last->first; base_v = last->second;
        } else if (hi == knots_.begin()) {
            base_x = hi->first; base_v = hi->second;
        } else {
            auto lo = std::prev(hi);
            if (t - lo->first <= hi->first - t) { base_x = lo->first; base_v = lo->second; }
            else { base_x = hi->first; base_v = hi->second; }
        }
        const double inc = (t >= base_x) ? adaptive_simpson(f_, base_x, t, tol_)
                                         : -adaptive_simpson(f_, t, base_x, tol_);
        const double v = base_v + inc;
        knots_[t] = v;
        return v;
    }

private:
    RealFn f_;
    double tol_;
    mutable std::map<double, double> knots_;
    mutable std::mutex mu_;
};

inline bool close_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

inline bool close_abs_or_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace lifeline

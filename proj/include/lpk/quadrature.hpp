#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace lpk {

/// Adaptive Simpson quadrature.  Absolute tolerance, interval-splitting
/// capped at 2^15 leaf intervals; throws if the budget is exhausted before
/// the tolerance is met.  Improper integrals go through integrate_to_inf,
/// which maps [a, inf) to [0, 1) via t = a + u/(1-u).
namespace quad {

inline constexpr double kDefaultTol = 1e-8;
inline constexpr int kMaxLeaves = 1 << 15;

namespace detail {

struct Budget {
    int leaves_left = kMaxLeaves;
};

inline double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adapt(const F& f, double a, double fa, double b, double fb, double fm,
             double whole, double tol, int depth, Budget& budget) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    // Standard Richardson acceptance test for composite Simpson.
    if (depth > 0 && std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    if (budget.leaves_left <= 1 || depth > 60)
        throw std::runtime_error("adaptive Simpson: interval budget exhausted");
    budget.leaves_left -= 1;
    return adapt(f, a, fa, m, fm, flm, left, 0.5 * tol, depth + 1, budget) +
           adapt(f, m, fm, b, fb, frm, right, 0.5 * tol, depth + 1, budget);
}

} // namespace detail

/// Integral of f over the finite interval [a, b] to absolute tolerance tol.
template <typename F>
double integrate(const F& f, double a, double b, double tol = kDefaultTol) {
    if (!(b >= a)) throw std::domain_error("integrate: need b >= a");
    if (a == b) return 0.0;
    detail::Budget budget;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = detail::simpson(a, fa, b, fb, fm);
    return detail::adapt(f, a, fa, b, fb, fm, whole, tol, 0, budget);
}

/// Integral of f over [a, inf), mapped through t = a + u/(1-u).
/// The integrand must decay fast enough that f(t) * (t-a)^2 -> 0.
template <typename F>
double integrate_to_inf(const F& f, double a, double tol = kDefaultTol) {
    auto mapped = [&](double u) {
        if (u >= 1.0) return 0.0;
        const double om = 1.0 - u;
        const double t = a + u / om;
        const double v = f(t) / (om * om);
        return std::isfinite(v) ? v : 0.0;
    };
    return integrate(mapped, 0.0, 1.0, tol);
}

} // namespace quad
} // namespace lpk

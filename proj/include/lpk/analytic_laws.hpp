#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "lpk/quadrature.hpp"
#include "lpk/scalar_law.hpp"
#include "lpk/special_functions.hpp"

namespace lpk {

/// Law of a last passage time: a point mass at zero (the level is never
/// reached) plus an absolutely continuous part on (0, inf).
struct LastPassageLaw {
    double atom_at_zero;
    std::function<double(double)> density;
};

/// N(x), the standard normal distribution function.
inline double std_normal_cdf(double x) { return norm_cdf(x); }

/// Density of T_a = inf{t : B_t + nu t = a}, a > 0:
/// a / sqrt(2 pi t^3) * exp(-(a - nu t)^2 / 2t).
inline double first_passage_density(double a, double nu, double t) {
    if (a <= 0.0) throw std::domain_error("first_passage_density: need a > 0");
    if (t <= 0.0) throw std::domain_error("first_passage_density: need t > 0");
    const double d = a - nu * t;
    return a / (kSqrt2Pi * t * std::sqrt(t)) * std::exp(-0.5 * d * d / t);
}

/// Density of G_a = sup{t : B_t + nu t = a}, nu != 0:
/// |nu| / sqrt(2 pi t) * exp(-(a - nu t)^2 / 2t).
/// For nu = 0 the last passage time is almost surely infinite.
inline double last_passage_density(double a, double nu, double t) {
    if (nu == 0.0) throw std::domain_error("last_passage_density: G_a is a.s. infinite for nu = 0");
    if (t <= 0.0) throw std::domain_error("last_passage_density: need t > 0");
    const double d = a - nu * t;
    return std::fabs(nu) / std::sqrt(2.0 * kPi * t) * std::exp(-0.5 * d * d / t);
}

/// P(4 B_1^2 <= t) = 2 N(sqrt(t)/2) - 1.
inline double four_nsq_cdf(double t) {
    if (t < 0.0) throw std::domain_error("four_nsq_cdf: need t >= 0");
    return 2.0 * norm_cdf(0.5 * std::sqrt(t)) - 1.0;
}

/// Lognormal density of exp(B_t - t/2) at K.
inline double gbm_marginal_density(double t, double K) {
    if (t <= 0.0 || K <= 0.0) return 0.0;
    const double d = std::log(K) + 0.5 * t;
    return std::exp(-0.5 * d * d / t) / (K * std::sqrt(2.0 * kPi * t));
}

/// Law of G_K = sup{t : exp(B_t - t/2) = K} for the exponential martingale
/// started at 1.  The conditional quadratic variation rate at level K is
/// K^2, so the density is (K/2) m_t(K) with m_t the lognormal marginal.
inline LastPassageLaw gbm_gk_law(double K) {
    if (K <= 0.0) throw std::domain_error("gbm_gk_law: need K > 0");
    const double atom = K > 1.0 ? 1.0 - 1.0 / K : 0.0;
    return LastPassageLaw{atom, [K](double t) {
                              return t > 0.0 ? 0.5 * K * gbm_marginal_density(t, K) : 0.0;
                          }};
}

/// Distribution function of the same law, in closed form.  Right-continuous
/// at zero: the atom sits at t = 0.
inline double gbm_gk_cdf(double K, double t) {
    if (K <= 0.0) throw std::domain_error("gbm_gk_cdf: need K > 0");
    if (t < 0.0) return 0.0;
    if (t == 0.0) return K > 1.0 ? 1.0 - 1.0 / K : 0.0;
    const double s = std::sqrt(t);
    const double lk = std::log(K);
    return norm_cdf((lk + 0.5 * t) / s) - norm_cdf((lk - 0.5 * t) / s) / K;
}

namespace detail {

// Antiderivative of u -> 1 - N(u / sqrt(t)).
inline double upper_tail_primitive(double u, double t) {
    const double s = std::sqrt(t);
    return u * norm_sf(u / s) - s * norm_pdf(u / s);
}

} // namespace detail

/// G_K distribution for Brownian motion started at 1 and killed at 0, for a
/// level 0 < K <= 1: the law of U^2 / N^2 with U uniform on [1-K, 1+K].
/// Evaluated as the average over u of 2(1 - N(u/sqrt(t))) by quadrature.
inline double killed_bm_gk_cdf(double K, double t) {
    if (!(K > 0.0 && K <= 1.0)) throw std::domain_error("killed_bm_gk_cdf: need 0 < K <= 1");
    if (t <= 0.0) throw std::domain_error("killed_bm_gk_cdf: need t > 0");
    const double lo = 1.0 - K, hi = 1.0 + K;
    const double s = std::sqrt(t);
    const double integral =
        quad::integrate([&](double u) { return 2.0 * norm_sf(u / s); }, lo, hi, 1e-10);
    return integral / (hi - lo);
}

/// Density of the same law at t.
inline double killed_bm_gk_density(double K, double t) {
    if (!(K > 0.0 && K <= 1.0)) throw std::domain_error("killed_bm_gk_density: need 0 < K <= 1");
    if (t <= 0.0) throw std::domain_error("killed_bm_gk_density: need t > 0");
    const double s = std::sqrt(t);
    return (norm_pdf((1.0 - K) / s) - norm_pdf((1.0 + K) / s)) / (2.0 * K * s);
}

/// G_K distribution for the reciprocal of a three-dimensional Bessel process
/// started at 1, level 0 < K < 1: U^2 / N^2 with U uniform on
/// [1/K - 1, 1/K + 1].
inline double inv_bes3_gk_cdf(double K, double t) {
    if (!(K > 0.0 && K < 1.0)) throw std::domain_error("inv_bes3_gk_cdf: need 0 < K < 1");
    if (t <= 0.0) throw std::domain_error("inv_bes3_gk_cdf: need t > 0");
    const double lo = 1.0 / K - 1.0, hi = 1.0 / K + 1.0;
    const double s = std::sqrt(t);
    const double integral =
        quad::integrate([&](double u) { return 2.0 * norm_sf(u / s); }, lo, hi, 1e-10);
    return integral / (hi - lo);
}

inline double inv_bes3_gk_density(double K, double t) {
    if (!(K > 0.0 && K < 1.0)) throw std::domain_error("inv_bes3_gk_density: need 0 < K < 1");
    if (t <= 0.0) throw std::domain_error("inv_bes3_gk_density: need t > 0");
    const double s = std::sqrt(t);
    return (norm_pdf((1.0 / K - 1.0) / s) - norm_pdf((1.0 / K + 1.0) / s)) / (2.0 * s);
}

/// Conditional quadratic-variation rate of cosh(B_t) e^{-t/2} at level K:
/// theta_t(K) = K^2 - e^{-t} on the support.
inline double cosh_gk_theta(double K, double t) { return K * K - std::exp(-t); }

/// Density of G_K for M_t = cosh(B_t) e^{-t/2}, M_0 = 1.  The marginal of
/// M_t has two branches b = +/- acosh(K e^{t/2}); the density vanishes below
/// the support edge K e^{t/2} = 1.
inline double cosh_gk_density(double K, double t) {
    if (t <= 0.0) throw std::domain_error("cosh_gk_density: need t > 0");
    if (K <= 0.0) throw std::domain_error("cosh_gk_density: need K > 0");
    const double y = K * std::exp(0.5 * t);
    if (y <= 1.0) return 0.0;
    const double b = acosh_guarded(y);
    const double sinh_b = std::sqrt(y * y - 1.0);
    // Two-branch change of variables through cosh, then Theorem-style
    // assembly (1/2K) * theta * m.
    const double m = 2.0 * norm_pdf(b / std::sqrt(t)) / std::sqrt(t) * std::exp(0.5 * t) / sinh_b;
    const double theta = cosh_gk_theta(K, t);
    return 0.5 / K * theta * m;
}

inline LastPassageLaw cosh_gk_law(double K) {
    if (K <= 0.0) throw std::domain_error("cosh_gk_law: need K > 0");
    const double atom = K > 1.0 ? 1.0 - 1.0 / K : 0.0;
    return LastPassageLaw{atom, [K](double t) { return t > 0.0 ? cosh_gk_density(K, t) : 0.0; }};
}

/// Transition density (w.r.t. Lebesgue) of a Bessel process of dimension
/// delta > 2 from x > 0, via the modified Bessel series in log space.
inline double bessel_transition_density(double delta, double x, double y, double t) {
    const double nu = 0.5 * delta - 1.0;
    if (x == 0.0) {
        // From the origin R_t^2 is gamma(delta/2, 2t); separate branch so the
        // Bessel series never sees z = 0.
        return std::exp(std::log(2.0) + (delta - 1.0) * std::log(y) - 0.5 * y * y / t -
                        0.5 * delta * std::log(2.0 * t) - std::lgamma(0.5 * delta));
    }
    const double z = x * y / t;
    const double log_p = std::log(y / t) + nu * (std::log(y) - std::log(x)) -
                         0.5 * (x * x + y * y) / t + log_bessel_i(nu, z);
    return std::exp(log_p);
}

/// Density of the last passage time at level a of a transient Bessel
/// process of dimension delta > 2 started at x >= 0:
/// ((delta - 2) / 2a) p_t(x, a).  For x = 0 this is the density of
/// a^2 / (2 gamma_nu) with nu = delta/2 - 1.
inline double bessel_last_passage_density(double delta, double x, double a, double t) {
    if (delta <= 2.0) throw std::domain_error("bessel_last_passage_density: need delta > 2 (transience)");
    if (a <= 0.0 || t <= 0.0) throw std::domain_error("bessel_last_passage_density: need a, t > 0");
    if (x < 0.0) throw std::domain_error("bessel_last_passage_density: need x >= 0");
    const double nu = 0.5 * delta - 1.0;
    if (x == 0.0) {
        const double half_a2 = 0.5 * a * a;
        return std::exp(nu * std::log(half_a2) - (nu + 1.0) * std::log(t) - half_a2 / t -
                        std::lgamma(nu));
    }
    return 0.5 * (delta - 2.0) / a * bessel_transition_density(delta, x, a, t);
}

/// Distribution function of the x = 0 law: Q(nu, a^2 / 2t).
inline double bessel_last_passage_cdf0(double delta, double a, double t) {
    if (delta <= 2.0) throw std::domain_error("bessel_last_passage_cdf0: need delta > 2");
    if (t <= 0.0) return 0.0;
    return gamma_q(0.5 * delta - 1.0, 0.5 * a * a / t);
}

/// Total mass of a last passage law: atom plus the density integrated over
/// (0, inf).  The substitution t = u^2 near zero handles the t^{-1/2} edge
/// that appears when the level equals the initial value; the endpoint is
/// evaluated by continuity just inside the domain.
inline double last_passage_total_mass(const LastPassageLaw& law, double tol = 1e-8) {
    auto dens = [&](double t) { return t > 0.0 ? law.density(t) : 0.0; };
    const double head = quad::integrate(
        [&](double u) {
            const double uu = u < 1e-8 ? 1e-8 : u;
            return 2.0 * uu * dens(uu * uu);
        },
        0.0, 1.0, 0.5 * tol);
    const double tail = quad::integrate_to_inf(dens, 1.0, 0.5 * tol);
    return law.atom_at_zero + head + tail;
}

/// Tail of the overall supremum of a positive local martingale whose
/// conditional terminal mean given the supremum is phi:
/// P(S_inf >= b) = exp(-int_a^b dx / (x - phi(x))), phi(x) < x.
inline double sup_tail_from_phi(const std::function<double(double)>& phi, double a, double b) {
    if (a <= 0.0) throw std::domain_error("sup_tail_from_phi: need a > 0");
    if (b < a) throw std::domain_error("sup_tail_from_phi: need b >= a");
    if (b == a) return 1.0;
    const double integral = quad::integrate(
        [&](double x) {
            const double gap = x - phi(x);
            if (gap <= 0.0) throw std::domain_error("sup_tail_from_phi: phi(x) >= x at a quadrature node");
            return 1.0 / gap;
        },
        a, b, 1e-8);
    return std::exp(-integral);
}

/// Uniform-integrability class c = 1 - lim_b b P(S_inf >= b) / a of the
/// stopped martingale described by phi, evaluated along b = a 2^k with
/// Aitken stabilisation of the limit.  c = 1 flags the u.i. case, c = 0 the
/// vanishing-at-infinity case.
inline double ui_class(const std::function<double(double)>& phi, double a) {
    if (a <= 0.0) throw std::domain_error("ui_class: need a > 0");
    double cumulative = 0.0; // int_a^b dx / (x - phi(x)), extended leg by leg
    double prev = std::numeric_limits<double>::quiet_NaN();
    double prev2 = std::numeric_limits<double>::quiet_NaN();
    for (int k = 1; k <= 40; ++k) {
        const double b_lo = a * std::pow(2.0, k - 1);
        const double b_hi = a * std::pow(2.0, k);
        cumulative += quad::integrate(
            [&](double x) {
                const double gap = x - phi(x);
                if (gap <= 0.0) throw std::domain_error("ui_class: phi(x) >= x at a quadrature node");
                return 1.0 / gap;
            },
            b_lo, b_hi, 1e-10);
        const double scaled_tail = b_hi * std::exp(-cumulative) / a;
        if (!std::isnan(prev) && std::fabs(scaled_tail - prev) <= 1e-4) {
            double limit = scaled_tail;
            // One Aitken delta-squared step when the last three iterates allow it.
            if (!std::isnan(prev2)) {
                const double denom = scaled_tail - 2.0 * prev + prev2;
                if (std::fabs(denom) > 1e-14) {
                    const double accel = scaled_tail - (scaled_tail - prev) * (scaled_tail - prev) / denom;
                    if (std::isfinite(accel)) limit = accel;
                }
            }
            const double c = 1.0 - limit;
            return c < 0.0 ? 0.0 : (c > 1.0 ? 1.0 : c);
        }
        prev2 = prev;
        prev = scaled_tail;
    }
    throw std::runtime_error("ui_class: limit did not stabilise within the b-grid");
}

} // namespace lpk

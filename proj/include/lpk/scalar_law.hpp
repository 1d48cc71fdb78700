#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "lpk/rng.hpp"
#include "lpk/special_functions.hpp"

namespace lpk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
    double lo;
    double hi;
};

/// A one-dimensional law given by its density, distribution function and an
/// exact sampler.  Every factory below satisfies the same contract: the cdf
/// is nondecreasing with cdf(lo)=0, cdf(hi)=1, the density integrates to one
/// over the support, and the sampler's empirical law matches the cdf.
struct ScalarLaw {
    Interval support;
    std::function<double(double)> density;
    std::function<double(double)> cdf;
    std::function<double(RngStream&)> sampler;
};

/// Marsaglia-Tsang gamma variate, unit scale, any shape > 0.
inline double gamma_draw(RngStream& rng, double shape) {
    if (shape <= 0.0) throw std::domain_error("gamma_draw: shape must be positive");
    if (shape < 1.0) {
        const double u = rng.u01();
        return gamma_draw(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.u01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

inline ScalarLaw uniform_law(double lo, double hi) {
    if (!(hi > lo)) throw std::domain_error("uniform_law: need hi > lo");
    const double w = hi - lo;
    return ScalarLaw{
        {lo, hi},
        [=](double x) { return (x >= lo && x <= hi) ? 1.0 / w : 0.0; },
        [=](double x) { return x <= lo ? 0.0 : (x >= hi ? 1.0 : (x - lo) / w); },
        [=](RngStream& rng) { return lo + w * rng.u01(); }};
}

inline ScalarLaw exponential_law(double rate = 1.0) {
    if (rate <= 0.0) throw std::domain_error("exponential_law: rate must be positive");
    return ScalarLaw{
        {0.0, kInf},
        [=](double x) { return x >= 0.0 ? rate * std::exp(-rate * x) : 0.0; },
        [=](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); },
        [=](RngStream& rng) { return rng.exponential() / rate; }};
}

inline ScalarLaw gamma_law(double shape) {
    if (shape <= 0.0) throw std::domain_error("gamma_law: shape must be positive");
    const double lg = std::lgamma(shape);
    return ScalarLaw{
        {0.0, kInf},
        [=](double x) {
            return x > 0.0 ? std::exp((shape - 1.0) * std::log(x) - x - lg) : 0.0;
        },
        [=](double x) { return x <= 0.0 ? 0.0 : gamma_p(shape, x); },
        [=](RngStream& rng) { return gamma_draw(rng, shape); }};
}

inline ScalarLaw beta_law(double a, double b) {
    if (a <= 0.0 || b <= 0.0) throw std::domain_error("beta_law: need a, b > 0");
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    return ScalarLaw{
        {0.0, 1.0},
        [=](double x) {
            if (x <= 0.0 || x >= 1.0) return 0.0;
            return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - lbeta);
        },
        [=](double x) { return beta_inc(a, b, x); },
        [=](RngStream& rng) {
            const double ga = gamma_draw(rng, a);
            const double gb = gamma_draw(rng, b);
            return ga / (ga + gb);
        }};
}

/// Law of 4*B_1^2, the square of twice a standard normal.
inline ScalarLaw four_nsq_law() {
    return ScalarLaw{
        {0.0, kInf},
        [](double t) {
            if (t <= 0.0) return 0.0;
            const double s = std::sqrt(t);
            return norm_pdf(0.5 * s) / (2.0 * s);
        },
        [](double t) { return t <= 0.0 ? 0.0 : 2.0 * norm_cdf(0.5 * std::sqrt(t)) - 1.0; },
        [](RngStream& rng) {
            const double z = rng.normal();
            return 4.0 * z * z;
        }};
}

namespace detail {

// Michael-Schucany-Haas inverse-Gaussian variate with mean mu and shape lam.
inline double inverse_gaussian_draw(RngStream& rng, double mu, double lam) {
    const double z = rng.normal();
    const double y = z * z;
    const double x = mu + 0.5 * mu * mu * y / lam -
                     0.5 * (mu / lam) * std::sqrt(4.0 * mu * lam * y + mu * mu * y * y);
    const double u = rng.u01();
    return (u <= mu / (mu + x)) ? x : mu * mu / x;
}

} // namespace detail

/// First passage time T_a of level a > 0 by a Brownian motion with drift
/// nu >= 0: density a/sqrt(2 pi t^3) exp(-(a - nu t)^2 / 2t).
inline ScalarLaw first_passage_law(double a, double nu) {
    if (a <= 0.0) throw std::domain_error("first_passage_law: need a > 0");
    if (nu < 0.0) throw std::domain_error("first_passage_law: need nu >= 0 for a proper law");
    return ScalarLaw{
        {0.0, kInf},
        [=](double t) {
            if (t <= 0.0) return 0.0;
            const double d = a - nu * t;
            return a / (kSqrt2Pi * t * std::sqrt(t)) * std::exp(-0.5 * d * d / t);
        },
        [=](double t) {
            if (t <= 0.0) return 0.0;
            const double s = std::sqrt(t);
            return norm_cdf((nu * t - a) / s) + std::exp(2.0 * nu * a) * norm_cdf(-(nu * t + a) / s);
        },
        [=](RngStream& rng) {
            if (nu == 0.0) {
                const double z = rng.normal();
                return a * a / (z * z);
            }
            return detail::inverse_gaussian_draw(rng, a / nu, a * a);
        }};
}

/// Last passage time G_a of level a by a Brownian motion with drift nu != 0,
/// under the convention sup(empty) = 0.  The law is proper when a and nu
/// point the same way (a * nu >= 0); the factory normalizes nu > 0 through
/// the symmetry G_a^(nu) = G_{-a}^{(-nu)}.
inline ScalarLaw last_passage_law(double a, double nu) {
    if (nu == 0.0) throw std::domain_error("last_passage_law: nu must be nonzero");
    if (nu < 0.0) {
        nu = -nu;
        a = -a;
    }
    if (a < 0.0) throw std::domain_error("last_passage_law: law is defective (atom at 0) for a*nu < 0");
    return ScalarLaw{
        {0.0, kInf},
        [=](double t) {
            if (t <= 0.0) return 0.0;
            const double d = a - nu * t;
            return nu / std::sqrt(2.0 * kPi * t) * std::exp(-0.5 * d * d / t);
        },
        [=](double t) {
            if (t <= 0.0) return 0.0;
            const double s = std::sqrt(t);
            return 1.0 - norm_cdf((a - nu * t) / s) - std::exp(2.0 * nu * a) * norm_cdf(-(a + nu * t) / s);
        },
        [=](RngStream& rng) {
            if (a == 0.0) {
                const double z = rng.normal();
                return z * z / (nu * nu);
            }
            // Time inversion: G_a with drift nu is 1 / T_nu with drift a.
            return 1.0 / detail::inverse_gaussian_draw(rng, nu / a, nu * nu);
        }};
}

/// Law of a^2 / (2 gamma_nu): the last passage time at a > 0 of a Bessel
/// process of dimension 2(nu+1) > 2 started at the origin.
inline ScalarLaw scaled_inverse_gamma_law(double nu, double a) {
    if (nu <= 0.0 || a <= 0.0) throw std::domain_error("scaled_inverse_gamma_law: need nu, a > 0");
    const double half_a2 = 0.5 * a * a;
    const double lg = std::lgamma(nu);
    return ScalarLaw{
        {0.0, kInf},
        [=](double t) {
            if (t <= 0.0) return 0.0;
            return std::exp(nu * std::log(half_a2) - (nu + 1.0) * std::log(t) - half_a2 / t - lg);
        },
        [=](double t) { return t <= 0.0 ? 0.0 : gamma_q(nu, half_a2 / t); },
        [=](RngStream& rng) { return half_a2 / gamma_draw(rng, nu); }};
}

} // namespace lpk

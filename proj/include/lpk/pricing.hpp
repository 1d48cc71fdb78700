#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "lpk/analytic_laws.hpp"
#include "lpk/quadrature.hpp"
#include "lpk/special_functions.hpp"

namespace lpk {

/// Call/put pair on exp(B_t - t/2) started at 1.  Parity call - put = 1 - K
/// holds exactly: the put is derived from the call.
struct PriceQuote {
    double call;
    double put;
    double t;
    double strike;
};

/// Black-Scholes prices with sigma = 1, drift -1/2, initial value 1:
/// call = N(-log K / sqrt(t) + sqrt(t)/2) - K N(-log K / sqrt(t) - sqrt(t)/2).
inline PriceQuote bs_price(double t, double K) {
    if (K <= 0.0) throw std::domain_error("bs_price: need K > 0");
    if (t < 0.0) throw std::domain_error("bs_price: need t >= 0");
    double call;
    if (t == 0.0) {
        call = K < 1.0 ? 1.0 - K : 0.0;
    } else {
        const double s = std::sqrt(t);
        const double d1 = -std::log(K) / s + 0.5 * s;
        call = norm_cdf(d1) - K * norm_cdf(d1 - s);
    }
    return PriceQuote{call, call - (1.0 - K), t, K};
}

/// The same call price written as a probability-weighted functional of
/// 4 B_1^2:  (1-K)^+ + sqrt(K) E[ 1{4B_1^2 <= t} exp(-(log K)^2 / 8 B_1^2) ],
/// evaluated by deterministic quadrature against the Gaussian density.
inline double alt_price(double t, double K) {
    if (K <= 0.0) throw std::domain_error("alt_price: need K > 0");
    if (t < 0.0) throw std::domain_error("alt_price: need t >= 0");
    const double intrinsic = K < 1.0 ? 1.0 - K : 0.0;
    if (t == 0.0) return intrinsic;
    const double lk2 = std::log(K) * std::log(K);
    const double upper = 0.5 * std::sqrt(t); // 4 x^2 <= t
    const double expectation = 2.0 * quad::integrate(
                                         [&](double x) {
                                             const double damp =
                                                 lk2 == 0.0 ? 1.0
                                                 : x == 0.0 ? 0.0
                                                            : std::exp(-lk2 / (8.0 * x * x));
                                             return norm_pdf(x) * damp;
                                         },
                                         0.0, upper, 1e-10);
    return intrinsic + std::sqrt(K) * expectation;
}

/// E[mu_bar(4 B_1^2)] for a survival function mu_bar of a probability
/// measure on [0, inf): the weighted-in-maturity at-the-money price.
/// Quadrature against the Gaussian density; monotonicity of mu_bar is
/// spot-checked on a node grid.
inline double qian_weighted(const std::function<double(double)>& mu_bar) {
    if (std::fabs(mu_bar(0.0) - 1.0) > 1e-12)
        throw std::domain_error("qian_weighted: mu_bar(0) must be 1");
    double previous = 1.0;
    for (int i = 1; i <= 64; ++i) {
        const double value = mu_bar(0.25 * i);
        if (value > previous + 1e-12)
            throw std::domain_error("qian_weighted: mu_bar is not nonincreasing on the node grid");
        previous = value;
    }
    return 2.0 * quad::integrate_to_inf(
                     [&](double x) { return norm_pdf(x) * mu_bar(4.0 * x * x); }, 0.0, 1e-10);
}

namespace detail {

inline double bs_put(double t, double K) { return bs_price(t, K).put; }

} // namespace detail

/// Central-difference residual of the forward identity
/// d/dT C^-(T,K) = (1/2) theta_T(K) d^2/dK^2 C^-(T,K), theta_T(K) = K^2.
/// The factor 1/2 follows the Tanaka-based derivation; the identity is also
/// commonly stated without it, and the CLI prints both normalisations.
inline double dupire_residual(double T, double K) {
    if (T <= 0.0 || K <= 0.0) throw std::domain_error("dupire_residual: need T, K > 0");
    const double hT = 1e-4 * std::max(T, 1.0);
    const double hK = 1e-4 * std::max(K, 1.0);
    const double dT = (detail::bs_put(T + hT, K) - detail::bs_put(T - hT, K)) / (2.0 * hT);
    const double dKK =
        (detail::bs_put(T, K + hK) - 2.0 * detail::bs_put(T, K) + detail::bs_put(T, K - hK)) /
        (hK * hK);
    return dT - 0.5 * K * K * dKK;
}

/// Gap d/dT C^-(T,K) - K gamma_K(T) between the time-derivative of the put
/// and the last-passage density, by the same finite-difference stencil.
inline double dupire_density_gap(double T, double K) {
    if (T <= 0.0 || K <= 0.0) throw std::domain_error("dupire_density_gap: need T, K > 0");
    const double hT = 1e-4 * std::max(T, 1.0);
    const double dT = (detail::bs_put(T + hT, K) - detail::bs_put(T - hT, K)) / (2.0 * hT);
    return dT - K * gbm_gk_law(K).density(T);
}

struct PriceProbabilityPair {
    double price;
    double probability;
};

/// The global identity: the call price equals, under the share measure, the
/// probability that the last passage at K of exp(B_t + t/2) is before t.
/// The probability side combines the never-reached atom (1-K)^+ (sup{} = 0
/// when K < 1 lies below the drift-up paths) with the integral of the drift
/// +1/2 last-passage density at level log K, independently of the
/// Black-Scholes route.
inline PriceProbabilityPair global_price_identity(double t, double K) {
    if (t <= 0.0 || K <= 0.0) throw std::domain_error("global_price_identity: need t, K > 0");
    const double a = std::log(K);
    const double atom = K < 1.0 ? 1.0 - K : 0.0;
    // Substitution s = u^2 tames the 1/sqrt(s) endpoint when K = 1.
    const double integral = quad::integrate(
        [&](double u) {
            if (u <= 0.0) return a == 0.0 ? kInvSqrt2Pi : 0.0; // continuous limit at u = 0
            return 2.0 * u * last_passage_density(a, 0.5, u * u);
        },
        0.0, std::sqrt(t), 1e-10);
    return PriceProbabilityPair{bs_price(t, K).call, atom + integral};
}

} // namespace lpk

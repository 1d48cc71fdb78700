#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lpk/analytic_laws.hpp"
#include "lpk/scalar_law.hpp"
#include "lpk/stats.hpp"
#include "oracles.hpp"

using namespace lpk;

namespace {

// The three ScalarLaw invariants: monotone CDF hitting 0/1, unit density
// mass, and a sampler whose empirical law passes KS at the 1% level.
// grid_hi bounds the monotonicity probe for laws with unbounded support.
void check_scalar_law(const ScalarLaw& law, double grid_hi, std::uint32_t sampler_tag) {
    const double lo = law.support.lo;
    const double hi = law.support.hi;
    CHECK(law.cdf(lo) <= 1e-8);
    CHECK(law.cdf(std::isfinite(hi) ? hi : 1e300) >= 1.0 - 1e-8);
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = lo + (grid_hi - lo) * i / 200.0;
        const double c = law.cdf(x);
        CHECK(c >= prev - 1e-12);
        CHECK(law.density(x) >= 0.0);
        prev = c;
    }
    const double mass = oracle::density_mass(law.density, lo, hi);
    CHECK(mass == doctest::Approx(1.0).epsilon(2e-6));

    const std::size_t n = 100000;
    std::vector<double> draws(n);
    RngStream rng(20240517, sampler_tag, 0);
    for (auto& d : draws) d = law.sampler(rng);
    const double ks = ks_statistic(draws, law.cdf);
    CHECK(ks < ks_critical_1pct(n));
}

} // namespace

TEST_CASE("spec'd point values and domain errors for the closed-form laws") {
    CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));

    // first passage density at (1, 0, 1) is phi(1)
    CHECK(first_passage_density(1.0, 0.0, 1.0) ==
          doctest::Approx(oracle::norm_pdf(1.0)).epsilon(1e-12));
    CHECK(std::fabs(first_passage_density(1.0, 0.0, 1.0) - 0.2419707) < 1e-7);
    CHECK_THROWS_AS(first_passage_density(0.0, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(first_passage_density(1.0, 0.0, -1.0), std::domain_error);

    // drift flip: f(1, nu, t) = f(1, -nu, t) e^{2 nu}
    for (double nu : {0.3, 1.0})
        for (double t : {0.5, 2.0})
            CHECK(first_passage_density(1.0, nu, t) ==
                  doctest::Approx(first_passage_density(1.0, -nu, t) * std::exp(2.0 * nu))
                      .epsilon(1e-12));

    CHECK(std::fabs(last_passage_density(0.0, 0.5, 1.0) - 0.1760327) < 1e-7);
    CHECK(last_passage_density(0.0, 0.5, 1.0) ==
          doctest::Approx(0.5 * oracle::norm_pdf(0.0) * std::exp(-0.125)).epsilon(1e-12));
    CHECK_THROWS_AS(last_passage_density(1.0, 0.0, 1.0), std::domain_error);

    // at a = 0, nu = 1/2 this is the density of 4 B_1^2, at every grid point
    const auto four_nsq = four_nsq_law();
    for (int i = 1; i <= 100; ++i) {
        const double t = 0.1 * i;
        CHECK(last_passage_density(0.0, 0.5, t) ==
              doctest::Approx(four_nsq.density(t)).epsilon(1e-12));
    }

    CHECK(four_nsq_cdf(0.0) == 0.0);
    CHECK(four_nsq_cdf(1.0) ==
          doctest::Approx(2.0 * oracle::norm_cdf(0.5) - 1.0).epsilon(1e-13));
    CHECK(std::fabs(four_nsq_cdf(1.0) - 0.3829249) < 1e-7);
    CHECK(four_nsq_cdf(1e8) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(four_nsq_cdf(-0.1), std::domain_error);
}

TEST_CASE("first and last passage densities integrate to one") {
    CHECK(oracle::density_mass_on_positive_axis([](double t) {
        return first_passage_density(1.0, 1.0, t);
    }) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(oracle::density_mass_on_positive_axis([](double t) {
        return last_passage_density(1.0, 1.0, t);
    }) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("gbm G_K law: atom, density, time inversion, closed-form cdf") {
    CHECK(gbm_gk_law(2.0).atom_at_zero == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gbm_gk_law(0.5).atom_at_zero == 0.0);
    CHECK_THROWS_AS(gbm_gk_law(0.0), std::domain_error);

    // time inversion: gbm_gk_law(1).density == last_passage_density(0, 1/2, .)
    for (int i = 1; i <= 100; ++i) {
        const double t = 0.08 * i;
        CHECK(std::fabs(gbm_gk_law(1.0).density(t) - last_passage_density(0.0, 0.5, t)) < 1e-10);
    }
    CHECK(std::fabs(gbm_gk_law(1.0).density(1.0) - 0.1760327) < 1e-7);

    for (double K : {0.5, 1.0, 2.0})
        CHECK(last_passage_total_mass(gbm_gk_law(K), 1e-8) == doctest::Approx(1.0).epsilon(1e-6));

    // cdf route vs density route
    for (double K : {0.5, 1.0, 2.0}) {
        const auto law = gbm_gk_law(K);
        for (double t : {0.25, 1.0, 4.0}) {
            const double by_density =
                law.atom_at_zero + oracle::simpson([&](double u) {
                    return 2.0 * u * law.density(std::max(u * u, 1e-30));
                }, 1e-8, std::sqrt(t), 8000);
            CHECK(gbm_gk_cdf(K, t) == doctest::Approx(by_density).epsilon(1e-7));
        }
    }
    CHECK(gbm_gk_cdf(1.0, 1.0) == doctest::Approx(four_nsq_cdf(1.0)).epsilon(1e-13));
}

TEST_CASE("killed Brownian motion G_K law") {
    // closed antiderivative oracle at K = 1, t = 1:
    // avg over [0,2] of 2(1 - N(u)) = 2(1 - N(2)) + phi(0) - phi(2)
    const double want = 2.0 * (1.0 - oracle::norm_cdf(2.0)) + oracle::norm_pdf(0.0) -
                        oracle::norm_pdf(2.0);
    CHECK(killed_bm_gk_cdf(1.0, 1.0) == doctest::Approx(want).epsilon(1e-9));
    CHECK(std::fabs(killed_bm_gk_cdf(1.0, 1.0) - 0.3904515778) < 1e-9);

    CHECK(killed_bm_gk_cdf(0.7, 1e9) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(killed_bm_gk_cdf(0.7, 1e-4) < 1e-12);
    CHECK_THROWS_AS(killed_bm_gk_cdf(1.2, 1.0), std::domain_error);
    CHECK_THROWS_AS(killed_bm_gk_cdf(0.5, 0.0), std::domain_error);

    // monotone in t and in K
    double prev = 0.0;
    for (double t = 0.1; t < 30.0; t *= 1.5) {
        const double c = killed_bm_gk_cdf(0.8, t);
        CHECK(c >= prev);
        prev = c;
    }
    prev = 0.0;
    for (double K = 0.1; K <= 1.0; K += 0.1) {
        const double c = killed_bm_gk_cdf(K, 2.0);
        CHECK(c >= prev - 1e-12);
        prev = c;
    }

    // density is the t-derivative of the cdf
    for (double t : {0.5, 1.0, 3.0})
        CHECK(killed_bm_gk_density(0.8, t) ==
              doctest::Approx(oracle::fd1([&](double s) { return killed_bm_gk_cdf(0.8, s); }, t,
                                          1e-5))
                  .epsilon(1e-6));
}

TEST_CASE("inverse BES(3) G_K law and its Bessel dual route") {
    CHECK(inv_bes3_gk_cdf(0.5, 1e8) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(inv_bes3_gk_cdf(0.5, 1e-3) < 1e-12);
    CHECK_THROWS_AS(inv_bes3_gk_cdf(1.0, 1.0), std::domain_error); // boundary K=1 excluded

    // K = 1/2, t = 1: average of 2(1 - N(u)) over u in [1,3], antiderivative
    // oracle H(u) = u (1 - N(u)) - phi(u)
    auto H = [](double u) { return u * (1.0 - oracle::norm_cdf(u)) - oracle::norm_pdf(u); };
    CHECK(inv_bes3_gk_cdf(0.5, 1.0) == doctest::Approx(H(3.0) - H(1.0)).epsilon(1e-9));

    double prev = 0.0;
    for (double t = 0.2; t < 200.0; t *= 2.0) {
        const double c = inv_bes3_gk_cdf(0.5, t);
        CHECK(c >= prev);
        prev = c;
    }

    // the uniform-ratio density equals the Bessel last-passage density route
    for (double K : {0.3, 0.5, 0.8})
        for (double t : {0.3, 1.0, 5.0})
            CHECK(inv_bes3_gk_density(K, t) ==
                  doctest::Approx(bessel_last_passage_density(3.0, 1.0, 1.0 / K, t))
                      .epsilon(1e-11));

    for (double t : {0.5, 2.0})
        CHECK(inv_bes3_gk_density(0.5, t) ==
              doctest::Approx(oracle::fd1([&](double s) { return inv_bes3_gk_cdf(0.5, s); }, t,
                                          1e-5))
                  .epsilon(1e-6));
}

TEST_CASE("cosh exponential martingale G_K law") {
    CHECK(cosh_gk_theta(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));

    // density vanishes below the support edge K e^{t/2} = 1
    CHECK(cosh_gk_density(0.5, 0.1) == 0.0);
    CHECK(cosh_gk_density(0.5, 2.0 * std::log(2.0) - 1e-9) == 0.0);
    CHECK(cosh_gk_density(0.5, 2.0 * std::log(2.0) + 1e-4) > 0.0);
    CHECK_THROWS_AS(cosh_gk_density(1.5, 0.0), std::domain_error);

    CHECK(cosh_gk_law(1.5).atom_at_zero == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(last_passage_total_mass(cosh_gk_law(1.5), 1e-8) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(last_passage_total_mass(cosh_gk_law(0.8), 1e-8) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Bessel last passage density") {
    CHECK(bessel_last_passage_density(3.0, 0.0, 1.0, 1.0) ==
          doctest::Approx(oracle::norm_pdf(1.0)).epsilon(1e-12));
    CHECK(std::fabs(bessel_last_passage_density(3.0, 0.0, 1.0, 1.0) - 0.2419707) < 1e-7);
    CHECK_THROWS_AS(bessel_last_passage_density(2.0, 0.0, 1.0, 1.0), std::domain_error);

    CHECK(oracle::density_mass_on_positive_axis([](double t) {
        return bessel_last_passage_density(3.0, 0.0, 1.0, t);
    }) == doctest::Approx(1.0).epsilon(1e-7));

    // dimension 4 from the origin: the law of a^2/(2 Exp(1))
    for (double t : {0.3, 1.0, 4.0}) {
        CHECK(bessel_last_passage_cdf0(4.0, 1.5, t) ==
              doctest::Approx(std::exp(-0.5 * 1.5 * 1.5 / t)).epsilon(1e-12));
    }
    // continuity of the x -> 0 branch
    CHECK(bessel_last_passage_density(3.0, 1e-5, 1.0, 1.0) ==
          doctest::Approx(bessel_last_passage_density(3.0, 0.0, 1.0, 1.0)).epsilon(1e-4));
}

TEST_CASE("supremum tail from the conditional-mean function phi") {
    auto phi0 = [](double) { return 0.0; };
    CHECK(sup_tail_from_phi(phi0, 1.0, 1.0) == 1.0);
    CHECK(sup_tail_from_phi(phi0, 1.0, 5.0) == doctest::Approx(0.2).epsilon(1e-9));

    for (double alpha : {0.0, 0.25, 0.5, 0.75}) {
        auto phi = [alpha](double x) { return alpha * x; };
        for (double b : {1.5, 2.0, 4.0, 8.0}) {
            const double want = std::pow(1.0 / b, 1.0 / (1.0 - alpha));
            CHECK(std::fabs(sup_tail_from_phi(phi, 1.0, b) - want) < 1e-7);
        }
    }
    CHECK(std::fabs(sup_tail_from_phi([](double x) { return 0.5 * x; }, 1.0, 2.0) - 0.25) < 1e-9);
    CHECK_THROWS_AS(sup_tail_from_phi([](double x) { return x; }, 1.0, 2.0), std::domain_error);
}

TEST_CASE("uniform integrability classification") {
    CHECK(ui_class([](double x) { return 0.5 * x; }, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(ui_class([](double x) { return 0.99 * x; }, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(ui_class([](double) { return 0.0; }, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(ui_class([](double x) { return x + 1.0; }, 1.0), std::domain_error);
}

TEST_CASE("ScalarLaw invariants for every exposed law") {
    check_scalar_law(uniform_law(-1.0, 2.0), 2.0, 1);
    check_scalar_law(exponential_law(1.0), 40.0, 2);
    check_scalar_law(gamma_law(0.5), 40.0, 3);
    check_scalar_law(gamma_law(2.5), 60.0, 4);
    check_scalar_law(beta_law(2.0, 3.0), 1.0, 5);
    check_scalar_law(four_nsq_law(), 4e3, 6);
    check_scalar_law(first_passage_law(1.0, 1.0), 4e3, 7);
    check_scalar_law(first_passage_law(1.0, 0.0), 4e6, 8);
    check_scalar_law(last_passage_law(0.0, 0.5), 4e3, 9);
    check_scalar_law(last_passage_law(1.0, 1.0), 4e3, 10);
    check_scalar_law(scaled_inverse_gamma_law(0.5, 1.0), 4e6, 11);
    check_scalar_law(scaled_inverse_gamma_law(1.5, 2.0), 4e6, 12);
}

TEST_CASE("beta(1/2,1/2) law: endpoint singularities handled by its cdf") {
    const auto law = beta_law(0.5, 0.5);
    // arcsine law closed form
    for (double x : {0.1, 0.25, 0.5, 0.9})
        CHECK(law.cdf(x) == doctest::Approx(2.0 / kPi * std::asin(std::sqrt(x))).epsilon(1e-10));
    const std::size_t n = 100000;
    std::vector<double> draws(n);
    RngStream rng(77, 13, 0);
    for (auto& d : draws) d = law.sampler(rng);
    CHECK(ks_statistic(draws, law.cdf) < ks_critical_1pct(n));
}

TEST_CASE("last passage law rejects defective parameterisations") {
    CHECK_THROWS_AS(last_passage_law(-1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(last_passage_law(1.0, 0.0), std::domain_error);
    // sign normalisation: G_{-a}^{(-nu)} = G_a^{(nu)}
    const auto a = last_passage_law(1.0, 1.0);
    const auto b = last_passage_law(-1.0, -1.0);
    for (double t : {0.3, 1.0, 3.0}) CHECK(a.density(t) == doctest::Approx(b.density(t)));
}

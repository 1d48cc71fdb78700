#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lpk/pricing.hpp"
#include "oracles.hpp"

using namespace lpk;

TEST_CASE("Black-Scholes point values") {
    CHECK(bs_price(0.0, 0.7).call == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(bs_price(0.0, 1.3).call == 0.0);
    CHECK(bs_price(0.0, 1.3).put == doctest::Approx(0.3).epsilon(1e-15));

    const double want = 2.0 * oracle::norm_cdf(0.5) - 1.0;
    CHECK(bs_price(1.0, 1.0).call == doctest::Approx(want).epsilon(1e-12));
    CHECK(std::fabs(bs_price(1.0, 1.0).call - 0.3829249) < 1e-7);

    // long maturity: call tends to the initial value 1
    CHECK(bs_price(400.0, 0.5).call == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(bs_price(400.0, 2.0).call == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(bs_price(1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(bs_price(-1.0, 1.0), std::domain_error);
}

TEST_CASE("put-call parity exact, both prices increasing in maturity") {
    for (double K : {0.5, 0.9, 1.0, 1.7}) {
        double prev_call = -1.0, prev_put_over_k = -1.0;
        for (double t = 0.0; t <= 8.0; t += 0.25) {
            const auto q = bs_price(t, K);
            CHECK(std::fabs((q.call - q.put) - (1.0 - K)) <= 1e-15);
            CHECK(q.call >= prev_call - 1e-12);
            CHECK(q.put / K >= prev_put_over_k - 1e-12);
            prev_call = q.call;
            prev_put_over_k = q.put / K;
        }
    }
}

TEST_CASE("alternative Black-Scholes formula agrees with the closed form") {
    CHECK(std::fabs(alt_price(1.0, 1.0) - (2.0 * oracle::norm_cdf(0.5) - 1.0)) < 1e-9);
    CHECK(alt_price(0.0, 1.0) == 0.0);
    CHECK(std::fabs(alt_price(1.0, 2.0) - bs_price(1.0, 2.0).call) < 1e-8);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const double t = 0.25 + (4.0 - 0.25) * i / 9.0;
            const double K = 0.5 + (2.0 - 0.5) * j / 9.0;
            CHECK(std::fabs(alt_price(t, K) - bs_price(t, K).call) < 1e-7);
        }
    }
}

TEST_CASE("weighted-maturity price: exponential weights hit 1/sqrt(1+8 lambda)") {
    for (double lambda : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        const double got = qian_weighted([lambda](double x) { return std::exp(-lambda * x); });
        CHECK(std::fabs(got - 1.0 / std::sqrt(1.0 + 8.0 * lambda)) < 1e-6);
    }
    CHECK(qian_weighted([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::fabs(qian_weighted([](double x) { return std::exp(-x); }) - 1.0 / 3.0) < 1e-9);
    CHECK(std::fabs(qian_weighted([](double x) { return std::exp(-3.0 * x); }) - 0.2) < 1e-9);

    CHECK_THROWS_AS(qian_weighted([](double x) { return x < 2.0 ? 1.0 : 1.5; }),
                    std::domain_error);
    CHECK_THROWS_AS(qian_weighted([](double) { return 0.9; }), std::domain_error);
}

TEST_CASE("forward identity: half-theta form holds, unhalved form does not") {
    for (double T : {0.5, 1.0, 2.0})
        for (double K : {0.7, 1.0, 1.5}) {
            CHECK(std::fabs(dupire_residual(T, K)) < 1e-4);
            CHECK(std::fabs(dupire_density_gap(T, K)) < 1e-4);
        }

    // the time derivative of the put at (1,1) is K gamma_K(1)
    const double dT = oracle::fd1([](double t) { return bs_price(t, 1.0).put; }, 1.0, 1e-5);
    CHECK(std::fabs(dT - 0.1760327) < 1e-6);
    const double dKK = (bs_price(1.0, 1.0 + 1e-4).put - 2.0 * bs_price(1.0, 1.0).put +
                        bs_price(1.0, 1.0 - 1e-4).put) /
                       1e-8;
    CHECK(std::fabs(dKK - 0.3520653) < 1e-5);

    // as printed without the 1/2 the identity misses by the full half-term
    const double unhalved = dT - 1.0 * dKK;
    CHECK(std::fabs(unhalved + 0.1760327) < 1e-4);
}

TEST_CASE("global identity: price equals last-passage probability") {
    const auto at_money = global_price_identity(1.0, 1.0);
    CHECK(std::fabs(at_money.price - 0.3829249) < 1e-6);
    CHECK(std::fabs(at_money.probability - 0.3829249) < 1e-6);

    for (double t : {0.25, 1.0, 4.0})
        for (double K : {0.5, 1.0, 2.0}) {
            const auto pair = global_price_identity(t, K);
            CHECK(std::fabs(pair.price - pair.probability) < 1e-6);
        }

    const auto short_otm = global_price_identity(1e-4, 1.5);
    CHECK(short_otm.price < 1e-8);
    CHECK(short_otm.probability < 1e-8);
}

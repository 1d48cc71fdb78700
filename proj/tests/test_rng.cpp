#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lpk/rng.hpp"
#include "lpk/special_functions.hpp"
#include "lpk/stats.hpp"
#include "oracles.hpp"

using namespace lpk;

TEST_CASE("streams are addressed: same coordinates reproduce, others differ") {
    RngStream a(42, 7, 1001), b(42, 7, 1001);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c(42, 7, 1002), d(42, 8, 1001), e(43, 7, 1001);
    RngStream base(42, 7, 1001);
    int equal_c = 0, equal_d = 0, equal_e = 0;
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t x = base.next_u64();
        equal_c += x == c.next_u64();
        equal_d += x == d.next_u64();
        equal_e += x == e.next_u64();
    }
    CHECK(equal_c == 0);
    CHECK(equal_d == 0);
    CHECK(equal_e == 0);
}

TEST_CASE("uniforms live strictly inside (0,1) with the right moments") {
    RngStream rng(1, 1, 0);
    MeanAccumulator acc;
    for (int i = 0; i < 1000000; ++i) {
        const double u = rng.u01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        acc.add(u);
    }
    CHECK(std::fabs(acc.mean() - 0.5) < 4.0 * acc.std_error());
    CHECK(std::fabs(acc.variance() - 1.0 / 12.0) < 1e-3);
}

TEST_CASE("ziggurat tables are self-consistent") {
    const auto& z = lpk::detail::ziggurat_tables;
    CHECK(std::fabs(z.area - 9.91256303526217e-3) < 1e-12);
    // equal-area strips and a closed top
    for (int i = 1; i < 127; ++i) {
        const double strip = z.x[i] * (z.f[i + 1] - z.f[i]);
        CHECK(strip == doctest::Approx(z.area).epsilon(1e-9));
    }
    CHECK(z.f[1] + z.area / z.x[1] < 1.0 + 1e-9);
    CHECK(z.x[128] == 0.0);
    CHECK(z.f[128] == 1.0);
}

TEST_CASE("normal draws: moments, KS, and tail mass") {
    RngStream rng(42, 2, 0);
    const int n = 2000000;
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    int beyond_r = 0;
    const double r = 3.442619855899;
    std::vector<double> sample;
    sample.reserve(1000000);
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s1 += x;
        s2 += x * x;
        s3 += x * x * x;
        s4 += x * x * x * x;
        if (std::fabs(x) > r) ++beyond_r;
        if (i < 1000000) sample.push_back(x);
    }
    CHECK(std::fabs(s1 / n) < 4.0 / std::sqrt(double(n)));
    CHECK(std::fabs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
    CHECK(std::fabs(s3 / n) < 4.0 * std::sqrt(15.0 / n));
    CHECK(std::fabs(s4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));

    const double ks = ks_statistic(sample, [](double x) { return oracle::norm_cdf(x); });
    CHECK(ks < ks_critical_1pct(sample.size()));

    const double tail_expect = 2.0 * (1.0 - oracle::norm_cdf(r)) * n;
    CHECK(std::fabs(beyond_r - tail_expect) < 4.0 * std::sqrt(tail_expect));
}

TEST_CASE("exponential draws") {
    RngStream rng(42, 3, 5);
    std::vector<double> sample(100000);
    for (auto& x : sample) x = rng.exponential();
    const double ks = ks_statistic(sample, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); });
    CHECK(ks < ks_critical_1pct(sample.size()));
}

TEST_CASE("stream tags hash distinct names apart") {
    CHECK(stream_tag("doob_maximal") != stream_tag("pdp_sup"));
    CHECK(stream_tag("a") != stream_tag("b"));
    CHECK(stream_tag("doob_maximal") == stream_tag("doob_maximal"));
}

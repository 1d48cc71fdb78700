#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lpk/embedding.hpp"
#include "lpk/stats.hpp"

using namespace lpk;

namespace {

TargetMeasure two_atom() {
    TargetMeasure nu;
    nu.atoms = {{-1.0, 2.0 / 3.0}, {2.0, 1.0 / 3.0}};
    return nu;
}

} // namespace

TEST_CASE("barycentre function on point masses") {
    TargetMeasure delta0;
    delta0.atoms = {{0.0, 1.0}};
    delta0.validate();
    CHECK(barycentre_psi(delta0, -3.0) == 0.0);
    CHECK(barycentre_psi(delta0, 0.0) == 0.0);
    CHECK(barycentre_psi(delta0, 0.5) == 0.5); // above the support: psi(x) = x

    const auto nu = two_atom();
    nu.validate();
    CHECK(barycentre_psi(nu, -2.0) == doctest::Approx(0.0));
    CHECK(barycentre_psi(nu, -1.0) == doctest::Approx(0.0)); // closed tail holds the atom at -1
    CHECK(barycentre_psi(nu, -0.99) == doctest::Approx(2.0));
    CHECK(barycentre_psi(nu, 2.0) == doctest::Approx(2.0));
    CHECK(barycentre_psi(nu, 2.5) == 2.5);
}

TEST_CASE("barycentre is nondecreasing and dominates the identity") {
    RngStream rng(3141, 1, 0);
    for (int trial = 0; trial < 30; ++trial) {
        TargetMeasure nu;
        const int k = 2 + int(rng.u01() * 4);
        double mass = 0.0, mean = 0.0;
        for (int i = 0; i < k; ++i) {
            const double loc = 4.0 * rng.u01() - 2.0;
            const double w = 0.1 + rng.u01();
            nu.atoms.push_back({loc, w});
            mass += w;
        }
        for (auto& a : nu.atoms) {
            a.mass /= mass;
            mean += a.mass * a.location;
        }
        for (auto& a : nu.atoms) a.location -= mean; // centre
        nu.validate();

        double prev = -1e300;
        for (double x = -3.0; x <= 3.0; x += 0.05) {
            const double psi = barycentre_psi(nu, x);
            CHECK(psi >= x - 1e-12);
            CHECK(psi >= prev - 1e-12);
            prev = psi;
        }
        // constant at the top atom on the last stretch of the support
        const double top = nu.top();
        CHECK(barycentre_psi(nu, top - 1e-9) == doctest::Approx(top).epsilon(1e-9));
    }
}

TEST_CASE("measure validation and the text format") {
    TargetMeasure bad;
    bad.atoms = {{-1.0, 0.5}, {2.0, 0.4}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument); // mass != 1
    TargetMeasure skew;
    skew.atoms = {{0.5, 1.0}};
    CHECK_THROWS_AS(skew.validate(), std::invalid_argument); // mean != 0

    std::stringstream good("# target\natom -1 0.6666666666666666\n\natom 2 0.3333333333333334\n");
    const auto nu = parse_target_measure(good);
    CHECK(nu.atoms.size() == 2);

    std::stringstream seg("segment -1 1 0.5\n");
    const auto uniform = parse_target_measure(seg);
    CHECK(uniform.segments.size() == 1);
    CHECK(barycentre_psi(uniform, 0.0) == doctest::Approx(0.5));   // (1+x)/2 on [-1,1]
    CHECK(barycentre_psi(uniform, -0.5) == doctest::Approx(0.25));

    std::stringstream junk("atom 1\n");
    CHECK_THROWS_AS(parse_target_measure(junk), std::invalid_argument);
    std::stringstream unknown("mass 1 2\n");
    CHECK_THROWS_AS(parse_target_measure(unknown), std::invalid_argument);
}

TEST_CASE("point mass at zero stops immediately") {
    TargetMeasure delta0;
    delta0.atoms = {{0.0, 1.0}};
    SimConfig cfg;
    cfg.n_paths = 100;
    cfg.dt = 1e-3;
    cfg.horizon = 1.0;
    const auto result = azema_yor_stop(delta0, cfg);
    CHECK(result.censored == 0);
    REQUIRE(result.stopped_values.size() == 100);
    for (double v : result.stopped_values) CHECK(v == 0.0);
}

TEST_CASE("two-atom embedding: gambler's-ruin frequencies and zero mean") {
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.dt = 1e-3;
    cfg.horizon = 32.0;
    const auto result = azema_yor_stop(two_atom(), cfg);
    CHECK(result.censored == 0);

    std::uint64_t at_two = 0;
    for (double v : result.stopped_values) {
        CHECK(std::fabs(v - 2.0) * std::fabs(v + 1.0) < 1e-6); // lands on an atom
        if (v > 0.5) ++at_two;
    }
    const double p = double(at_two) / double(result.stopped_values.size());
    const double se = std::sqrt(p * (1.0 - p) / double(result.stopped_values.size()));
    CHECK(std::fabs(p - 1.0 / 3.0) < 3.0 * se);
    CHECK(std::fabs(result.mean) < 3.0 * result.mean_std_error);
}

TEST_CASE("uniform target: stopped marginal passes KS") {
    std::stringstream seg("segment -1 1 0.5\n");
    const auto nu = parse_target_measure(seg);
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.dt = 1e-3;
    cfg.horizon = 32.0;
    auto result = azema_yor_stop(nu, cfg);
    CHECK(result.censored == 0);
    const double ks = ks_statistic(result.stopped_values, [](double x) {
        return x <= -1.0 ? 0.0 : (x >= 1.0 ? 1.0 : 0.5 * (x + 1.0));
    });
    CHECK(ks < ks_critical_1pct(result.stopped_values.size()) + 2.0 * std::sqrt(cfg.dt));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "lpk/identity_checks.hpp"
#include "lpk/report_io.hpp"

using namespace lpk;

namespace {

SimConfig smoke_config() {
    SimConfig cfg;
    cfg.n_paths = 800;
    cfg.dt = 8e-3;
    cfg.horizon = 8.0;
    cfg.seed = 42;
    return cfg;
}

} // namespace

TEST_CASE("registry is fixed: sixteen named checks with anchors") {
    const auto checks = list_checks();
    CHECK(checks.size() == 16);
    std::set<std::string> names;
    for (const auto& [name, anchor] : checks) {
        names.insert(name);
        CHECK_FALSE(anchor.empty());
    }
    CHECK(names.size() == 16);
    CHECK(names.count("doob_maximal") == 1);
    CHECK(names.count("ray_knight_profile") == 1);
    CHECK(names.count("g1_is_4nsq") == 1);
    CHECK(names.count("it_pdp") == 1);
}

TEST_CASE("run_check rejects unknown names and bad pairings") {
    const auto cfg = smoke_config();
    CHECK_THROWS_AS(run_check("no_such_check", std::nullopt, cfg), std::invalid_argument);
    CHECK_THROWS_AS(run_check("doob_maximal", ModelKind::GBM, cfg), std::invalid_argument);
    CHECK_THROWS_AS(run_check("theorem1_cdf", ModelKind::CoshExp, cfg), std::invalid_argument);
    SimConfig bad = cfg;
    bad.horizon = 0.5; // marks at t = 1 unreachable
    CHECK_THROWS_AS(run_check("theorem1_cdf", std::nullopt, bad), std::invalid_argument);
}

TEST_CASE("model override restricts the multi-model checks") {
    auto cfg = smoke_config();
    const auto gbm_only = run_check("theorem1_cdf", ModelKind::GBM, cfg);
    CHECK(gbm_only.worst_instance.find("gbm") != std::string::npos);
    const auto kb_only = run_check("gk_density_histogram", ModelKind::KilledBM, cfg);
    CHECK(kb_only.worst_instance.find("killed_bm") != std::string::npos);
}

TEST_CASE("verdict equals the report's own tolerance formula") {
    auto cfg = smoke_config();
    for (const char* name : {"doob_maximal", "max_martingale", "pdp_sup", "st_log_martingale"}) {
        const auto rep = run_check(name, std::nullopt, cfg);
        const double gap = std::fabs(rep.estimate - rep.reference);
        const double allowed = rep.tolerance_multiplier * rep.std_error + rep.bias_bound +
                               rep.deterministic_tolerance;
        CHECK(rep.verdict == (gap <= allowed));
        CHECK(rep.n_paths == cfg.n_paths);
        CHECK_FALSE(rep.paper_anchor.empty());
    }
}

TEST_CASE("reports are deterministic across runs and serialise stably") {
    auto cfg = smoke_config();
    const auto a = run_check("doob_maximal", std::nullopt, cfg);
    const auto b = run_check("doob_maximal", std::nullopt, cfg);
    CHECK(report_to_json(a).dump() == report_to_json(b).dump());
    CHECK(report_to_csv_row(a) == report_to_csv_row(b));

    const std::string js = report_to_json(a).dump();
    // pinned field order
    const char* fields[] = {"\"name\"",    "\"estimate\"",    "\"reference\"",
                            "\"stderr\"",  "\"bias_bound\"",  "\"n_paths\"",
                            "\"wall_time_s\"", "\"verdict\"", "\"paper_anchor\""};
    std::size_t pos = 0;
    for (const char* f : fields) {
        const auto at = js.find(f, pos);
        CHECK(at != std::string::npos);
        pos = at;
    }
    CHECK(js.find("\"wall_time_s\":null") != std::string::npos);
    CHECK(reports_csv_header() ==
          "name,estimate,reference,stderr,bias_bound,n_paths,wall_time_s,verdict,paper_anchor");
}

TEST_CASE("run_all_checks covers the registry in name order") {
    auto cfg = smoke_config();
    cfg.n_paths = 200; // smoke only: verdicts at this budget are not asserted
    const auto reports = run_all_checks(cfg);
    REQUIRE(reports.size() == 16);
    for (std::size_t i = 1; i < reports.size(); ++i) CHECK(reports[i - 1].name < reports[i].name);
    std::set<std::string> names;
    for (const auto& r : reports) names.insert(r.name);
    CHECK(names.size() == 16);
}

// lpk: closed-form last-passage laws, option-price identities, and the
// Monte Carlo verification suite.
//
// Exit codes: 0 success / all checks pass, 1 at least one check failed,
// 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpk/analytic_laws.hpp"
#include "lpk/embedding.hpp"
#include "lpk/identity_checks.hpp"
#include "lpk/pricing.hpp"
#include "lpk/report_io.hpp"

namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct GridSpec {
    double lo = 0.0, hi = 0.0;
    int count = 0;
};

// "lo:hi:count", inclusive endpoints.
GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    const auto p1 = text.find(':');
    const auto p2 = text.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw CLI::ValidationError("--grid", "expected lo:hi:count");
    try {
        g.lo = std::stod(text.substr(0, p1));
        g.hi = std::stod(text.substr(p1 + 1, p2 - p1 - 1));
        g.count = std::stoi(text.substr(p2 + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--grid", "expected lo:hi:count with numeric fields");
    }
    if (g.count < 1 || !(g.hi >= g.lo))
        throw CLI::ValidationError("--grid", "need count >= 1 and hi >= lo");
    return g;
}

double grid_point(const GridSpec& g, int i) {
    if (g.count == 1) return g.lo;
    return g.lo + (g.hi - g.lo) * static_cast<double>(i) / static_cast<double>(g.count - 1);
}

int run_price(double t, double strike, double sigma, bool as_json, bool as_csv) {
    const double t_std = sigma * sigma * t; // sigma rescales maturity; drift stays -sigma^2/2
    const auto quote = lpk::bs_price(t_std, strike);
    const double alt = lpk::alt_price(t_std, strike);
    const double gap = std::fabs(alt - quote.call);
    if (as_json) {
        ordered_json j;
        j["t"] = t;
        j["sigma"] = sigma;
        j["strike"] = strike;
        j["call"] = quote.call;
        j["put"] = quote.put;
        j["alt_call"] = alt;
        j["alt_gap"] = gap;
        std::cout << j.dump() << "\n";
    } else if (as_csv) {
        std::cout << "t,sigma,strike,call,put,alt_call,alt_gap\n"
                  << fmt(t) << ',' << fmt(sigma) << ',' << fmt(strike) << ',' << fmt(quote.call)
                  << ',' << fmt(quote.put) << ',' << fmt(alt) << ',' << fmt(gap) << "\n";
    } else {
        std::printf("call %.6f\nput  %.6f\n", quote.call, quote.put);
        std::printf("alt-BS agreement: %.1e\n", gap);
    }
    return 0;
}

struct LawRow {
    double t, atom, density, cdf;
};

int run_law(const std::string& model_name, double strike, const GridSpec& grid,
            bool as_json, bool as_csv) {
    const auto kind = lpk::model_kind_from_name(model_name);
    if (!kind) throw CLI::ValidationError("--model", "unknown model '" + model_name + "'");

    double atom = 0.0;
    std::function<double(double)> density, cdf;
    switch (*kind) {
        case lpk::ModelKind::GBM: {
            const auto law = lpk::gbm_gk_law(strike);
            atom = law.atom_at_zero;
            density = law.density;
            cdf = [strike](double t) { return lpk::gbm_gk_cdf(strike, t); };
            break;
        }
        case lpk::ModelKind::KilledBM:
            atom = 0.0;
            density = [strike](double t) {
                return t > 0.0 ? lpk::killed_bm_gk_density(strike, t) : 0.0;
            };
            cdf = [strike](double t) { return t > 0.0 ? lpk::killed_bm_gk_cdf(strike, t) : 0.0; };
            break;
        case lpk::ModelKind::InvBes3:
            atom = 0.0;
            density = [strike](double t) {
                return t > 0.0 ? lpk::inv_bes3_gk_density(strike, t) : 0.0;
            };
            cdf = [strike](double t) { return t > 0.0 ? lpk::inv_bes3_gk_cdf(strike, t) : 0.0; };
            break;
        case lpk::ModelKind::CoshExp: {
            const auto law = lpk::cosh_gk_law(strike);
            atom = law.atom_at_zero;
            density = law.density;
            cdf = [law, atom](double t) {
                if (t <= 0.0) return atom;
                return atom + lpk::quad::integrate(
                                  [&](double u) { return u > 0.0 ? law.density(u) : 0.0; }, 0.0,
                                  t, 1e-9);
            };
            break;
        }
        default:
            throw CLI::ValidationError("--model",
                                       "no closed-form G_K law for '" + model_name + "'");
    }

    std::vector<LawRow> rows;
    rows.reserve(grid.count);
    for (int i = 0; i < grid.count; ++i) {
        const double t = grid_point(grid, i);
        LawRow row{t, atom, t > 0.0 ? density(t) : 0.0, t > 0.0 ? cdf(t) : atom};
        rows.push_back(row);
    }

    if (as_json) {
        ordered_json j;
        j["model"] = model_name;
        j["strike"] = strike;
        ordered_json arr = ordered_json::array();
        for (const auto& r : rows) {
            ordered_json jr;
            jr["t"] = r.t;
            jr["atom"] = r.atom;
            jr["density"] = r.density;
            jr["cdf"] = r.cdf;
            arr.push_back(jr);
        }
        j["rows"] = arr;
        std::cout << j.dump() << "\n";
    } else if (as_csv) {
        std::cout << "t,atom,density,cdf\n";
        for (const auto& r : rows)
            std::cout << fmt(r.t) << ',' << fmt(r.atom) << ',' << fmt(r.density) << ','
                      << fmt(r.cdf) << "\n";
    } else {
        std::printf("%-12s %-12s %-14s %-12s\n", "t", "atom", "density", "cdf");
        for (const auto& r : rows)
            std::printf("%-12.6g %-12.6g %-14.8g %-12.8g\n", r.t, r.atom, r.density, r.cdf);
    }
    return 0;
}

int render_reports(const std::vector<lpk::CheckReport>& reports, bool as_json, bool as_csv) {
    bool all_pass = true;
    for (const auto& r : reports) all_pass = all_pass && r.verdict;
    if (as_json) {
        std::cout << lpk::reports_to_json(reports).dump(2) << "\n";
    } else if (as_csv) {
        std::cout << lpk::reports_csv_header() << "\n";
        for (const auto& r : reports) std::cout << lpk::report_to_csv_row(r) << "\n";
    } else {
        for (const auto& r : reports) std::cout << lpk::report_to_text(r) << "\n";
        std::cout << (all_pass ? "all checks passed\n" : "CHECK FAILURES PRESENT\n");
    }
    return all_pass ? 0 : 1;
}

int run_embed(const std::string& measure_path, const lpk::SimConfig& cfg, bool as_json,
              bool as_csv) {
    std::ifstream in(measure_path);
    if (!in) throw CLI::ValidationError("--measure", "cannot open '" + measure_path + "'");
    const auto nu = lpk::parse_target_measure(in);
    const auto result = lpk::azema_yor_stop(nu, cfg);

    // Frequency table: stopped values classified to the nearest atom when the
    // target is purely atomic, otherwise reported as moment checks only.
    ordered_json j;
    j["n_paths"] = cfg.n_paths;
    j["censored"] = result.censored;
    j["mean"] = result.mean;
    j["mean_stderr"] = result.mean_std_error;
    ordered_json freq = ordered_json::array();
    if (!nu.atoms.empty() && nu.segments.empty()) {
        std::vector<std::uint64_t> counts(nu.atoms.size(), 0);
        for (double v : result.stopped_values) {
            std::size_t best = 0;
            double best_gap = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < nu.atoms.size(); ++k) {
                const double gap = std::fabs(v - nu.atoms[k].location);
                if (gap < best_gap) {
                    best_gap = gap;
                    best = k;
                }
            }
            ++counts[best];
        }
        for (std::size_t k = 0; k < nu.atoms.size(); ++k) {
            const double p = static_cast<double>(counts[k]) /
                             static_cast<double>(result.stopped_values.size());
            ordered_json row;
            row["location"] = nu.atoms[k].location;
            row["mass"] = nu.atoms[k].mass;
            row["frequency"] = p;
            row["stderr"] = std::sqrt(std::max(p * (1.0 - p), 0.0) /
                                      static_cast<double>(result.stopped_values.size()));
            freq.push_back(row);
        }
    }
    j["atoms"] = freq;

    if (as_json) {
        std::cout << j.dump(2) << "\n";
    } else if (as_csv) {
        std::cout << "location,mass,frequency,stderr\n";
        for (const auto& row : freq)
            std::cout << fmt(row["location"].get<double>()) << ','
                      << fmt(row["mass"].get<double>()) << ','
                      << fmt(row["frequency"].get<double>()) << ','
                      << fmt(row["stderr"].get<double>()) << "\n";
    } else {
        std::printf("stopped paths: %zu  censored: %llu\n", result.stopped_values.size(),
                    static_cast<unsigned long long>(result.censored));
        std::printf("mean of stopped values: %.6f (stderr %.6f)\n", result.mean,
                    result.mean_std_error);
        for (const auto& row : freq)
            std::printf("atom %-10.4g mass %-8.4g frequency %-10.6g stderr %.2g\n",
                        row["location"].get<double>(), row["mass"].get<double>(),
                        row["frequency"].get<double>(), row["stderr"].get<double>());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"last-passage-time laws, price identities, and their Monte Carlo verification"};
    app.require_subcommand(1);

    lpk::SimConfig cfg; // defaults: 1e5 paths, dt 1e-3, horizon 64, seed 42

    // price
    auto* price = app.add_subcommand("price", "Black-Scholes quote plus the probability-form cross-check");
    double price_t = 1.0, price_strike = 1.0, price_sigma = 1.0;
    bool price_json = false, price_csv = false;
    price->add_option("--t", price_t, "maturity")->required();
    price->add_option("--strike", price_strike, "strike")->required();
    price->add_option("--sigma", price_sigma, "volatility (rescales maturity; drift is -sigma^2/2)");
    price->add_flag("--json", price_json, "JSON output");
    price->add_flag("--csv", price_csv, "CSV output");

    // law
    auto* law = app.add_subcommand("law", "closed-form G_K law table");
    std::string law_family = "gk", law_model = "gbm", law_grid_text = "0:10:21";
    double law_strike = 1.0;
    bool law_json = false, law_csv = false;
    law->add_option("family", law_family, "law family (gk)")->required();
    law->add_option("--model", law_model, "gbm | killed_bm | inv_bes3 | cosh_exp");
    law->add_option("--strike", law_strike, "level K")->required();
    law->add_option("--grid", law_grid_text, "time grid lo:hi:count (inclusive)");
    law->add_flag("--json", law_json, "JSON output");
    law->add_flag("--csv", law_csv, "CSV output");

    // verify / verify-all
    auto add_budget = [&](CLI::App* cmd) {
        cmd->add_option("--paths", cfg.n_paths, "Monte Carlo paths");
        cmd->add_option("--dt", cfg.dt, "time step");
        cmd->add_option("--horizon", cfg.horizon, "simulation horizon");
        cmd->add_option("--seed", cfg.seed, "RNG seed");
        cmd->add_option("--bandwidth", cfg.bandwidth, "local-time kernel half-width");
    };
    auto* verify = app.add_subcommand("verify", "run one named identity check");
    std::string verify_name, verify_model;
    bool verify_json = false, verify_csv = false;
    verify->add_option("name", verify_name, "check name (see verify-all output)")->required();
    verify->add_option("--model", verify_model, "restrict a multi-model check to one model");
    add_budget(verify);
    verify->add_flag("--json", verify_json, "JSON output");
    verify->add_flag("--csv", verify_csv, "CSV output");

    auto* verify_all = app.add_subcommand("verify-all", "run the whole identity-check registry");
    bool all_json = false, all_csv = false;
    add_budget(verify_all);
    verify_all->add_flag("--json", all_json, "JSON output");
    verify_all->add_flag("--csv", all_csv, "CSV output");

    // embed
    auto* embed = app.add_subcommand("embed", "Azema-Yor embedding of a centred target measure");
    std::string embed_measure;
    bool embed_json = false, embed_csv = false;
    embed->add_option("--measure", embed_measure, "measure file: lines 'atom <loc> <mass>'")
        ->required();
    add_budget(embed);
    embed->add_flag("--json", embed_json, "JSON output");
    embed->add_flag("--csv", embed_csv, "CSV output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e); // prints usage / message
        return 2;
    }

    try {
        if (*price) return run_price(price_t, price_strike, price_sigma, price_json, price_csv);
        if (*law) {
            if (law_family != "gk")
                throw CLI::ValidationError("family", "unknown law family '" + law_family + "'");
            return run_law(law_model, law_strike, parse_grid(law_grid_text), law_json, law_csv);
        }
        if (*verify) {
            std::optional<lpk::ModelKind> model;
            if (!verify_model.empty()) {
                model = lpk::model_kind_from_name(verify_model);
                if (!model)
                    throw CLI::ValidationError("--model", "unknown model '" + verify_model + "'");
            }
            const auto rep = lpk::run_check(verify_name, model, cfg);
            return render_reports({rep}, verify_json, verify_csv);
        }
        if (*verify_all) return render_reports(lpk::run_all_checks(cfg), all_json, all_csv);
        if (*embed) return run_embed(embed_measure, cfg, embed_json, embed_csv);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::logic_error& e) { // bad names, out-of-domain parameters
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

#pragma once

#include <cstdio>
#include <span>
#include <string>

#include <json.hpp>

#include "lpk/identity_checks.hpp"

namespace lpk {

/// CheckReport serialisation.  Field order is part of the contract:
/// {name, estimate, reference, stderr, bias_bound, n_paths, wall_time_s,
/// verdict, paper_anchor}.  wall_time_s is rendered as null in the
/// machine-readable formats so that identical runs produce byte-identical
/// output regardless of timing; the measured value stays in the text view.
inline nlohmann::ordered_json report_to_json(const CheckReport& rep) {
    nlohmann::ordered_json j;
    j["name"] = rep.name;
    j["estimate"] = rep.estimate;
    j["reference"] = rep.reference;
    j["stderr"] = rep.std_error;
    j["bias_bound"] = rep.bias_bound;
    j["n_paths"] = rep.n_paths;
    j["wall_time_s"] = nullptr;
    j["verdict"] = rep.verdict ? "pass" : "fail";
    j["paper_anchor"] = rep.paper_anchor;
    return j;
}

inline nlohmann::ordered_json reports_to_json(std::span<const CheckReport> reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    return arr;
}

namespace detail {

inline std::string fmt_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline std::string reports_csv_header() {
    return "name,estimate,reference,stderr,bias_bound,n_paths,wall_time_s,verdict,paper_anchor";
}

inline std::string report_to_csv_row(const CheckReport& rep) {
    std::string row;
    row += rep.name;
    row += ',';
    row += detail::fmt_g17(rep.estimate);
    row += ',';
    row += detail::fmt_g17(rep.reference);
    row += ',';
    row += detail::fmt_g17(rep.std_error);
    row += ',';
    row += detail::fmt_g17(rep.bias_bound);
    row += ',';
    row += std::to_string(rep.n_paths);
    row += ",,"; // wall_time_s left empty for byte-stable output
    row += rep.verdict ? "pass" : "fail";
    row += ",\"";
    row += rep.paper_anchor;
    row += '"';
    return row;
}

/// Human-oriented single-line summary.
inline std::string report_to_text(const CheckReport& rep) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%-22s %s  estimate=%- .6g reference=%- .6g stderr=%.3g bias=%.3g tol=%.3g "
                  "(%.2fs)%s%s",
                  rep.name.c_str(), rep.verdict ? "PASS" : "FAIL", rep.estimate, rep.reference,
                  rep.std_error, rep.bias_bound,
                  rep.tolerance_multiplier * rep.std_error + rep.bias_bound +
                      rep.deterministic_tolerance,
                  rep.wall_time_s, rep.worst_instance.empty() ? "" : "  worst: ",
                  rep.worst_instance.c_str());
    return buf;
}

} // namespace lpk

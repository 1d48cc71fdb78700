#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpk/parallel.hpp"
#include "lpk/path_engine.hpp"
#include "lpk/rng.hpp"
#include "lpk/stats.hpp"

namespace lpk {

/// A centred target measure for the Skorokhod embedding: point masses
/// and/or piecewise-constant density segments.  Total mass must be 1 within
/// 1e-12 and the mean must vanish (the embedding centres at B_0 = 0).
struct TargetMeasure {
    struct Atom {
        double location;
        double mass;
    };
    struct Segment {
        double lo;
        double hi;
        double density; // constant on [lo, hi)
    };
    std::vector<Atom> atoms;
    std::vector<Segment> segments;

    double total_mass() const {
        double m = 0.0;
        for (const auto& a : atoms) m += a.mass;
        for (const auto& s : segments) m += s.density * (s.hi - s.lo);
        return m;
    }
    double mean() const {
        double m = 0.0;
        for (const auto& a : atoms) m += a.mass * a.location;
        for (const auto& s : segments) m += 0.5 * s.density * (s.hi * s.hi - s.lo * s.lo);
        return m;
    }
    double top() const {
        double t = -std::numeric_limits<double>::infinity();
        for (const auto& a : atoms) t = std::max(t, a.location);
        for (const auto& s : segments) t = std::max(t, s.hi);
        return t;
    }

    void validate() const {
        if (atoms.empty() && segments.empty())
            throw std::invalid_argument("TargetMeasure: empty measure");
        for (const auto& a : atoms)
            if (!(a.mass >= 0.0) || !std::isfinite(a.location))
                throw std::invalid_argument("TargetMeasure: bad atom");
        for (const auto& s : segments)
            if (!(s.hi > s.lo) || !(s.density >= 0.0))
                throw std::invalid_argument("TargetMeasure: bad segment");
        if (std::fabs(total_mass() - 1.0) > 1e-12)
            throw std::invalid_argument("TargetMeasure: masses must sum to 1");
        if (std::fabs(mean()) > 1e-9)
            throw std::invalid_argument("TargetMeasure: mean must be 0");
    }

    /// nu[x, inf), with the closed right-continuous tail convention: an atom
    /// at x belongs to the tail.
    double tail_mass(double x) const {
        double m = 0.0;
        for (const auto& a : atoms)
            if (a.location >= x) m += a.mass;
        for (const auto& s : segments) {
            const double lo = std::max(s.lo, x);
            if (lo < s.hi) m += s.density * (s.hi - lo);
        }
        return m;
    }
    double tail_first_moment(double x) const {
        double m = 0.0;
        for (const auto& a : atoms)
            if (a.location >= x) m += a.mass * a.location;
        for (const auto& s : segments) {
            const double lo = std::max(s.lo, x);
            if (lo < s.hi) m += 0.5 * s.density * (s.hi * s.hi - lo * lo);
        }
        return m;
    }
};

/// Upper-tail barycentre psi(x) = (1/nu[x,inf)) int_{[x,inf)} y nu(dy),
/// with psi(x) = x above the support.  psi is nondecreasing and >= x.
inline double barycentre_psi(const TargetMeasure& nu, double x) {
    const double tail = nu.tail_mass(x);
    if (tail <= 0.0) return x;
    return nu.tail_first_moment(x) / tail;
}

/// Text format: one entry per line, "atom <location> <mass>" or
/// "segment <lo> <hi> <density>"; blank lines and lines starting with '#'
/// are skipped.  The parsed measure is validated before being returned.
inline TargetMeasure parse_target_measure(std::istream& in) {
    TargetMeasure nu;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind) || kind[0] == '#') continue;
        if (kind == "atom") {
            TargetMeasure::Atom a{};
            if (!(ls >> a.location >> a.mass))
                throw std::invalid_argument("measure file line " + std::to_string(line_no) +
                                            ": expected 'atom <location> <mass>'");
            nu.atoms.push_back(a);
        } else if (kind == "segment") {
            TargetMeasure::Segment s{};
            if (!(ls >> s.lo >> s.hi >> s.density))
                throw std::invalid_argument("measure file line " + std::to_string(line_no) +
                                            ": expected 'segment <lo> <hi> <density>'");
            nu.segments.push_back(s);
        } else {
            throw std::invalid_argument("measure file line " + std::to_string(line_no) +
                                        ": unknown entry '" + kind + "'");
        }
    }
    nu.validate();
    return nu;
}

struct EmbeddingResult {
    std::vector<double> stopped_values; // one per stopped path, in path order
    std::uint64_t censored = 0;         // paths not stopped by the horizon
    double mean = 0.0;
    double mean_std_error = 0.0;
};

/// Azema-Yor stopping rule T = inf{t : S_t >= psi(B_t)} on standard
/// Brownian paths from 0.  The running max is updated before each test; at
/// the triggering step the stopped value is refined along the linear
/// segment, which lands exactly on the atoms of a discrete target.
/// Extension point, not implemented: the modified construction for motion
/// started at 1 and stopped before its first hit of 0.
inline EmbeddingResult azema_yor_stop(const TargetMeasure& nu, const SimConfig& config) {
    nu.validate();
    config.validate();
    const std::uint64_t n_steps = config.n_steps();
    const double dt = config.dt;
    const std::uint32_t tag = stream_tag("azema_yor");

    struct Partial {
        std::vector<double> values;
        std::uint64_t censored = 0;
    };
    auto partials = par::map_blocks<Partial>(
        config.n_paths, 512, [&](std::uint64_t, std::uint64_t lo, std::uint64_t hi) {
            Partial part;
            part.values.reserve(hi - lo);
            for (std::uint64_t path = lo; path < hi; ++path) {
                RngStream rng(config.seed, tag, path);
                BmWalker w(0.0, dt);
                double smax = 0.0;
                bool stopped = false;
                if (smax >= barycentre_psi(nu, 0.0)) { // e.g. nu = delta_0
                    part.values.push_back(0.0);
                    continue;
                }
                for (std::uint64_t i = 0; i < n_steps && !stopped; ++i) {
                    const double b0 = w.b;
                    const double b1 = w.step(rng);
                    if (b1 > smax) smax = b1;
                    if (smax >= barycentre_psi(nu, b1)) {
                        // Refine the trigger point along the segment b0 -> b1.
                        double value = b1;
                        if (b1 < b0) {
                            // Falling segment, S frozen: the first v below b0 with
                            // psi(v) <= S; psi is nondecreasing, so bisect.
                            double good = b1, bad = b0; // psi(good) <= smax
                            for (int it = 0; it < 60; ++it) {
                                const double mid = 0.5 * (good + bad);
                                if (barycentre_psi(nu, mid) <= smax)
                                    good = mid;
                                else
                                    bad = mid;
                            }
                            value = good;
                        } else {
                            // Rising segment: S = v along the climb; the first v with
                            // v >= psi(v).  v - psi(v) is nondecreasing here as well.
                            double good = b1, bad = std::min(b0, b1); // good: v >= psi(v)
                            if (bad >= barycentre_psi(nu, bad)) {
                                value = bad;
                            } else {
                                for (int it = 0; it < 60; ++it) {
                                    const double mid = 0.5 * (good + bad);
                                    if (mid >= barycentre_psi(nu, mid))
                                        good = mid;
                                    else
                                        bad = mid;
                                }
                                value = good;
                            }
                        }
                        part.values.push_back(value);
                        stopped = true;
                    }
                }
                if (!stopped) ++part.censored;
            }
            return part;
        });

    EmbeddingResult out;
    MeanAccumulator acc;
    for (const auto& p : partials) {
        out.censored += p.censored;
        for (double v : p.values) {
            out.stopped_values.push_back(v);
            acc.add(v);
        }
    }
    out.mean = acc.mean();
    out.mean_std_error = acc.std_error();
    return out;
}

} // namespace lpk

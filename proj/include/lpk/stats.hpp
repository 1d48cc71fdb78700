#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace lpk {

/// Streaming mean / standard error over plain sums.  Merging is exact in
/// the sense that partials added in a fixed order reproduce bit-identical
/// totals, which the reproducibility contract relies on.
struct MeanAccumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t n = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    void merge(const MeanAccumulator& o) {
        sum += o.sum;
        sum_sq += o.sum_sq;
        n += o.n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double variance() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double v = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
        return v > 0.0 ? v : 0.0;
    }
    double std_error() const { return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

/// Two-sided Kolmogorov-Smirnov statistic of a sample against a reference
/// CDF, valid for mixed distributions: tied sample values (an atom shared
/// by the law, say) are grouped, and the left-limit comparison evaluates
/// the CDF just below the tie instead of at it.  The cdf callable must be
/// a genuine right-continuous CDF (0 below the support).  The sample is
/// sorted in place.  extra_points adds jump locations of the law that the
/// sample may have missed entirely.
inline double ks_statistic(std::vector<double>& sample,
                           const std::function<double(double)>& cdf,
                           const std::vector<double>& extra_points = {}) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sample.size()) {
        const double x = sample[i];
        std::size_t j = i;
        while (j < sample.size() && sample[j] == x) ++j;
        d = std::max(d, std::fabs(cdf(x) - static_cast<double>(j) / n));
        const double f_left = cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
        d = std::max(d, std::fabs(f_left - static_cast<double>(i) / n));
        i = j;
    }
    for (double p : extra_points) {
        const auto at_or_below =
            std::upper_bound(sample.begin(), sample.end(), p) - sample.begin();
        const auto strictly_below =
            std::lower_bound(sample.begin(), sample.end(), p) - sample.begin();
        d = std::max(d, std::fabs(cdf(p) - static_cast<double>(at_or_below) / n));
        const double f_left = cdf(std::nextafter(p, -std::numeric_limits<double>::infinity()));
        d = std::max(d, std::fabs(f_left - static_cast<double>(strictly_below) / n));
    }
    return d;
}

/// KS statistic restricted to the window t <= t_max.  Used when the tail of
/// a sample is censored but every observation below t_max is exact: the sup
/// over the safe window remains a valid goodness-of-fit statistic there.
/// n_total counts censored observations (all above t_max) in the empirical
/// denominator; 0 means the sample is complete.
inline double ks_statistic_windowed(std::vector<double>& sample,
                                    const std::function<double(double)>& cdf,
                                    double t_max, std::uint64_t n_total = 0) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(n_total ? n_total : sample.size());
    double d = 0.0;
    std::size_t i = 0;
    for (; i < sample.size() && sample[i] <= t_max; ++i) {
        const double fx = cdf(sample[i]);
        d = std::max(d, fx - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - fx);
    }
    // Gap at the window edge itself.
    d = std::max(d, std::fabs(cdf(t_max) - static_cast<double>(i) / n));
    return d;
}

/// 1% asymptotic two-sided KS critical value.
inline double ks_critical_1pct(std::uint64_t n) {
    return 1.63 / std::sqrt(static_cast<double>(n));
}

/// Paired accumulator for an estimator evaluated at bandwidth eps and
/// eps/2; extrapolated() removes the O(eps) bias term.
struct RichardsonAccumulator {
    MeanAccumulator coarse, fine, extrapolated_acc;

    void add(double at_eps, double at_half_eps) {
        coarse.add(at_eps);
        fine.add(at_half_eps);
        extrapolated_acc.add(2.0 * at_half_eps - at_eps);
    }
    void merge(const RichardsonAccumulator& o) {
        coarse.merge(o.coarse);
        fine.merge(o.fine);
        extrapolated_acc.merge(o.extrapolated_acc);
    }
    double extrapolated() const { return extrapolated_acc.mean(); }
    double std_error() const { return extrapolated_acc.std_error(); }
    /// Measured first-order bias scale |estimate(eps) - estimate(eps/2)|.
    double bias_estimate() const { return std::fabs(coarse.mean() - fine.mean()); }
};

} // namespace lpk

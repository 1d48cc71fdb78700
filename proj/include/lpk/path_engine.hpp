#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lpk/rng.hpp"

namespace lpk {

enum class ModelKind : std::uint32_t {
    GBM = 0,
    KilledBM = 1,
    InvBes3 = 2,
    CoshExp = 3,
    AlphaStoppedBM = 4,
};

enum class TerminalKind { vanishes, nonzero_limit };

enum class TailMode { censor, doob_exact };

/// A simulatable positive continuous local martingale with known diffusion
/// coefficient sigma(t, x) and terminal behaviour.
struct MartingaleModel {
    ModelKind kind;
    double initial = 1.0;
    double alpha = 0.0; // AlphaStoppedBM only
    TerminalKind terminal_kind = TerminalKind::vanishes;

    static MartingaleModel gbm(double initial = 1.0) {
        require_positive(initial);
        return {ModelKind::GBM, initial, 0.0, TerminalKind::vanishes};
    }
    static MartingaleModel killed_bm(double initial = 1.0) {
        require_positive(initial);
        return {ModelKind::KilledBM, initial, 0.0, TerminalKind::vanishes};
    }
    static MartingaleModel inv_bes3(double initial = 1.0) {
        require_positive(initial);
        return {ModelKind::InvBes3, initial, 0.0, TerminalKind::vanishes};
    }
    static MartingaleModel cosh_exp() {
        return {ModelKind::CoshExp, 1.0, 0.0, TerminalKind::vanishes};
    }
    static MartingaleModel alpha_stopped_bm(double alpha, double initial = 1.0) {
        require_positive(initial);
        if (alpha < 0.0 || alpha >= 1.0)
            throw std::invalid_argument("alpha_stopped_bm: need alpha in [0,1)");
        return {ModelKind::AlphaStoppedBM, initial, alpha,
                alpha > 0.0 ? TerminalKind::nonzero_limit : TerminalKind::vanishes};
    }

    /// sigma(t, x): the volatility of the value process.
    double diffusion(double t, double x) const {
        switch (kind) {
            case ModelKind::GBM: return x;
            case ModelKind::KilledBM: return x > 0.0 ? 1.0 : 0.0;
            case ModelKind::InvBes3: return x * x;
            case ModelKind::CoshExp: {
                const double v = x * x - std::exp(-t);
                return v > 0.0 ? std::sqrt(v) : 0.0;
            }
            case ModelKind::AlphaStoppedBM: return 1.0;
        }
        return 0.0;
    }

    const char* name() const {
        switch (kind) {
            case ModelKind::GBM: return "gbm";
            case ModelKind::KilledBM: return "killed_bm";
            case ModelKind::InvBes3: return "inv_bes3";
            case ModelKind::CoshExp: return "cosh_exp";
            case ModelKind::AlphaStoppedBM: return "alpha_stopped_bm";
        }
        return "?";
    }
    std::uint32_t id() const { return static_cast<std::uint32_t>(kind); }

private:
    static void require_positive(double v) {
        if (!(v > 0.0)) throw std::invalid_argument("model initial value must be positive");
    }
};

inline std::optional<ModelKind> model_kind_from_name(std::string_view s) {
    if (s == "gbm") return ModelKind::GBM;
    if (s == "killed_bm") return ModelKind::KilledBM;
    if (s == "inv_bes3") return ModelKind::InvBes3;
    if (s == "cosh_exp") return ModelKind::CoshExp;
    if (s == "alpha_stopped_bm") return ModelKind::AlphaStoppedBM;
    return std::nullopt;
}

struct SimConfig {
    std::uint64_t n_paths = 100000;
    double dt = 1e-3;
    double horizon = 64.0;
    std::uint64_t seed = 42;
    double bandwidth = 0.0; // local-time kernel half-width; 0 = per-use default
    TailMode tail_mode = TailMode::censor;

    void validate() const {
        if (n_paths < 1) throw std::invalid_argument("SimConfig: n_paths >= 1 required");
        if (!(dt > 0.0) || !(horizon > 0.0) || dt > horizon)
            throw std::invalid_argument("SimConfig: need 0 < dt <= horizon");
        if (bandwidth < 0.0) throw std::invalid_argument("SimConfig: bandwidth must be >= 0");
    }
    std::uint64_t n_steps() const {
        return static_cast<std::uint64_t>(std::ceil(horizon / dt - 1e-9));
    }
};

/// One discretised trajectory.  After absorption (or the alpha-stop), values
/// stay constant and quadratic-variation increments are zero.
struct PathSample {
    double dt = 0.0;
    std::vector<double> times;         // grid, n+1 points
    std::vector<double> values;        // M on the grid
    std::vector<double> qv_increments; // sigma^2 dt per step, n entries
    std::vector<double> running_max;   // S_t on the grid
    std::optional<double> absorbed_at;
    double terminal_value = 0.0;
    TerminalKind terminal_kind = TerminalKind::vanishes;
};

// ---------------------------------------------------------------------------
// Brownian-bridge step refinements.  Conditionally on the two endpoints a
// Brownian step is a bridge, so its maximum can be sampled exactly and its
// level-hitting probability is closed form.  Both are exact for Brownian
// coordinates regardless of drift; for the Bessel radius they are accurate
// to O(dt^{3/2}) per step.
// ---------------------------------------------------------------------------

/// Exact draw of max over one step given endpoints (variance dt).
inline double bridge_max_sample(double x0, double x1, double dt, RngStream& rng) {
    const double d = x1 - x0;
    return 0.5 * (x0 + x1 + std::sqrt(d * d - 2.0 * dt * std::log(rng.u01())));
}

/// True if the step's bridge touches `level`.  Straddling endpoints always
/// hit; otherwise the closed-form touch probability drives a Bernoulli draw.
/// Draws are skipped when the probability is below ~1e-16.
inline bool bridge_crosses_level(double x0, double x1, double dt, double level, RngStream& rng) {
    const double g0 = x0 - level, g1 = x1 - level;
    if (g0 * g1 <= 0.0) return true;
    const double product = std::fabs(g0) * std::fabs(g1);
    if (product >= 18.5 * dt) return false;
    return rng.u01() < std::exp(-2.0 * product / dt);
}

/// Running maximum over a window, refined with exact per-step bridge maxima.
/// Steps that provably cannot move the maximum skip their draw; the margin
/// bounds the largest elevation the bridge-max transform can produce.
struct SupTracker {
    double value = -std::numeric_limits<double>::infinity();
    double margin = 0.0;

    explicit SupTracker(double dt) : margin(0.5 * std::sqrt(75.0 * dt)) {}
    void observe_point(double x) {
        if (x > value) value = x;
    }
    void observe_step(double x0, double x1, double dt, RngStream& rng) {
        if (std::max(x0, x1) + margin <= value) return;
        const double m = bridge_max_sample(x0, x1, dt, rng);
        if (m > value) value = m;
    }
};

// ---------------------------------------------------------------------------
// Minimal per-model walkers for streaming consumers.  simulate_path and the
// verification checks share these, so a model advances identically wherever
// it is driven.
// ---------------------------------------------------------------------------

struct GbmWalker { // exact in log space
    double x; // log M
    double dt, sqrt_dt;
    GbmWalker(double initial, double dt_) : x(std::log(initial)), dt(dt_), sqrt_dt(std::sqrt(dt_)) {}
    double step(RngStream& rng) {
        x += sqrt_dt * rng.normal() - 0.5 * dt;
        return x;
    }
    double value() const { return std::exp(x); }
};

struct BmWalker {
    double b;
    double dt, sqrt_dt;
    BmWalker(double initial, double dt_) : b(initial), dt(dt_), sqrt_dt(std::sqrt(dt_)) {}
    double step(RngStream& rng) {
        b += sqrt_dt * rng.normal();
        return b;
    }
};

struct Bes3Walker { // three-dimensional Brownian norm, exact increments
    double cx, cy, cz;
    double dt, sqrt_dt;
    Bes3Walker(double r0, double dt_) : cx(r0), cy(0.0), cz(0.0), dt(dt_), sqrt_dt(std::sqrt(dt_)) {}
    double r() const { return std::sqrt(cx * cx + cy * cy + cz * cz); }
    double step(RngStream& rng) {
        cx += sqrt_dt * rng.normal();
        cy += sqrt_dt * rng.normal();
        cz += sqrt_dt * rng.normal();
        return r();
    }
};

// ---------------------------------------------------------------------------

/// Deterministic simulation of one path: the output depends only on
/// (model, config.seed, path_index).  GBM and CoshExp use exact Gaussian
/// skeletons; KilledBM and AlphaStoppedBM add bridge absorption detection at
/// their barriers; InvBes3 is the reciprocal of an exact 3-d Brownian norm.
inline PathSample simulate_path(const MartingaleModel& model, const SimConfig& config,
                                std::uint64_t path_index) {
    config.validate();
    if (path_index >= config.n_paths)
        throw std::invalid_argument("simulate_path: path_index out of range");
    const std::uint64_t n = config.n_steps();
    RngStream rng(config.seed, model.id(), path_index);

    PathSample out;
    out.dt = config.dt;
    out.terminal_kind = model.terminal_kind;
    out.times.resize(n + 1);
    out.values.resize(n + 1);
    out.qv_increments.assign(n, 0.0);
    out.running_max.resize(n + 1);
    for (std::uint64_t i = 0; i <= n; ++i) out.times[i] = static_cast<double>(i) * config.dt;

    const double dt = config.dt;
    out.values[0] = model.kind == ModelKind::CoshExp ? 1.0 : model.initial;

    switch (model.kind) {
        case ModelKind::GBM: {
            GbmWalker w(model.initial, dt);
            for (std::uint64_t i = 0; i < n; ++i) {
                const double m0 = std::exp(w.x);
                out.qv_increments[i] = m0 * m0 * dt;
                w.step(rng);
                out.values[i + 1] = w.value();
            }
            break;
        }
        case ModelKind::KilledBM:
        case ModelKind::AlphaStoppedBM: {
            const double alpha = model.kind == ModelKind::KilledBM ? 0.0 : model.alpha;
            BmWalker w(model.initial, dt);
            double smax = model.initial;
            bool stopped = false;
            double frozen = 0.0;
            for (std::uint64_t i = 0; i < n; ++i) {
                if (stopped) {
                    out.values[i + 1] = frozen;
                    continue;
                }
                const double barrier = alpha * smax;
                const double b0 = w.b;
                const double b1 = w.step(rng);
                double stop_time = -1.0;
                if (b1 <= barrier) {
                    const double frac = (b0 - barrier) / (b0 - b1);
                    stop_time = out.times[i] + frac * dt;
                } else if (bridge_crosses_level(b0, b1, dt, barrier, rng)) {
                    stop_time = out.times[i] + 0.5 * dt;
                }
                if (stop_time >= 0.0) {
                    stopped = true;
                    frozen = barrier;
                    out.absorbed_at = stop_time;
                    // Fraction of the step spent alive.
                    out.qv_increments[i] = (stop_time - out.times[i]);
                    out.values[i + 1] = frozen;
                } else {
                    out.qv_increments[i] = dt;
                    out.values[i + 1] = b1;
                    if (b1 > smax) smax = b1;
                }
            }
            break;
        }
        case ModelKind::InvBes3: {
            Bes3Walker w(1.0 / model.initial, dt);
            for (std::uint64_t i = 0; i < n; ++i) {
                const double m0 = 1.0 / w.r();
                out.qv_increments[i] = m0 * m0 * m0 * m0 * dt;
                out.values[i + 1] = 1.0 / w.step(rng);
            }
            break;
        }
        case ModelKind::CoshExp: {
            if (model.initial != 1.0)
                throw std::invalid_argument("simulate_path: cosh_exp starts at 1");
            BmWalker w(0.0, dt);
            for (std::uint64_t i = 0; i < n; ++i) {
                const double t0 = out.times[i];
                const double m0 = out.values[i];
                const double qv_rate = std::max(m0 * m0 - std::exp(-t0), 0.0);
                out.qv_increments[i] = qv_rate * dt;
                const double b1 = w.step(rng);
                out.values[i + 1] = std::cosh(b1) * std::exp(-0.5 * out.times[i + 1]);
            }
            break;
        }
    }

    double smax = out.values[0];
    for (std::uint64_t i = 0; i <= n; ++i) {
        if (out.values[i] > smax) smax = out.values[i];
        out.running_max[i] = smax;
    }
    out.terminal_value = out.values[n];
    return out;
}

/// Maximum of the path values on [t, horizon].
inline double sup_after(const PathSample& path, double t) {
    if (path.values.empty()) throw std::invalid_argument("sup_after: empty path");
    if (t < -1e-12 || t > path.times.back() + 1e-12)
        throw std::invalid_argument("sup_after: t outside the grid");
    std::size_t i0 = static_cast<std::size_t>(std::ceil(t / path.dt - 1e-9));
    if (i0 >= path.values.size()) i0 = path.values.size() - 1;
    double m = path.values[i0];
    for (std::size_t i = i0 + 1; i < path.values.size(); ++i)
        if (path.values[i] > m) m = path.values[i];
    return m;
}

struct LastPassageResult {
    double g = 0.0; // sup{} = 0 convention when the level is never touched
    bool censored = false;
};

/// Last grid crossing of level K with linear interpolation inside the
/// straddling step, ties toward the later time.  Tail handling: in censor
/// mode a path whose terminal value could still cross later is flagged; in
/// doob_exact mode (vanishing models only) a Bernoulli draw with the exact
/// conditional probability min(terminal/K, 1) decides whether a later
/// crossing exists, and the path is censored only on success.
inline LastPassageResult last_passage_on_path(const PathSample& path, double K, TailMode tail_mode,
                                              RngStream& rng) {
    if (!(K > 0.0)) throw std::invalid_argument("last_passage_on_path: need K > 0");
    LastPassageResult out;
    const double tail_p = std::min(path.terminal_value / K, 1.0);
    if (tail_mode == TailMode::doob_exact) {
        if (path.terminal_kind != TerminalKind::vanishes)
            throw std::invalid_argument(
                "last_passage_on_path: doob_exact tail requires a vanishing model");
        out.censored = tail_p > 0.0 && rng.u01() < tail_p;
    } else {
        out.censored = tail_p > 0.0;
    }
    for (std::size_t i = path.values.size() - 1; i-- > 0;) {
        const double a = path.values[i] - K;
        const double b = path.values[i + 1] - K;
        if (a == 0.0 && b == 0.0) continue; // flat at the level after absorption
        if (a * b <= 0.0) {
            if (b == 0.0) {
                out.g = path.times[i + 1];
            } else if (a == 0.0) {
                out.g = path.times[i];
            } else {
                out.g = path.times[i] + path.dt * a / (a - b);
            }
            return out;
        }
    }
    return out;
}

/// Occupation-density local time estimate on the grid:
/// L_t = (1 / 2 eps) sum_{s <= t} 1{|M_s - K| <= eps} d<M>_s.
/// Bias O(eps) + O(sqrt(dt)/eps); callers refine by halving eps.
inline std::vector<double> local_time_estimate(const PathSample& path, double K, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("local_time_estimate: need eps > 0");
    std::vector<double> lt(path.values.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < path.values.size(); ++i) {
        if (std::fabs(path.values[i] - K) <= eps) acc += path.qv_increments[i] / (2.0 * eps);
        lt[i + 1] = acc;
    }
    return lt;
}

/// Exact upper bound for the probability mass misclassified by censoring
/// the window at the horizon: the average of min(terminal/K, 1).
inline double tail_bias_bound(std::span<const PathSample> paths, double K) {
    if (!(K > 0.0)) throw std::invalid_argument("tail_bias_bound: need K > 0");
    double acc = 0.0;
    for (const auto& p : paths) {
        if (p.terminal_kind != TerminalKind::vanishes)
            throw std::invalid_argument("tail_bias_bound: requires a vanishing-terminal model");
        acc += std::min(p.terminal_value / K, 1.0);
    }
    return paths.empty() ? 0.0 : acc / static_cast<double>(paths.size());
}

// ---------------------------------------------------------------------------
// Binary path-batch dump: little-endian, header {magic "LPK1", u32 model id,
// u64 n_paths, u64 grid_size, f64 dt}, then per path values[grid_size],
// running_max[grid_size], qv_increments[grid_size-1], terminal_value,
// absorbed_at (NaN when absent).  See docs/path-dump.md.
// ---------------------------------------------------------------------------

static_assert(std::endian::native == std::endian::little,
              "path dump assumes a little-endian host");

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline void put_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline void put_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
inline std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
inline std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
inline double get_f64(std::istream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

} // namespace detail

inline void write_path_batch(std::ostream& os, const MartingaleModel& model,
                             std::span<const PathSample> paths) {
    if (paths.empty()) throw std::invalid_argument("write_path_batch: empty batch");
    const std::uint64_t grid = paths.front().values.size();
    os.write("LPK1", 4);
    detail::put_u32(os, model.id());
    detail::put_u64(os, paths.size());
    detail::put_u64(os, grid);
    detail::put_f64(os, paths.front().dt);
    for (const auto& p : paths) {
        if (p.values.size() != grid)
            throw std::invalid_argument("write_path_batch: inconsistent grid sizes");
        for (double v : p.values) detail::put_f64(os, v);
        for (double v : p.running_max) detail::put_f64(os, v);
        for (double v : p.qv_increments) detail::put_f64(os, v);
        detail::put_f64(os, p.terminal_value);
        detail::put_f64(os, p.absorbed_at ? *p.absorbed_at
                                          : std::numeric_limits<double>::quiet_NaN());
    }
}

struct PathBatch {
    std::uint32_t model_id = 0;
    double dt = 0.0;
    std::vector<PathSample> paths;
};

inline PathBatch read_path_batch(std::istream& is) {
    char magic[4] = {};
    is.read(magic, 4);
    if (!is || std::string_view(magic, 4) != "LPK1")
        throw std::runtime_error("read_path_batch: bad magic");
    PathBatch batch;
    batch.model_id = detail::get_u32(is);
    const std::uint64_t n_paths = detail::get_u64(is);
    const std::uint64_t grid = detail::get_u64(is);
    batch.dt = detail::get_f64(is);
    batch.paths.resize(n_paths);
    for (auto& p : batch.paths) {
        p.dt = batch.dt;
        p.times.resize(grid);
        for (std::uint64_t i = 0; i < grid; ++i) p.times[i] = static_cast<double>(i) * batch.dt;
        p.values.resize(grid);
        p.running_max.resize(grid);
        p.qv_increments.resize(grid - 1);
        for (auto& v : p.values) v = detail::get_f64(is);
        for (auto& v : p.running_max) v = detail::get_f64(is);
        for (auto& v : p.qv_increments) v = detail::get_f64(is);
        p.terminal_value = detail::get_f64(is);
        const double at = detail::get_f64(is);
        if (!std::isnan(at)) p.absorbed_at = at;
        if (!is) throw std::runtime_error("read_path_batch: truncated stream");
    }
    return batch;
}

} // namespace lpk

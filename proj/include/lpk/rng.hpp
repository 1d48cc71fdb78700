#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace lpk {

/// Philox4x32-10 keyed counter block cipher (Salmon et al.).  Streams are
/// addressed, not seeded: the 128-bit counter holds (block, path) and the
/// 64-bit key mixes the user seed with a stream tag, so any (seed, tag,
/// path_index) triple yields the same numbers no matter how work is
/// scheduled across threads.
namespace philox {

inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

struct Block {
    std::uint32_t v[4];
};

inline Block encrypt(std::uint64_t block, std::uint64_t path, std::uint32_t key0, std::uint32_t key1) {
    std::uint32_t c0 = static_cast<std::uint32_t>(block);
    std::uint32_t c1 = static_cast<std::uint32_t>(block >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(path);
    std::uint32_t c3 = static_cast<std::uint32_t>(path >> 32);
    std::uint32_t k0 = key0, k1 = key1;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t n0 = hi1 ^ c1 ^ k0;
        const std::uint32_t n1 = lo1;
        const std::uint32_t n2 = hi0 ^ c3 ^ k1;
        const std::uint32_t n3 = lo0;
        c0 = n0; c1 = n1; c2 = n2; c3 = n3;
        k0 += kWeyl0; k1 += kWeyl1;
    }
    return Block{{c0, c1, c2, c3}};
}

} // namespace philox

/// FNV-1a, used to derive per-check stream tags from registry names.
inline std::uint32_t stream_tag(std::string_view name) {
    std::uint32_t h = 2166136261u;
    for (unsigned char c : name) {
        h ^= c;
        h *= 16777619u;
    }
    return h;
}

namespace detail {

// Ziggurat tables for the standard normal, 128 layers (Marsaglia & Tsang).
// Built once at startup from the published edge abscissa; the layer area is
// recomputed from erfc and checked against the published value.
struct ZigguratTables {
    static constexpr int kLayers = 128;
    double x[kLayers + 1]; // outer edge per layer; x[0] is the base pseudo-width
    double f[kLayers + 1]; // exp(-x^2/2) at the edges, f[0] aliases f at r
    double r;
    double area;

    ZigguratTables() {
        r = 3.442619855899;
        const double fr = std::exp(-0.5 * r * r);
        const double tail = std::sqrt(1.57079632679489661923) * std::erfc(r * 0.70710678118654752440);
        area = r * fr + tail;
        assert(std::fabs(area - 9.91256303526217e-3) < 1e-12);
        x[0] = area / fr; // base strip: rectangle of height f(r) with the same area
        x[1] = r;
        f[1] = fr;
        for (int i = 1; i < kLayers; ++i) {
            double y = f[i] + area / x[i];
            if (y > 1.0) {
                assert(y - 1.0 < 1e-9 && i == kLayers - 1);
                y = 1.0;
            }
            x[i + 1] = std::sqrt(-2.0 * std::log(y));
            f[i + 1] = y;
        }
        f[0] = f[1];
        assert(std::fabs(x[kLayers]) < 1e-4);
        x[kLayers] = 0.0;
        f[kLayers] = 1.0;
    }
};

// Namespace-scope instance: table loads need no init guard on the hot path.
inline const ZigguratTables ziggurat_tables{};

inline const ZigguratTables& ziggurat() { return ziggurat_tables; }

} // namespace detail

/// One addressed random stream: deterministic in (seed, tag, path_index),
/// with draws consumed strictly sequentially within a path.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint32_t tag, std::uint64_t path_index)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32) ^ tag),
          path_(path_index) {}

    std::uint64_t next_u64() {
        if (pos_ == 0) {
            const philox::Block b = philox::encrypt(block_++, path_, key0_, key1_);
            buf_[0] = (static_cast<std::uint64_t>(b.v[1]) << 32) | b.v[0];
            buf_[1] = (static_cast<std::uint64_t>(b.v[3]) << 32) | b.v[2];
            pos_ = 2;
        }
        return buf_[--pos_];
    }

    /// Uniform on (0,1), never returning an endpoint.
    double u01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    double exponential() { return -std::log(u01()); }

    /// Standard normal by the 128-layer ziggurat; exact (rejection-based).
    double normal() {
        const auto& z = detail::ziggurat();
        for (;;) {
            const std::uint64_t bits = next_u64();
            const int layer = static_cast<int>(bits & 127u);
            const double sign = (bits & 128u) ? -1.0 : 1.0;
            const double u = static_cast<double>(bits >> 11) * 0x1p-53;
            const double xr = u * z.x[layer];
            if (xr < z.x[layer + 1]) return sign * xr;
            if (layer == 0) {
                // Exact tail sample beyond r.
                double xt, yt;
                do {
                    xt = -std::log(u01()) / z.r;
                    yt = -std::log(u01());
                } while (yt + yt < xt * xt);
                return sign * (z.r + xt);
            }
            const double y = z.f[layer] + u01() * (z.f[layer + 1] - z.f[layer]);
            if (y < std::exp(-0.5 * xr * xr)) return sign * xr;
        }
    }

private:
    std::uint32_t key0_, key1_;
    std::uint64_t path_;
    std::uint64_t block_ = 0;
    std::uint64_t buf_[2] = {0, 0};
    int pos_ = 0;
};

} // namespace lpk

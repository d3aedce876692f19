#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace volnmf {

/// Seeded random stream. Wraps mt19937_64 (whose output sequence is fixed by
/// the standard) and derives uniform/normal/gamma variates with explicit
/// arithmetic, so a given seed produces the same stream on every platform.
/// Deliberately avoids std::*_distribution, whose mappings are
/// implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1): rejects exact zeros (needed under logs).
    double uniform01_open() {
        double u;
        do {
            u = uniform01();
        } while (u == 0.0);
        return u;
    }

    /// Standard normal via Box-Muller. No caching of the second variate, so
    /// the stream consumed per call is fixed.
    double normal01() {
        const double u1 = uniform01_open();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// Gamma(alpha, 1) via Marsaglia-Tsang. For alpha < 1 draws from
    /// Gamma(alpha + 1) and applies the U^(1/alpha) boost.
    double gamma(double alpha) {
        if (alpha < 1.0) {
            const double g = gamma(alpha + 1.0);
            const double u = uniform01_open();
            return g * std::pow(u, 1.0 / alpha);
        }
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal01();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Uniformly distributed point on the unit sphere in R^n.
    std::vector<double> unit_sphere(std::size_t n) {
        std::vector<double> y(n);
        for (;;) {
            double norm_sq = 0.0;
            for (auto& v : y) {
                v = normal01();
                norm_sq += v * v;
            }
            if (norm_sq > 1e-24) {
                const double inv = 1.0 / std::sqrt(norm_sq);
                for (auto& v : y) v *= inv;
                return y;
            }
        }
    }

  private:
    static constexpr double kPi = 3.14159265358979323846;
    std::mt19937_64 engine_;
};

/// Decorrelated child seed for an independent substream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace volnmf

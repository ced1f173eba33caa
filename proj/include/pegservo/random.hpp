#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Core>

namespace pegservo {

/// The generator used everywhere. Instances are never shared between trials.
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    if (lo == hi) {
        return lo;
    }
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool bernoulli(Rng& rng, double p) {
    if (p <= 0.0) {
        return false;
    }
    if (p >= 1.0) {
        return true;
    }
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

/// Uniform direction on the unit sphere (normalized isotropic Gaussian).
inline Eigen::Vector3d uniform_unit_vector(Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (;;) {
        Eigen::Vector3d v(normal(rng), normal(rng), normal(rng));
        const double n = v.norm();
        if (n > 1e-12) {
            return v / n;
        }
    }
}

/// Area-uniform point in a disc of the given radius: r = R*sqrt(U), theta = 2*pi*U'.
inline Eigen::Vector2d uniform_disc(Rng& rng, double radius) {
    const double r = radius * std::sqrt(uniform(rng, 0.0, 1.0));
    const double theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    return {r * std::cos(theta), r * std::sin(theta)};
}

/// Derives an independent stream seed from a base seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace pegservo

#pragma once

/**
 * @file random.hpp
 * @brief Portable seeded streams for instance generation.
 *
 * The generator is SplitMix64 (see docs/RNG.md for the bit-exact recipe):
 *
 *     state += 0x9E3779B97F4A7C15
 *     z = state
 *     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
 *     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
 *     return z ^ (z >> 31)
 *
 * Derived draws:
 *   uniform01      (next() >> 11) * 2^-53, in [0, 1)
 *   uniform(a, b)  a + (b - a) * uniform01
 *   discrete(a..b) a + floor(uniform01 * (b - a + 1))
 *   normal         Box-Muller cosine branch with u1 = 1 - uniform01, u2 = uniform01
 *   student_t      shift + scale * Z / sqrt(chi2 / dof), chi2 = sum of dof squared normals
 */

#include <cstdint>
#include <variant>
#include <vector>

namespace drne {

/// SplitMix64 finalizer; used to derive substream seeds.
std::uint64_t mix64(std::uint64_t z);

class SeededStream {
public:
    explicit SeededStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    double uniform01();
    double uniform(double a, double b);
    long long discrete_uniform(long long a, long long b);
    double normal(double mu = 0.0, double sigma = 1.0);
    double student_t(int dof, double scale = 1.0, double shift = 0.0);

    /// Independent stream for a child key; adding keys never disturbs existing children.
    SeededStream substream(std::uint64_t key) const;

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// Seed of the child stream (seed, key).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key);

struct UniformDist { double a = 0.0, b = 1.0; };
struct DiscreteUniformDist { long long a = 0, b = 1; };
struct NormalDist { double mu = 0.0, sigma = 1.0; };
struct StudentTDist { int dof = 3; double scale = 1.0, shift = 0.0; };

using Distribution = std::variant<UniformDist, DiscreteUniformDist, NormalDist, StudentTDist>;

/// `count` draws; throws std::invalid_argument on invalid parameters.
std::vector<double> draw(SeededStream& stream, const Distribution& dist, std::size_t count);

} // namespace drne

#include "drne/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace drne {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
} // namespace

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) {
    return mix64(seed ^ mix64(key + kGamma));
}

std::uint64_t SeededStream::next() {
    state_ += kGamma;
    return mix64(state_);
}

double SeededStream::uniform01() { return static_cast<double>(next() >> 11) * kTwoPow53Inv; }

double SeededStream::uniform(double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("uniform: requires a <= b");
    return a + (b - a) * uniform01();
}

long long SeededStream::discrete_uniform(long long a, long long b) {
    if (a > b) throw std::invalid_argument("discrete_uniform: requires a <= b");
    const double width = static_cast<double>(b - a + 1);
    const auto offset = static_cast<long long>(std::floor(uniform01() * width));
    return a + std::min(offset, b - a);
}

double SeededStream::normal(double mu, double sigma) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("normal: sigma must be nonnegative");
    const double u1 = 1.0 - uniform01(); // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mu + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
}

double SeededStream::student_t(int dof, double scale, double shift) {
    if (dof < 1) throw std::invalid_argument("student_t: dof must be at least 1");
    if (!(scale >= 0.0)) throw std::invalid_argument("student_t: scale must be nonnegative");
    const double z = normal();
    double chi2 = 0.0;
    for (int i = 0; i < dof; ++i) {
        const double g = normal();
        chi2 += g * g;
    }
    return shift + scale * z / std::sqrt(chi2 / dof);
}

SeededStream SeededStream::substream(std::uint64_t key) const {
    return SeededStream(derive_seed(state_, key));
}

std::vector<double> draw(SeededStream& stream, const Distribution& dist, std::size_t count) {
    std::vector<double> out;
    out.reserve(count);
    std::visit(
        [&](const auto& d) {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, UniformDist>) {
                if (!(d.a <= d.b)) throw std::invalid_argument("uniform: requires a <= b");
                for (std::size_t i = 0; i < count; ++i) out.push_back(stream.uniform(d.a, d.b));
            } else if constexpr (std::is_same_v<D, DiscreteUniformDist>) {
                if (d.a > d.b) throw std::invalid_argument("discrete_uniform: requires a <= b");
                for (std::size_t i = 0; i < count; ++i)
                    out.push_back(static_cast<double>(stream.discrete_uniform(d.a, d.b)));
            } else if constexpr (std::is_same_v<D, NormalDist>) {
                if (!(d.sigma >= 0.0)) throw std::invalid_argument("normal: sigma must be nonnegative");
                for (std::size_t i = 0; i < count; ++i) out.push_back(stream.normal(d.mu, d.sigma));
            } else {
                if (d.dof < 1) throw std::invalid_argument("student_t: dof must be at least 1");
                for (std::size_t i = 0; i < count; ++i)
                    out.push_back(stream.student_t(d.dof, d.scale, d.shift));
            }
        },
        dist);
    return out;
}

} // namespace drne

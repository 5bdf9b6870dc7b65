#include "drne/random.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace drne;

TEST_SUITE("random") {

TEST_CASE("SplitMix64 reference outputs") {
    // Published reference values for SplitMix64 seeded with 1234567.
    SeededStream s(1234567);
    CHECK(s.next() == 6457827717110365317ULL);
    CHECK(s.next() == 3203168211198807973ULL);
    CHECK(s.next() == 9817491932198370423ULL);
    CHECK(s.next() == 4593380528125082431ULL);
    CHECK(s.next() == 16408922859458223821ULL);
}

TEST_CASE("same seed gives identical draws") {
    for (const Distribution& d : {Distribution{UniformDist{-1, 2}}, Distribution{DiscreteUniformDist{1, 5}},
                                  Distribution{NormalDist{0, 2}}, Distribution{StudentTDist{3, 1, 0}}}) {
        SeededStream a(99), b(99);
        CHECK(draw(a, d, 1000) == draw(b, d, 1000));
    }
}

TEST_CASE("uniform01 lies in [0, 1)") {
    SeededStream s(3);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("student t moments") {
    SeededStream s(42);
    const auto x = draw(s, StudentTDist{3, 1.0, 0.0}, 100000);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size() - 1);
    CHECK(std::abs(mean) <= 0.05);
    CHECK(std::abs(var - 3.0) <= 0.2);
}

TEST_CASE("normal moments") {
    SeededStream s(43);
    const auto x = draw(s, NormalDist{1.0, 2.0}, 100000);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size() - 1);
    CHECK(std::abs(mean - 1.0) <= 0.03);
    CHECK(std::abs(var - 4.0) <= 0.1);
}

TEST_CASE("discrete uniform frequencies") {
    SeededStream s(44);
    const auto x = draw(s, DiscreteUniformDist{1, 5}, 100000);
    std::array<int, 5> counts{};
    for (double v : x) {
        REQUIRE(v >= 1.0);
        REQUIRE(v <= 5.0);
        REQUIRE(v == std::floor(v));
        ++counts[static_cast<std::size_t>(v) - 1];
    }
    for (int c : counts) CHECK(std::abs(c / 100000.0 - 0.2) <= 0.01);
}

TEST_CASE("invalid parameters") {
    SeededStream s(1);
    CHECK_THROWS_AS(draw(s, UniformDist{1, 0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(draw(s, DiscreteUniformDist{3, 2}, 1), std::invalid_argument);
    CHECK_THROWS_AS(draw(s, NormalDist{0, -1}, 1), std::invalid_argument);
    CHECK_THROWS_AS(draw(s, StudentTDist{0, 1, 0}, 1), std::invalid_argument);
}

TEST_CASE("substreams are independent of sibling count") {
    const SeededStream root(7);
    SeededStream a = root.substream(3);
    SeededStream b = SeededStream(7).substream(3);
    CHECK(a.next() == b.next());
    CHECK(root.substream(1).state() != root.substream(2).state());
    CHECK(derive_seed(7, 3) == SeededStream(7).substream(3).state());
}

}

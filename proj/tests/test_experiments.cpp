#include "drne/experiments.hpp"

#include <doctest.h>

#include <cmath>

using namespace drne;

namespace {

bool same_game(const GameSpec& a, const GameSpec& b) {
    if (a.N != b.N || a.n != b.n || a.m != b.m || a.agents.size() != b.agents.size()) return false;
    for (std::size_t i = 0; i < a.agents.size(); ++i) {
        const AgentSpec &x = a.agents[i], &y = b.agents[i];
        if (x.c != y.c || x.A != y.A || x.b != y.b || x.Q != y.Q || x.radius != y.radius ||
            x.samples.rows() != y.samples.rows() || x.samples != y.samples)
            return false;
        for (std::size_t j = 0; j < x.H.size(); ++j)
            if (x.H[j] != y.H[j]) return false;
    }
    return true;
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("illustrative shape and ranges") {
    ScenarioConfig cfg;
    const GameSpec g = gen_illustrative(cfg);
    REQUIRE(g.agents.size() == 4);
    for (const AgentSpec& a : g.agents) {
        CHECK(a.samples.rows() >= 10);
        CHECK(a.samples.rows() <= 20);
        const double ratio = a.radius / cfg.epsilon;
        CHECK(ratio == std::round(ratio));
        CHECK(ratio >= 1.0);
        CHECK(ratio <= 5.0);
        CHECK(a.local_set.kind == LocalSet::Kind::box);
        CHECK(a.samples.minCoeff() >= 0.0);
        CHECK(a.samples.maxCoeff() < 1.0);
    }
    CHECK_NOTHROW(validate_game(g));
}

TEST_CASE("generation is deterministic") {
    ScenarioConfig cfg;
    CHECK(same_game(generate(cfg, 3), generate(cfg, 3)));
    CHECK_FALSE(same_game(generate(cfg, 3), generate(cfg, 4)));
    cfg.family = Family::portfolio;
    cfg.n = cfg.m = 3;
    CHECK(same_game(generate(cfg, 0), generate(cfg, 0)));
}

TEST_CASE("instances share structure and differ in samples") {
    ScenarioConfig cfg;
    const GameSpec a = generate(cfg, 0), b = generate(cfg, 1);
    for (std::size_t i = 0; i < a.agents.size(); ++i) {
        CHECK(a.agents[i].Q == b.agents[i].Q);
        CHECK(a.agents[i].c == b.agents[i].c);
        CHECK(a.agents[i].radius == b.agents[i].radius);
    }
}

TEST_CASE("adding agents keeps existing draws") {
    ScenarioConfig small;
    ScenarioConfig large = small;
    large.N = 6;
    const GameSpec a = generate(small), b = generate(large);
    for (std::size_t i = 0; i < a.agents.size(); ++i) {
        CHECK(a.agents[i].Q == b.agents[i].Q);
        CHECK(a.agents[i].c == b.agents[i].c);
        CHECK(a.agents[i].H[i] == b.agents[i].H[i]);
        CHECK(a.agents[i].radius == b.agents[i].radius);
        CHECK(a.agents[i].samples == b.agents[i].samples);
    }
}

TEST_CASE("generated games validate for many seeds") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        ScenarioConfig cfg;
        cfg.seed = seed;
        REQUIRE_NOTHROW(validate_game(generate(cfg)));
        cfg.family = Family::portfolio;
        cfg.n = cfg.m = 3;
        REQUIRE_NOTHROW(validate_game(generate(cfg)));
        REQUIRE_NOTHROW(validate_game(gen_random_instance(seed)));
    }
}

TEST_CASE("portfolio structure") {
    ScenarioConfig cfg;
    cfg.family = Family::portfolio;
    cfg.n = cfg.m = 3;
    const GameSpec g = generate(cfg);
    for (const AgentSpec& a : g.agents) {
        CHECK(a.local_set.kind == LocalSet::Kind::simplex);
        for (int j = 0; j < g.N; ++j) CHECK(a.A.middleCols(j * 3, 3).isIdentity());
        CHECK((a.c.array() <= 0.0).all());
    }
    cfg.m = 2;
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
}

TEST_CASE("config validation") {
    ScenarioConfig cfg;
    cfg.sample_range = {5, 4};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ScenarioConfig{};
    cfg.epsilon_grid = {1.0, -1.0};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ScenarioConfig{};
    cfg.distribution.kind = "cauchy";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = ScenarioConfig{};
    cfg.instances = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("quantiles") {
    const CostQuantiles q = quantiles({5.0, 1.0, 3.0, 2.0, 4.0});
    CHECK(q.min == 1.0);
    CHECK(q.q25 == 2.0);
    CHECK(q.median == 3.0);
    CHECK(q.q75 == 4.0);
    CHECK(q.max == 5.0);
    const CostQuantiles r = quantiles({0.0, 1.0});
    CHECK(r.median == 0.5);
    CHECK(r.q25 == 0.25);
    CHECK(quantiles({7.0}).q75 == 7.0);
    CHECK_THROWS_AS(quantiles({}), std::invalid_argument);
}

TEST_CASE("aggregation is pure in its input") {
    std::vector<InstanceResult> in(3);
    for (std::size_t k = 0; k < 3; ++k) {
        in[k].instance = k;
        in[k].agraal.costs = {double(k), 10.0 + double(k)};
    }
    const auto a = aggregate_costs(in, 2);
    const auto b = aggregate_costs(in, 2);
    REQUIRE(a.size() == 2);
    CHECK(a[0].median == 1.0);
    CHECK(a[1].max == 12.0);
    CHECK(a[1].median == b[1].median);
}

TEST_CASE("small sweep") {
    ScenarioConfig cfg;
    cfg.instances = 2;
    cfg.epsilon_grid = {1e-2, 1e-1};
    cfg.solver.max_iters = 300;
    const SweepReport one = run_sweep(cfg, 1);
    const SweepReport many = run_sweep(cfg, 4);
    REQUIRE(one.cells.size() == 2);
    for (std::size_t c = 0; c < 2; ++c) {
        REQUIRE(one.cells[c].instances.size() == 2);
        REQUIRE(one.cells[c].cost_quantiles.size() == 4);
        for (std::size_t k = 0; k < 2; ++k) {
            CHECK(one.cells[c].instances[k].agraal.z == many.cells[c].instances[k].agraal.z);
            CHECK(one.cells[c].instances[k].hybrid.z == many.cells[c].instances[k].hybrid.z);
        }
    }
    CHECK(one.cells[1].epsilon == 1e-1);
}

}

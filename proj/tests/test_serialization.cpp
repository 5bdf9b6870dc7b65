#include "drne/serialization.hpp"

#include <doctest.h>

#include <sstream>

using namespace drne;

TEST_SUITE("serialization") {

TEST_CASE("game round trip is exact") {
    ScenarioConfig cfg;
    for (Family f : {Family::illustrative, Family::portfolio}) {
        cfg.family = f;
        cfg.n = cfg.m = f == Family::portfolio ? 3 : 2;
        const GameSpec g = generate(cfg, 2);
        const Json doc = to_json(g);
        const GameSpec back = game_from_json(parse_json(doc.dump()));
        CHECK(to_json(back).dump() == doc.dump());
        REQUIRE(back.agents.size() == g.agents.size());
        CHECK(back.agents[0].samples == g.agents[0].samples);
        CHECK(back.agents[1].Q == g.agents[1].Q);
        CHECK(back.agents[0].local_set.kind == g.agents[0].local_set.kind);
    }
}

TEST_CASE("solver params keep base defaults") {
    SolverParams base;
    base.max_iters = 77;
    const SolverParams p = solver_params_from_json(parse_json(R"({"tol": 1e-8})"), base);
    CHECK(p.tol == 1e-8);
    CHECK(p.max_iters == 77);
    const SolverParams q = solver_params_from_json(to_json(p));
    CHECK(to_json(q).dump() == to_json(p).dump());
    CHECK_THROWS_AS(solver_params_from_json(parse_json(R"({"max_iters": -3})")), ParseError);
    CHECK_THROWS_AS(solver_params_from_json(parse_json(R"([1, 2])")), ParseError);
}

TEST_CASE("scenario config round trip") {
    const ScenarioConfig cfg = scenario_from_json(parse_json(R"({
        "family": "portfolio", "N": 3, "seed": 9, "epsilon_grid": [1e-6, 1],
        "sample_range": [5, 8], "instances": 4,
        "solver": {"max_iters": 1000},
        "distribution": {"kind": "normal", "scale": 0.5}
    })"));
    CHECK(cfg.family == Family::portfolio);
    CHECK(cfg.n == 3);
    CHECK(cfg.m == 3);
    CHECK(cfg.N == 3);
    CHECK(cfg.seed == 9);
    CHECK(cfg.epsilon_grid == std::vector<double>{1e-6, 1.0});
    CHECK(cfg.sample_range == SampleRange{5, 8});
    CHECK(cfg.solver.max_iters == 1000);
    CHECK(cfg.distribution.kind == "normal");
    const ScenarioConfig back = scenario_from_json(to_json(cfg));
    CHECK(to_json(back).dump() == to_json(cfg).dump());
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_json("{not json"), ParseError);
    CHECK_THROWS_AS(scenario_from_json(parse_json(R"({"family": "weather"})")), ParseError);
    CHECK_THROWS_AS(scenario_from_json(parse_json(R"({"sample_range": [3]})")), ParseError);
    CHECK_THROWS_AS(scenario_from_json(parse_json(R"({"sample_range": [9, 3]})")), ParseError);
    CHECK_THROWS_AS(scenario_from_json(parse_json(R"({"family": "portfolio", "n": 3, "m": 2})")), ParseError);
    CHECK_THROWS_AS(game_from_json(parse_json(R"({"N": 1})")), ParseError);
    Json g = to_json(generate(ScenarioConfig{}));
    g["agents"][0]["Q"] = Json::array({Json::array({1.0, 2.0}), Json::array({3.0})});
    CHECK_THROWS_AS(game_from_json(g), ParseError);
}

TEST_CASE("trace csv") {
    RunReport r;
    r.trace = {{1, 0.5, 1.0, 1.5}, {2, 0.25, 0.1, 10.0}};
    const std::string csv = trace_csv(r);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "iter,residual,tau,phi");
    std::getline(in, line);
    CHECK(line == "1,0.5,1,1.5");
    std::getline(in, line);
    CHECK(line == "2,0.25,0.10000000000000001,10");
}

TEST_CASE("quantile csv has one row per cell and agent") {
    SweepReport rep;
    rep.config.N = 2;
    for (int c = 0; c < 3; ++c) {
        SweepCell cell;
        cell.label = "c" + std::to_string(c);
        cell.cost_quantiles = {{1, 2, 3, 4, 5}, {6, 7, 8, 9, 10}};
        rep.cells.push_back(cell);
    }
    const std::string csv = cost_quantiles_csv(rep);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "agent,cell,min,q25,median,q75,max");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 6);
}

TEST_CASE("run report json omits wall time") {
    RunReport r;
    r.wall_seconds = 3.0;
    r.trace = {{1, 0.0, 1.0, 1.5}};
    r.z = Vector::Zero(2);
    r.z0 = Vector::Zero(2);
    const Json j = to_json(r, "agraal");
    CHECK(j.dump().find("wall") == std::string::npos);
    CHECK(j.at("algorithm") == "agraal");
}

}

#pragma once

/**
 * @file serialization.hpp
 * @brief JSON documents and CSV tables exchanged by the library and the CLI.
 *
 * Matrices are row-major nested arrays of doubles. Doubles are written in
 * shortest round-trip form, so identical inputs give identical bytes.
 * Wall-clock times are never serialized.
 */

#include "drne/experiments.hpp"
#include "drne/game.hpp"
#include "drne/solvers.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace drne {

using Json = nlohmann::json;

/// Malformed or incomplete document.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Json to_json(const GameSpec& game);
GameSpec game_from_json(const Json& doc);

Json to_json(const SolverParams& params);
/// Missing fields keep their defaults from `base`. Out-of-range values raise ParseError.
SolverParams solver_params_from_json(const Json& doc, SolverParams base = {});

Json to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const Json& doc);

Json to_json(const RunReport& report, const std::string& algorithm);
Json to_json(const SweepReport& report);

/// Columns: iter,residual,tau,phi
std::string trace_csv(const RunReport& report);

/// Columns: agent,cell,min,q25,median,q75,max (one row per cell and agent).
std::string cost_quantiles_csv(const SweepReport& report);

/// Parses text as JSON, mapping syntax errors to ParseError.
Json parse_json(const std::string& text);

} // namespace drne

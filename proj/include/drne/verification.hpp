#pragma once

/**
 * @file verification.hpp
 * @brief Seeded oracle battery behind the `verify` command.
 *
 * Every gate draws its instances from derive_seed(seed, gate key), so a
 * battery is a pure function of its options.
 */

#include "drne/solvers.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace drne {

struct GateResult {
    std::string name;
    bool passed = false;
    double value = 0.0;     ///< worst observed statistic
    double threshold = 0.0; ///< gate passes when value <= threshold
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 42;
    std::size_t gradient_instances = 100;
    std::size_t inner_sup_triples = 500;
    std::size_t linear_cases = 100;
    std::size_t convergence_instances = 4;
    SolverParams solver;
};

struct VerifyReport {
    std::vector<GateResult> gates;
    bool all_passed() const;
};

/// Random interior point of Z: x_i uniform in X_i (or a projected draw), lambda_i = floor + U(0.1, 2).
Vector random_interior_point(const VIProblem& problem, std::uint64_t seed);

struct DualityOutcome {
    double dual_value = 0.0;     ///< J_i - f_i at the solver's lambda
    double analytic_value = 0.0; ///< mean_k P^T xi_k + eps ||P||
    double lambda = 0.0;
    double lambda_star = 0.0;
    bool converged = false;
};

/**
 * One seeded Q = 0 case: a single agent with x pinned by a degenerate box, so
 * the solver only moves lambda. Requires a tight solver tolerance.
 */
DualityOutcome linear_duality_case(std::uint64_t seed, const SolverParams& params);

/// Relative error with a unit floor: |a - b| / max(1, |b|).
double rel_error(double a, double b);

VerifyReport verify_battery(const VerifyOptions& options);

} // namespace drne

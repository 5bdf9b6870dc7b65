#pragma once

/**
 * @file oracle.hpp
 * @brief Brute-force and analytic checks that do not go through the closed forms.
 *
 * The reformulated objective and its gradient are re-derived here in the
 * original (unrotated) coordinates with M = (lambda I - Q)^{-1} applied by a
 * Cholesky solve, per sample:
 *
 *     J_i = f_i + lambda eps^2 + mean_k [ 1/4 w_k^T M w_k - lambda ||xi_k||^2 ],  w_k = P(x) + 2 lambda xi_k
 *     dJ/dx_i     = grad f_i + 1/2 (A^(i))^T M mean_k w_k
 *     dJ/dlambda  = eps^2 + mean_k [ xi_k^T M w_k - 1/4 ||M w_k||^2 - ||xi_k||^2 ]
 *
 * No eigendecomposition or sufficient statistic is used.
 */

#include "drne/reformulation.hpp"
#include "drne/types.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace drne {

struct GradCheckReport {
    double max_rel_error = 0.0;     ///< max_c |F_c - FD_c| / max(1, |F_c|)
    Eigen::Index worst_index = -1;  ///< stacked coordinate attaining it
    double step = 0.0;
};

/// Central differences of agent_objective in every (x_i, lambda_i) coordinate against mapping().
/// Requires lambda_i >= lambda_floor_i + 10 step; throws std::invalid_argument otherwise.
GradCheckReport fd_gradient_check(const VIProblem& problem, const Vector& z, double step = 1e-5);

struct AscentParams {
    double stationarity = 1e-10; ///< stop when ||grad|| <= stationarity * max(1, ||P + 2 lambda xi_k||)
    std::size_t budget = 10000;
    double armijo = 1e-4;
    double shrink = 0.5;
};

/// sup over xi of xi^T Q xi + P(x)^T xi - lambda ||xi - xi_k||^2 by backtracking gradient ascent.
/// Throws std::domain_error when lambda <= lambda_max(Q) + 1e-9 (objective not strictly concave)
/// and std::runtime_error when the budget runs out before stationarity.
double numeric_inner_sup(const AgentSpec& agent, const Vector& x, double lambda, std::size_t k,
                         const AscentParams& params = {});

struct LinearCaseValue {
    double value = 0.0;                ///< mean_k P(x)^T xi_k + eps ||P(x)||
    std::optional<double> lambda_star; ///< ||P(x)|| / (2 eps); absent when eps = 0 or P(x) = 0
};

/// Worst-case expectation for Q = 0 in closed form. Throws std::invalid_argument if Q != 0.
LinearCaseValue linear_case_value(const AgentSpec& agent, const Vector& x);

/// J_i(z) evaluated per sample in original coordinates.
double oracle_agent_objective(const VIProblem& problem, std::size_t i, const Vector& z);

/// grad_{(x_i, lambda_i)} J_i for every agent, per sample in original coordinates.
Vector oracle_pseudogradient(const VIProblem& problem, const Vector& z);

struct DescentParams {
    std::size_t budget = 10000;
    double armijo = 1e-4;
    double shrink = 0.5;
    double initial_step = 1.0;
};

/// Lowest J_i found by projected gradient descent over (x_i, lambda_i) with x_{-i} fixed,
/// starting from `start` (a stacked point whose other blocks are ignored in favour of z).
double best_response_value(const VIProblem& problem, std::size_t i, const Vector& z, const Vector& start,
                           const DescentParams& params = {});

/// Per agent: J_i(z) - best_response_value starting at z. Gaps are >= 0.
std::vector<double> best_response_gap(const VIProblem& problem, const Vector& z,
                                      const DescentParams& params = {});

} // namespace drne

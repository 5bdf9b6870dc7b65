#pragma once

/**
 * @file solvers.hpp
 * @brief Adaptive golden ratio equilibrium seeking on a VIProblem.
 *
 * One iteration (momentum phi_k, golden-ratio parameter alpha, rho = 1/alpha + 1/alpha^2):
 *
 *     tau_k     = min{ rho tau_{k-1},
 *                      alpha theta_{k-1} / (4 tau_{k-1}) * ||z^k - z^{k-1}||^2 / ||F(z^k) - F(z^{k-1})||^2,
 *                      tau_bar }
 *     zbar^k    = ((phi_k - 1) z^k + zbar^{k-1}) / phi_k
 *     z^{k+1}   = Pi_Z(zbar^k - tau_k F(z^k))
 *     theta_k+1 = alpha tau_k / tau_{k-1}
 *
 * aGRAAL keeps phi_k = alpha. The hybrid variant tries a large momentum
 * phi_bar and, when a switch predicate rejects the resulting step, restores
 * the previous iterate, averaged point, stepsize and theta and continues
 * with phi = alpha.
 */

#include "drne/reformulation.hpp"
#include "drne/types.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace drne {

inline constexpr double kGoldenRatio = 1.6180339887498948482;

struct SolverParams {
    double tau0 = 1.0;
    double tau_bar = 1e6;
    double alpha = 1.5;
    double phi_bar = 10.0;
    double tol = 1e-6;
    std::size_t max_iters = 200000;
    /// Every iteration up to record_all_until is traced, then every record_every-th.
    std::size_t record_every = 10;
    std::size_t record_all_until = 10000;

    double rho() const { return 1.0 / alpha + 1.0 / (alpha * alpha); }

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

struct TraceRow {
    std::size_t iter = 0;
    double residual = 0.0;
    double tau = 0.0;
    double phi = 0.0;
};

using TraceSink = std::function<void(const TraceRow&)>;

enum class RunStatus { converged, max_iterations, non_finite };

const char* to_string(RunStatus status);

struct RunReport {
    RunStatus status = RunStatus::max_iterations;
    bool converged = false;
    std::size_t iterations = 0;
    double final_residual = 0.0;
    std::vector<TraceRow> trace;
    Vector z0;                 ///< projected starting point
    Vector z;                  ///< final iterate
    std::vector<double> costs; ///< J_i(z) per agent
    std::size_t reverted_steps = 0;
    double wall_seconds = 0.0;
    std::string diagnostic;    ///< set when status == non_finite
};

/**
 * Stepsize rule. The curvature candidate is dropped when ||dF||^2 < 1e-300
 * (which also covers dz = dF = 0).
 */
double stepsize_update(double tau_prev, double theta_prev, double dz_sq, double dF_sq,
                       const SolverParams& params);

/// x_i = Pi_{X_i}(0), lambda_i = lambda_floor_i + 1.
Vector default_initial_point(const VIProblem& problem);

/// aGRAAL. z0 is projected onto Z; the auxiliary second point is one projected step with tau0.
RunReport agraal_solve(const VIProblem& problem, const SolverParams& params, const Vector& z0,
                       const TraceSink& sink = {});

/// What a switch predicate sees after each hybrid step.
struct SwitchContext {
    std::size_t iter = 0;            ///< iteration that produced the candidate
    bool large_momentum = false;     ///< candidate was produced with phi_bar
    double candidate_residual = 0.0; ///< natural residual at the candidate
    double tau = 0.0;                ///< stepsize used for the candidate
    std::span<const double> history; ///< residuals of accepted iterates, oldest first
};

/**
 * Decides the momentum of the next step. For a large-momentum candidate,
 * false means "revert this step"; for an alpha-momentum step, true means
 * "try phi_bar next". Predicates may keep state; each solve gets its own copy.
 */
using SwitchPredicate = std::function<bool(const SwitchContext&)>;

/// Never leaves alpha momentum; hybrid_solve then reproduces agraal_solve bit for bit.
SwitchPredicate never_switch();

/**
 * Default predicate: a large-momentum candidate is kept while its residual does
 * not exceed the median residual of the last `window` accepted iterates; after
 * a rejection, alpha momentum runs for `cooldown` iterations before retrying.
 */
SwitchPredicate median_window_switch(std::size_t window = 10, std::size_t cooldown = 10);

RunReport hybrid_solve(const VIProblem& problem, const SolverParams& params, const Vector& z0,
                       SwitchPredicate predicate = median_window_switch(), const TraceSink& sink = {});

/// Solves the same game for several zeta shifts (each run starts from the default point).
std::vector<RunReport> zeta_sweep(const ValidatedGame& game, const SolverParams& params,
                                  std::span<const double> zetas);

} // namespace drne

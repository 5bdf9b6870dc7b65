#pragma once

/**
 * @file reformulation.hpp
 * @brief Finite-dimensional reformulation of the robust game and its VI mapping.
 *
 * For agent i with Q_i = L^T diag(d) L, rotated affine term P~ = L P_i(x),
 * rotated samples xi~_k = L xi_k and dual multiplier lambda > d[0], the inner
 * supremum per sample has the closed form
 *
 *     sup_xi [xi^T Q xi + P^T xi - lambda ||xi - xi_k||^2]
 *         = 1/4 W~_k^T (lambda I - D)^{-1} W~_k - lambda ||xi_k||^2,
 *     W~_k = P~ + 2 lambda xi~_k,
 *
 * and the agent's reformulated objective is
 *
 *     J_i = f_i(x) + lambda eps^2 + mean_k sup_k.
 *
 * Per coordinate j the sample mean collapses to sufficient statistics
 * mu1_j = mean_k xi~_kj and mu2_j = mean_k xi~_kj^2:
 *
 *     mean_k sup_k = sum_j (P~_j^2 + 4 lambda P~_j mu1_j + 4 lambda d_j mu2_j) / (4 (lambda - d_j)),
 *
 * which avoids the cancellation between the quadratic term and
 * -lambda ||xi_k||^2 and makes every evaluation O(m) per agent, independent of
 * the sample count. The pseudogradient F_i = grad_{(x_i, lambda_i)} J_i is
 *
 *     x-block:      grad f_i + (L A_i^(i))^T g,   g_j = (P~_j + 2 lambda mu1_j) / (2 (lambda - d_j))
 *     lambda-block: eps^2 - sum_j (P~_j^2 + 4 d_j P~_j mu1_j + 4 d_j^2 mu2_j) / (4 (lambda - d_j)^2)
 *
 * The rotation L enters the x-block through A~ = L A_i; the lambda-block is the
 * literal derivative of the diagonal (lambda I - D)^{-1}.
 */

#include "drne/game.hpp"
#include "drne/spectral.hpp"
#include "drne/types.hpp"

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace drne {

/// Raised when lambda <= lambda_max(Q): the inner supremum is +infinity.
class InfiniteSupremum : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Agent data expressed in the eigenbasis of Q.
struct RotatedAgentData {
    SpectralDecomposition decomposition;
    Matrix A_rot;          ///< L A, m x nN
    Vector b_rot;          ///< L b
    Matrix samples_rot;    ///< K x m, rows L xi_k
    Vector sample_sq_norms;///< ||xi_k||^2
    Vector mean_rot;       ///< mu1 = mean_k xi~_k
    Vector mean_sq_rot;    ///< mu2 = mean_k xi~_k (elementwise square)
    double mean_sq_norm = 0.0;
    double lambda_floor = 0.0; ///< d[0] + zeta

    /// P~(x) = L (A x + b).
    Vector rotated_affine(const Vector& x) const { return A_rot * x + b_rot; }
};

/// Rotates an agent into the eigenbasis of its Q (computed here).
RotatedAgentData rotate_agent(const AgentSpec& agent, double zeta);

/// Same, reusing an already computed decomposition of Q.
RotatedAgentData rotate_agent(const AgentSpec& agent, const SpectralDecomposition& spectrum, double zeta);

/// Closed-form sup over xi for sample k. Throws InfiniteSupremum when lambda <= d[0].
double inner_sup(const RotatedAgentData& agent, const Vector& x, double lambda, std::size_t k);

/// Optional replacement for the quadratic f_i: (agent position, collective x) -> value and gradient in x_i.
using CostCallback = std::function<CostEval(std::size_t, const Vector&)>;

/**
 * The VI of the reformulated game: mapping F over
 * Z = prod_i X_i x [lambda_floor_i, inf), with z stacked per agent as (x_i, lambda_i).
 */
class VIProblem {
public:
    explicit VIProblem(ValidatedGame game, double zeta = kDefaultZeta);
    VIProblem(ValidatedGame game, std::vector<double> zeta);

    const ValidatedGame& game() const noexcept { return game_; }
    const RotatedAgentData& rotated(std::size_t i) const { return rotated_.at(i); }
    const std::vector<double>& zeta() const noexcept { return zeta_; }

    std::size_t num_agents() const noexcept { return rotated_.size(); }
    Eigen::Index n() const noexcept { return game_.n(); }
    Eigen::Index block_size() const noexcept { return game_.n() + 1; }
    Eigen::Index dimension() const noexcept {
        return block_size() * static_cast<Eigen::Index>(num_agents());
    }
    double lambda_floor(std::size_t i) const { return rotated_.at(i).lambda_floor; }

    Eigen::Index x_offset(std::size_t i) const { return static_cast<Eigen::Index>(i) * block_size(); }
    Eigen::Index lambda_index(std::size_t i) const { return x_offset(i) + n(); }

    /// Collective decision x (length nN) extracted from a stacked z.
    Vector collective_x(const Vector& z) const;

    /// Installs a non-quadratic f_i (value + own gradient). Empty resets to the quadratic form.
    void set_cost_callback(CostCallback cb) { cost_ = std::move(cb); }
    CostEval cost(std::size_t i, const Vector& x) const;

private:
    void build();

    ValidatedGame game_;
    std::vector<double> zeta_;
    std::vector<RotatedAgentData> rotated_;
    CostCallback cost_;
};

/// J_i(z). Throws InfiniteSupremum when lambda_i <= d_i[0].
double agent_objective(const VIProblem& problem, std::size_t i, const Vector& z);

/// Stacked pseudogradient F(z). Throws InfiniteSupremum on infeasible lambda.
Vector mapping(const VIProblem& problem, const Vector& z);

/// ||z - Pi_Z(z - F(z))||_2.
double natural_residual(const VIProblem& problem, const Vector& z);

/// Same, reusing a precomputed F(z).
double natural_residual(const VIProblem& problem, const Vector& z, const Vector& Fz);

} // namespace drne

#pragma once

/**
 * @file game.hpp
 * @brief Data of a quadratic-bilinear Wasserstein distributionally robust game.
 *
 * Agent i chooses x_i in X_i (dimension n) and faces the cost
 *
 *     f_i(x) + sup_{Q in ball(eps_i)} E_Q[ xi^T Q_i xi + P_i(x)^T xi ],
 *
 * where the ball is a type-2 Wasserstein ball around the empirical
 * distribution of the agent's own samples, P_i(x) = A_i x + b_i, and
 *
 *     f_i(x) = sum_j x_i^T H_i[j] x_j + c_i^T x_i.
 *
 * The collective decision x stacks x_1..x_N (length n*N).
 */

#include "drne/spectral.hpp"
#include "drne/types.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace drne {

/// Local constraint set X_i.
struct LocalSet {
    enum class Kind { box, simplex, orthant };

    Kind kind = Kind::orthant;
    Vector lo; ///< box only
    Vector hi; ///< box only

    static LocalSet box(Vector lo, Vector hi);
    static LocalSet simplex() { return LocalSet{Kind::simplex, {}, {}}; }
    static LocalSet orthant() { return LocalSet{Kind::orthant, {}, {}}; }
};

const char* to_string(LocalSet::Kind kind);

struct AgentSpec {
    int index = 1;              ///< 1-based agent id
    std::vector<Matrix> H;      ///< N blocks, n x n; H[i] is the own-quadratic block
    Vector c;                   ///< n
    Matrix A;                   ///< m x (n*N)
    Vector b;                   ///< m
    Matrix Q;                   ///< m x m, symmetric PSD
    double radius = 0.0;        ///< Wasserstein radius eps_i
    Matrix samples;             ///< K_i x m, one sample per row
    LocalSet local_set;

    std::size_t sample_count() const { return static_cast<std::size_t>(samples.rows()); }

    /// P_i(x) = A x + b.
    Vector affine_term(const Vector& x) const { return A * x + b; }
};

struct GameSpec {
    int N = 0;
    int n = 0;
    int m = 0;
    std::vector<AgentSpec> agents;
};

/// Thrown by validate_game; carries every violation found.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    std::vector<std::string> issues_;
};

/// A game that passed validate_game. Immutable; Q spectra are cached.
class ValidatedGame {
public:
    const GameSpec& spec() const noexcept { return spec_; }
    const AgentSpec& agent(std::size_t i) const { return spec_.agents.at(i); }
    std::size_t num_agents() const noexcept { return spec_.agents.size(); }
    int n() const noexcept { return spec_.n; }
    int m() const noexcept { return spec_.m; }

    /// Eigendecomposition of agent i's Q (eigenvalues within -tolerance clipped to 0).
    const SpectralDecomposition& q_spectrum(std::size_t i) const { return spectra_.at(i); }

    /// Non-fatal repairs applied during validation (symmetrization, clipping).
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    friend ValidatedGame validate_game(GameSpec spec);
    GameSpec spec_;
    std::vector<SpectralDecomposition> spectra_;
    std::vector<std::string> warnings_;
};

/// Checks dimensions, symmetry, PSD-ness, radii and sample sets.
/// Throws ValidationError listing all violations.
ValidatedGame validate_game(GameSpec spec);

struct CostEval {
    double value = 0.0;
    Vector gradient; ///< with respect to the agent's own x_i
};

/// Quadratic deterministic cost f_i and its gradient in x_i.
/// `agent_pos` is the zero-based position of the agent in the game.
CostEval deterministic_cost(const AgentSpec& agent, std::size_t agent_pos, const Vector& x);

} // namespace drne

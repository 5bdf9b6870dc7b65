#pragma once

/**
 * @file experiments.hpp
 * @brief Seeded instance generators for the two case studies and sweep orchestration.
 *
 * Seeding: the structural data of agent i (costs, coupling, Q, radius multiplier)
 * comes from the stream derive_seed(seed, i); its sample count and samples come
 * from derive_seed(derive_seed(seed, kSampleKey + instance), i). Instance k of a
 * sweep therefore shares the game structure and differs only in the private data,
 * and adding agents never changes existing agents' Q, radius, c, own block or samples.
 */

#include "drne/game.hpp"
#include "drne/random.hpp"
#include "drne/solvers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace drne {

enum class Family { illustrative, portfolio };

const char* to_string(Family f);

struct DistributionConfig {
    std::string kind = "student_t"; ///< "student_t" | "normal" | "uniform"
    int dof = 3;
    double scale = 1.0;
    double shift = 0.0;
};

using SampleRange = std::pair<int, int>;

struct ScenarioConfig {
    Family family = Family::illustrative;
    int N = 4;
    int n = 2;
    int m = 2;
    std::uint64_t seed = 42;
    double epsilon = 1e-2;                 ///< base radius; eps_i = epsilon * U{1..5}
    std::vector<double> epsilon_grid;      ///< sweep cells over epsilon (empty: {epsilon})
    SampleRange sample_range{10, 20};
    std::vector<SampleRange> sample_range_grid; ///< sweep cells over K ranges (empty: {sample_range})
    std::size_t instances = 10;
    DistributionConfig distribution;
    double zeta = kDefaultZeta;
    /// Illustrative only: curvature scale of the seeded quadratic part of f_i (c_i is not scaled).
    double cost_scale = 0.01;
    /// Scale of the cross blocks H_ij (both families), divided by N.
    double coupling = 0.5;
    SolverParams solver;

    /// Throws std::invalid_argument when ranges are empty or values out of range.
    void validate() const;
};

/// Stream key separating sample draws from structural draws.
inline constexpr std::uint64_t kSampleKey = 0x5A4D504C45ULL;

GameSpec gen_illustrative(const ScenarioConfig& config, std::size_t instance = 0);
GameSpec gen_portfolio(const ScenarioConfig& config, std::size_t instance = 0);

/// Dispatches on config.family.
GameSpec generate(const ScenarioConfig& config, std::size_t instance = 0);

/// Random well-formed game for oracle batteries: N <= max_N, n <= max_n, m <= max_m, K <= max_K.
GameSpec gen_random_instance(std::uint64_t seed, int max_N = 4, int max_n = 3, int max_m = 3, int max_K = 20);

/// Random Q = V diag(e) V^T with e ~ U(0, max_eig) and V a product of seeded plane rotations.
Matrix random_psd(SeededStream& stream, int m, double max_eig);

struct CostQuantiles {
    double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
};

/// Linear-interpolation quantiles (R type 7) of the values; values must be nonempty.
CostQuantiles quantiles(std::vector<double> values);

struct InstanceResult {
    std::size_t instance = 0;
    RunReport agraal;
    RunReport hybrid;
};

struct SweepCell {
    std::string label;
    double epsilon = 0.0;
    SampleRange sample_range{0, 0};
    std::vector<InstanceResult> instances;
    std::vector<CostQuantiles> cost_quantiles; ///< per agent, over aGRAAL equilibrium costs
};

struct SweepReport {
    ScenarioConfig config;
    std::vector<SweepCell> cells;
};

/// Per-agent quantiles of the aGRAAL equilibrium costs; pure in its input.
std::vector<CostQuantiles> aggregate_costs(const std::vector<InstanceResult>& instances, int N);

/// Cells = epsilon grid x sample-range grid; every instance is solved with both algorithms.
/// Instances run on up to `threads` workers (0: hardware concurrency); results do not depend on it.
SweepReport run_sweep(const ScenarioConfig& config, unsigned threads = 0);

} // namespace drne

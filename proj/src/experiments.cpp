#include "drne/experiments.hpp"

#include "drne/reformulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace drne {

const char* to_string(Family f) {
    return f == Family::illustrative ? "illustrative" : "portfolio";
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("ScenarioConfig: " + what); };
    if (N < 1 || n < 1 || m < 1) fail("N, n and m must be positive");
    if (family == Family::portfolio && m != n) fail("portfolio family requires m == n");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) fail("epsilon must be nonnegative");
    for (double e : epsilon_grid)
        if (!(e >= 0.0) || !std::isfinite(e)) fail("epsilon_grid entries must be nonnegative");
    auto check_range = [&](const SampleRange& r) {
        if (r.first < 1 || r.first > r.second) fail("sample ranges must satisfy 1 <= lo <= hi");
    };
    check_range(sample_range);
    for (const auto& r : sample_range_grid) check_range(r);
    if (instances < 1) fail("instances must be at least 1");
    if (!(zeta > 0.0)) fail("zeta must be positive");
    if (!(cost_scale > 0.0) || !std::isfinite(cost_scale)) fail("cost_scale must be positive");
    if (!(coupling >= 0.0) || !std::isfinite(coupling)) fail("coupling must be nonnegative");
    if (distribution.kind != "student_t" && distribution.kind != "normal" && distribution.kind != "uniform")
        fail("distribution.kind must be student_t, normal or uniform");
    if (distribution.dof < 1) fail("distribution.dof must be at least 1");
    if (!(distribution.scale >= 0.0)) fail("distribution.scale must be nonnegative");
    solver.validate();
}

Matrix random_psd(SeededStream& stream, int m, double max_eig) {
    Vector eig(m);
    for (int j = 0; j < m; ++j) eig[j] = stream.uniform(0.0, max_eig);
    Matrix V = Matrix::Identity(m, m);
    for (int p = 0; p + 1 < m; ++p) {
        for (int q = p + 1; q < m; ++q) {
            const double angle = stream.uniform(0.0, 2.0 * std::numbers::pi);
            const double c = std::cos(angle);
            const double s = std::sin(angle);
            for (int k = 0; k < m; ++k) {
                const double vp = V(k, p);
                const double vq = V(k, q);
                V(k, p) = c * vp - s * vq;
                V(k, q) = s * vp + c * vq;
            }
        }
    }
    Matrix Q = V * eig.asDiagonal() * V.transpose();
    return 0.5 * (Q + Q.transpose());
}

namespace {

Matrix uniform_matrix(SeededStream& s, Eigen::Index rows, Eigen::Index cols, double a, double b) {
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = s.uniform(a, b);
    return out;
}

Vector uniform_vector(SeededStream& s, Eigen::Index size, double a, double b) {
    Vector out(size);
    for (Eigen::Index k = 0; k < size; ++k) out[k] = s.uniform(a, b);
    return out;
}

SeededStream structure_stream(const ScenarioConfig& config, int agent) {
    return SeededStream(derive_seed(config.seed, static_cast<std::uint64_t>(agent)));
}

SeededStream sample_stream(const ScenarioConfig& config, std::size_t instance, int agent) {
    return SeededStream(
        derive_seed(derive_seed(config.seed, kSampleKey + instance), static_cast<std::uint64_t>(agent)));
}

// Convex own block: B B^T / n + floor I with B ~ U(-1, 1).
Matrix own_quadratic(SeededStream& s, int n, double scale, double floor) {
    const Matrix B = uniform_matrix(s, n, n, -1.0, 1.0);
    Matrix H = scale * (B * B.transpose() / static_cast<double>(n) + floor * Matrix::Identity(n, n));
    return 0.5 * (H + H.transpose());
}

} // namespace

GameSpec gen_illustrative(const ScenarioConfig& config, std::size_t instance) {
    config.validate();
    if (config.family != Family::illustrative)
        throw std::invalid_argument("gen_illustrative: config family is not illustrative");
    const int N = config.N, n = config.n, m = config.m;
    GameSpec g{N, n, m, {}};
    for (int i = 0; i < N; ++i) {
        SeededStream s = structure_stream(config, i + 1);
        AgentSpec a;
        a.index = i + 1;

        // Draws that do not depend on N come first.
        a.Q = random_psd(s, m, 1.0);
        a.radius = config.epsilon * static_cast<double>(s.discrete_uniform(1, 5));
        a.c = uniform_vector(s, n, -1.0, 0.0);
        a.H.resize(static_cast<std::size_t>(N));
        a.H[static_cast<std::size_t>(i)] = own_quadratic(s, n, config.cost_scale, 0.5);

        // P_i(x) = sum_j a_j x_j, blockwise a_j * I for n > 1.
        const Vector coef = uniform_vector(s, N, 0.0, 1.0);
        a.A = Matrix::Zero(m, n * N);
        for (int j = 0; j < N; ++j)
            for (int r = 0; r < std::min(m, n); ++r) a.A(r, j * n + r) = coef[j];
        a.b = Vector::Zero(m);
        for (int j = 0; j < N; ++j)
            if (j != i)
                a.H[static_cast<std::size_t>(j)] =
                    uniform_matrix(s, n, n, -1.0, 1.0) * (config.cost_scale * config.coupling / N);
        a.local_set = LocalSet::box(Vector::Zero(n), Vector::Ones(n));

        SeededStream ss = sample_stream(config, instance, i + 1);
        const auto K = ss.discrete_uniform(config.sample_range.first, config.sample_range.second);
        a.samples = uniform_matrix(ss, static_cast<Eigen::Index>(K), m, 0.0, 1.0);
        g.agents.push_back(std::move(a));
    }
    return g;
}

GameSpec gen_portfolio(const ScenarioConfig& config, std::size_t instance) {
    config.validate();
    if (config.family != Family::portfolio)
        throw std::invalid_argument("gen_portfolio: config family is not portfolio");
    const int N = config.N, n = config.n, m = config.m;
    const auto& dist = config.distribution;
    GameSpec g{N, n, m, {}};
    for (int i = 0; i < N; ++i) {
        SeededStream s = structure_stream(config, i + 1);
        AgentSpec a;
        a.index = i + 1;

        // Draws that do not depend on N come first.
        a.H.resize(static_cast<std::size_t>(N));
        a.H[static_cast<std::size_t>(i)] = own_quadratic(s, n, 1.0, 0.1);
        a.c = -uniform_vector(s, n, 0.0, 1.0); // returns r_i enter as -r_i^T x_i
        a.Q = random_psd(s, m, 0.5);
        a.radius = config.epsilon * static_cast<double>(s.discrete_uniform(1, 5));

        // Each agent sees its own t-distribution: agent scale and per-asset location.
        const double agent_scale = dist.scale * s.uniform(0.5, 1.5);
        const Vector location = uniform_vector(s, m, dist.shift - 0.1, dist.shift + 0.1);

        for (int j = 0; j < N; ++j)
            if (j != i) a.H[static_cast<std::size_t>(j)] = uniform_matrix(s, n, n, -1.0, 1.0) * (config.coupling / N);

        // Crowding: P_i(x) = sum_j x_j.
        a.A = Matrix::Zero(m, n * N);
        for (int j = 0; j < N; ++j) a.A.middleCols(j * n, n) = Matrix::Identity(m, n);
        a.b = Vector::Zero(m);
        a.local_set = LocalSet::simplex();

        SeededStream ss = sample_stream(config, instance, i + 1);
        const auto K = ss.discrete_uniform(config.sample_range.first, config.sample_range.second);
        a.samples.resize(static_cast<Eigen::Index>(K), m);
        for (Eigen::Index k = 0; k < a.samples.rows(); ++k) {
            for (int j = 0; j < m; ++j) {
                double v = 0.0;
                if (dist.kind == "student_t")
                    v = ss.student_t(dist.dof, agent_scale, location[j]);
                else if (dist.kind == "normal")
                    v = ss.normal(location[j], agent_scale);
                else
                    v = ss.uniform(location[j] - agent_scale, location[j] + agent_scale);
                a.samples(k, j) = v;
            }
        }
        g.agents.push_back(std::move(a));
    }
    return g;
}

GameSpec generate(const ScenarioConfig& config, std::size_t instance) {
    return config.family == Family::illustrative ? gen_illustrative(config, instance)
                                                 : gen_portfolio(config, instance);
}

GameSpec gen_random_instance(std::uint64_t seed, int max_N, int max_n, int max_m, int max_K) {
    SeededStream s(derive_seed(seed, 0x0A11CE));
    const int N = static_cast<int>(s.discrete_uniform(1, max_N));
    const int n = static_cast<int>(s.discrete_uniform(1, max_n));
    const int m = static_cast<int>(s.discrete_uniform(1, max_m));
    GameSpec g{N, n, m, {}};
    for (int i = 0; i < N; ++i) {
        AgentSpec a;
        a.index = i + 1;
        a.H.resize(static_cast<std::size_t>(N));
        for (int j = 0; j < N; ++j)
            a.H[static_cast<std::size_t>(j)] =
                j == i ? own_quadratic(s, n, 1.0, 0.1) : uniform_matrix(s, n, n, -1.0, 1.0);
        a.c = uniform_vector(s, n, -1.0, 1.0);
        a.A = uniform_matrix(s, m, n * N, -1.0, 1.0);
        a.b = uniform_vector(s, m, -1.0, 1.0);
        a.Q = random_psd(s, m, 2.0);
        a.radius = s.uniform(0.0, 1.0);
        const auto K = s.discrete_uniform(1, max_K);
        a.samples.resize(static_cast<Eigen::Index>(K), m);
        for (Eigen::Index k = 0; k < a.samples.rows(); ++k)
            for (int j = 0; j < m; ++j) a.samples(k, j) = s.normal();
        a.local_set = LocalSet::box(-Vector::Ones(n), Vector::Ones(n));
        g.agents.push_back(std::move(a));
    }
    return g;
}

CostQuantiles quantiles(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("quantiles: no values");
    std::sort(values.begin(), values.end());
    auto at = [&](double p) {
        const double h = p * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    return {values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

std::vector<CostQuantiles> aggregate_costs(const std::vector<InstanceResult>& instances, int N) {
    std::vector<CostQuantiles> out;
    for (int i = 0; i < N; ++i) {
        std::vector<double> values;
        for (const auto& r : instances)
            if (static_cast<int>(r.agraal.costs.size()) == N) values.push_back(r.agraal.costs[static_cast<std::size_t>(i)]);
        out.push_back(values.empty() ? CostQuantiles{NAN, NAN, NAN, NAN, NAN} : quantiles(std::move(values)));
    }
    return out;
}

namespace {

std::string cell_label(double eps, const SampleRange& r) {
    std::ostringstream os;
    os << "eps=" << eps << ";K=" << r.first << "-" << r.second;
    return os.str();
}

InstanceResult solve_instance(const ScenarioConfig& cfg, std::size_t instance) {
    const VIProblem problem(validate_game(generate(cfg, instance)), cfg.zeta);
    const Vector z0 = default_initial_point(problem);
    InstanceResult out;
    out.instance = instance;
    out.agraal = agraal_solve(problem, cfg.solver, z0);
    out.hybrid = hybrid_solve(problem, cfg.solver, z0, median_window_switch());
    return out;
}

} // namespace

SweepReport run_sweep(const ScenarioConfig& config, unsigned threads) {
    config.validate();
    SweepReport rep;
    rep.config = config;

    const std::vector<double> eps_grid =
        config.epsilon_grid.empty() ? std::vector<double>{config.epsilon} : config.epsilon_grid;
    const std::vector<SampleRange> range_grid =
        config.sample_range_grid.empty() ? std::vector<SampleRange>{config.sample_range} : config.sample_range_grid;

    std::vector<ScenarioConfig> cell_configs;
    for (double eps : eps_grid) {
        for (const auto& r : range_grid) {
            SweepCell cell;
            cell.label = cell_label(eps, r);
            cell.epsilon = eps;
            cell.sample_range = r;
            cell.instances.resize(config.instances);
            rep.cells.push_back(std::move(cell));
            ScenarioConfig c = config;
            c.epsilon = eps;
            c.sample_range = r;
            cell_configs.push_back(std::move(c));
        }
    }

    const std::size_t total = rep.cells.size() * config.instances;
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned id) {
        try {
            for (std::size_t t = next++; t < total; t = next++) {
                const std::size_t c = t / config.instances;
                const std::size_t k = t % config.instances;
                rep.cells[c].instances[k] = solve_instance(cell_configs[c], k);
            }
        } catch (...) {
            errors[id] = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (auto& cell : rep.cells) cell.cost_quantiles = aggregate_costs(cell.instances, config.N);
    return rep;
}

} // namespace drne

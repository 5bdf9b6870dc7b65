#include "drne/reformulation.hpp"

#include "drne/projections.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace drne {

namespace {

// Pairwise (tree) sum of v[first, last) in index order; bit-stable for a given length.
double pairwise_sum(const double* v, std::size_t count) {
    if (count <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += v[i];
        return s;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, count - half);
}

double column_mean(const Matrix& m, Eigen::Index col) {
    const Vector c = m.col(col);
    return pairwise_sum(c.data(), static_cast<std::size_t>(c.size())) / static_cast<double>(m.rows());
}

void require_feasible(const RotatedAgentData& a, double lambda) {
    const double top = a.decomposition.max_eigenvalue();
    if (!(lambda > top)) {
        std::ostringstream os;
        os << "inner supremum is +infinity: lambda " << lambda << " <= lambda_max(Q) " << top;
        throw InfiniteSupremum(os.str());
    }
}

} // namespace

RotatedAgentData rotate_agent(const AgentSpec& agent, double zeta) {
    return rotate_agent(agent, eigendecompose(agent.Q), zeta);
}

RotatedAgentData rotate_agent(const AgentSpec& agent, const SpectralDecomposition& spectrum, double zeta) {
    if (!(zeta > 0.0)) throw std::invalid_argument("rotate_agent: zeta must be positive");
    RotatedAgentData out;
    out.decomposition = spectrum;
    const Matrix& L = spectrum.L;
    out.A_rot = L * agent.A;
    out.b_rot = L * agent.b;
    out.samples_rot = agent.samples * L.transpose();
    out.sample_sq_norms = agent.samples.rowwise().squaredNorm();

    const Eigen::Index m = L.rows();
    out.mean_rot.resize(m);
    out.mean_sq_rot.resize(m);
    const Matrix squared = out.samples_rot.cwiseAbs2();
    for (Eigen::Index j = 0; j < m; ++j) {
        out.mean_rot[j] = column_mean(out.samples_rot, j);
        out.mean_sq_rot[j] = column_mean(squared, j);
    }
    out.mean_sq_norm = pairwise_sum(out.sample_sq_norms.data(),
                                    static_cast<std::size_t>(out.sample_sq_norms.size())) /
                       static_cast<double>(out.sample_sq_norms.size());
    out.lambda_floor = spectrum.max_eigenvalue() + zeta;
    return out;
}

double inner_sup(const RotatedAgentData& a, const Vector& x, double lambda, std::size_t k) {
    require_feasible(a, lambda);
    if (k >= static_cast<std::size_t>(a.samples_rot.rows()))
        throw std::out_of_range("inner_sup: sample index out of range");
    const Vector p = a.rotated_affine(x);
    const auto xi = a.samples_rot.row(static_cast<Eigen::Index>(k));
    const Vector& d = a.decomposition.d;
    double value = 0.0;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        const double num = p[j] * p[j] + 4.0 * lambda * p[j] * xi[j] + 4.0 * lambda * d[j] * xi[j] * xi[j];
        value += num / (4.0 * (lambda - d[j]));
    }
    return value;
}

VIProblem::VIProblem(ValidatedGame game, double zeta)
    : game_(std::move(game)), zeta_(game_.num_agents(), zeta) {
    build();
}

VIProblem::VIProblem(ValidatedGame game, std::vector<double> zeta)
    : game_(std::move(game)), zeta_(std::move(zeta)) {
    if (zeta_.size() != game_.num_agents())
        throw std::invalid_argument("VIProblem: need one zeta per agent");
    build();
}

void VIProblem::build() {
    rotated_.reserve(game_.num_agents());
    for (std::size_t i = 0; i < game_.num_agents(); ++i)
        rotated_.push_back(rotate_agent(game_.agent(i), game_.q_spectrum(i), zeta_[i]));
}

Vector VIProblem::collective_x(const Vector& z) const {
    if (z.size() != dimension()) throw std::invalid_argument("VIProblem: stacked point has wrong length");
    Vector x(n() * static_cast<Eigen::Index>(num_agents()));
    for (std::size_t i = 0; i < num_agents(); ++i)
        x.segment(static_cast<Eigen::Index>(i) * n(), n()) = z.segment(x_offset(i), n());
    return x;
}

CostEval VIProblem::cost(std::size_t i, const Vector& x) const {
    if (cost_) return cost_(i, x);
    return deterministic_cost(game_.agent(i), i, x);
}

double agent_objective(const VIProblem& problem, std::size_t i, const Vector& z) {
    const Vector x = problem.collective_x(z);
    const double lambda = z[problem.lambda_index(i)];
    const RotatedAgentData& a = problem.rotated(i);
    require_feasible(a, lambda);

    const double eps = problem.game().agent(i).radius;
    const Vector p = a.rotated_affine(x);
    const Vector& d = a.decomposition.d;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        const double num = p[j] * p[j] + 4.0 * lambda * p[j] * a.mean_rot[j] +
                           4.0 * lambda * d[j] * a.mean_sq_rot[j];
        worst += num / (4.0 * (lambda - d[j]));
    }
    return problem.cost(i, x).value + lambda * eps * eps + worst;
}

Vector mapping(const VIProblem& problem, const Vector& z) {
    const Vector x = problem.collective_x(z);
    const Eigen::Index n = problem.n();
    Vector F(problem.dimension());
    for (std::size_t i = 0; i < problem.num_agents(); ++i) {
        const RotatedAgentData& a = problem.rotated(i);
        const double lambda = z[problem.lambda_index(i)];
        require_feasible(a, lambda);

        const double eps = problem.game().agent(i).radius;
        const Vector p = a.rotated_affine(x);
        const Vector& d = a.decomposition.d;
        const Eigen::Index m = p.size();

        Vector g(m);
        double lambda_block = eps * eps;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double gap = lambda - d[j];
            g[j] = (p[j] + 2.0 * lambda * a.mean_rot[j]) / (2.0 * gap);
            const double num = p[j] * p[j] + 4.0 * d[j] * p[j] * a.mean_rot[j] +
                               4.0 * d[j] * d[j] * a.mean_sq_rot[j];
            lambda_block -= num / (4.0 * gap * gap);
        }
        const auto own_cols = a.A_rot.middleCols(static_cast<Eigen::Index>(i) * n, n);
        F.segment(problem.x_offset(i), n) = problem.cost(i, x).gradient + own_cols.transpose() * g;
        F[problem.lambda_index(i)] = lambda_block;
    }
    return F;
}

double natural_residual(const VIProblem& problem, const Vector& z) {
    return natural_residual(problem, z, mapping(problem, z));
}

double natural_residual(const VIProblem& problem, const Vector& z, const Vector& Fz) {
    return (z - project_Z(problem, z - Fz)).norm();
}

} // namespace drne

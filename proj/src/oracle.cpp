#include "drne/oracle.hpp"

#include "drne/projections.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drne {

namespace {

// Cholesky factor of lambda I - Q; throws when not positive definite.
Eigen::LLT<Matrix> resolvent(const Matrix& Q, double lambda) {
    const Eigen::Index m = Q.rows();
    Eigen::LLT<Matrix> llt(lambda * Matrix::Identity(m, m) - Q);
    if (llt.info() != Eigen::Success) throw std::domain_error("oracle: lambda I - Q is not positive definite");
    return llt;
}

struct SliceEval {
    double value = 0.0;
    Vector grad; ///< (x_i, lambda_i)
};

SliceEval evaluate_slice(const VIProblem& problem, std::size_t i, const Vector& z, bool with_grad) {
    const AgentSpec& agent = problem.game().agent(i);
    const Vector x = problem.collective_x(z);
    const double lambda = z[problem.lambda_index(i)];
    const auto llt = resolvent(agent.Q, lambda);
    const Vector p = agent.affine_term(x);
    const double eps2 = agent.radius * agent.radius;
    const auto K = static_cast<Eigen::Index>(agent.sample_count());

    const CostEval f = problem.cost(i, x);
    double worst = 0.0;
    Vector mean_mw = Vector::Zero(p.size());
    double lambda_grad = 0.0;
    for (Eigen::Index k = 0; k < K; ++k) {
        const Vector xi = agent.samples.row(k).transpose();
        const Vector w = p + 2.0 * lambda * xi;
        const Vector mw = llt.solve(w);
        worst += 0.25 * w.dot(mw) - lambda * xi.squaredNorm();
        if (with_grad) {
            mean_mw += mw;
            lambda_grad += xi.dot(mw) - 0.25 * mw.squaredNorm() - xi.squaredNorm();
        }
    }
    SliceEval out;
    out.value = f.value + lambda * eps2 + worst / static_cast<double>(K);
    if (with_grad) {
        const Eigen::Index n = problem.n();
        mean_mw /= static_cast<double>(K);
        out.grad.resize(n + 1);
        out.grad.head(n) = f.gradient + 0.5 * agent.A.middleCols(static_cast<Eigen::Index>(i) * n, n).transpose() * mean_mw;
        out.grad[n] = eps2 + lambda_grad / static_cast<double>(K);
    }
    return out;
}

Vector slice_of(const VIProblem& problem, std::size_t i, const Vector& z) {
    return z.segment(problem.x_offset(i), problem.block_size());
}

void set_slice(const VIProblem& problem, std::size_t i, Vector& z, const Vector& w) {
    z.segment(problem.x_offset(i), problem.block_size()) = w;
}

Vector project_slice(const VIProblem& problem, std::size_t i, const Vector& w) {
    const Eigen::Index n = problem.n();
    Vector out(n + 1);
    out.head(n) = project_local(problem.game().agent(i).local_set, w.head(n));
    out[n] = std::max(w[n], problem.lambda_floor(i));
    return out;
}

} // namespace

GradCheckReport fd_gradient_check(const VIProblem& problem, const Vector& z, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("fd_gradient_check: step must be positive");
    for (std::size_t i = 0; i < problem.num_agents(); ++i)
        if (z[problem.lambda_index(i)] < problem.lambda_floor(i) + 10.0 * step)
            throw std::invalid_argument("fd_gradient_check: evaluation point too close to the lambda floor");

    const Vector F = mapping(problem, z);
    GradCheckReport rep;
    rep.step = step;
    for (std::size_t i = 0; i < problem.num_agents(); ++i) {
        for (Eigen::Index c = 0; c < problem.block_size(); ++c) {
            const Eigen::Index idx = problem.x_offset(i) + c;
            Vector zp = z;
            Vector zm = z;
            zp[idx] += step;
            zm[idx] -= step;
            const double fd =
                (agent_objective(problem, i, zp) - agent_objective(problem, i, zm)) / (2.0 * step);
            const double err = std::abs(F[idx] - fd) / std::max(1.0, std::abs(F[idx]));
            if (err > rep.max_rel_error || rep.worst_index < 0) {
                rep.max_rel_error = std::max(rep.max_rel_error, err);
                rep.worst_index = idx;
            }
        }
    }
    return rep;
}

double numeric_inner_sup(const AgentSpec& agent, const Vector& x, double lambda, std::size_t k,
                         const AscentParams& params) {
    if (k >= agent.sample_count()) throw std::out_of_range("numeric_inner_sup: sample index out of range");
    const Matrix& Q = agent.Q;
    const Eigen::Index m = Q.rows();
    {
        Eigen::LLT<Matrix> llt((lambda - 1e-9) * Matrix::Identity(m, m) - Q);
        if (llt.info() != Eigen::Success)
            throw std::domain_error("numeric_inner_sup: objective is not concave for this lambda");
    }
    const Vector p = agent.affine_term(x);
    const Vector center = agent.samples.row(static_cast<Eigen::Index>(k)).transpose();

    auto objective = [&](const Vector& xi) {
        return xi.dot(Q * xi) + p.dot(xi) - lambda * (xi - center).squaredNorm();
    };
    auto gradient = [&](const Vector& xi) -> Vector {
        return 2.0 * (Q * xi) + p - 2.0 * lambda * (xi - center);
    };

    const double scale = std::max(1.0, (p + 2.0 * lambda * center).norm());
    Vector xi = center;
    double value = objective(xi);
    for (std::size_t it = 0; it < params.budget; ++it) {
        const Vector g = gradient(xi);
        const double gnorm = g.norm();
        const double gg = gnorm * gnorm;
        if (gnorm <= params.stationarity * scale) return value;
        // Trial step from the curvature along the unit gradient direction, measured by a gradient difference.
        const Vector u = g / gnorm;
        const double curvature = -u.dot(gradient(xi + u) - g);
        double t = curvature > 0.0 ? 1.0 / curvature : 1.0 / (2.0 * lambda);
        // Armijo test in derivative form: along xi + s g the objective is a concave quadratic,
        // so sufficient ascent at step t is equivalent to g(xi + t g)^T g >= (2 armijo - 1) ||g||^2.
        for (;;) {
            const Vector cand = xi + t * g;
            if (gradient(cand).dot(g) >= (2.0 * params.armijo - 1.0) * gg) {
                xi = cand;
                value = objective(cand);
                break;
            }
            t *= params.shrink;
            if (t < 1e-300) return value;
        }
    }
    throw std::runtime_error("numeric_inner_sup: ascent budget exhausted");
}

LinearCaseValue linear_case_value(const AgentSpec& agent, const Vector& x) {
    if (agent.Q.size() && agent.Q.cwiseAbs().maxCoeff() != 0.0)
        throw std::invalid_argument("linear_case_value: requires Q = 0");
    const Vector p = agent.affine_term(x);
    const Vector mean = agent.samples.colwise().mean().transpose();
    const double pnorm = p.norm();
    LinearCaseValue out;
    out.value = p.dot(mean) + agent.radius * pnorm;
    if (agent.radius > 0.0 && pnorm > 0.0) out.lambda_star = pnorm / (2.0 * agent.radius);
    return out;
}

double oracle_agent_objective(const VIProblem& problem, std::size_t i, const Vector& z) {
    return evaluate_slice(problem, i, z, false).value;
}

Vector oracle_pseudogradient(const VIProblem& problem, const Vector& z) {
    Vector out(problem.dimension());
    for (std::size_t i = 0; i < problem.num_agents(); ++i)
        out.segment(problem.x_offset(i), problem.block_size()) = evaluate_slice(problem, i, z, true).grad;
    return out;
}

double best_response_value(const VIProblem& problem, std::size_t i, const Vector& z, const Vector& start,
                           const DescentParams& params) {
    Vector point = z;
    Vector w = project_slice(problem, i, slice_of(problem, i, start));
    set_slice(problem, i, point, w);
    SliceEval cur = evaluate_slice(problem, i, point, true);
    double t = params.initial_step;
    for (std::size_t it = 0; it < params.budget; ++it) {
        bool moved = false;
        t = std::min(2.0 * t, 1e12);
        while (t > 1e-20) {
            const Vector cand_w = project_slice(problem, i, w - t * cur.grad);
            const Vector dw = cand_w - w;
            if (dw.squaredNorm() == 0.0) break;
            Vector cand = point;
            set_slice(problem, i, cand, cand_w);
            const double value = evaluate_slice(problem, i, cand, false).value;
            if (value <= cur.value + params.armijo * cur.grad.dot(dw)) {
                w = cand_w;
                point = std::move(cand);
                cur = evaluate_slice(problem, i, point, true);
                moved = true;
                break;
            }
            t *= params.shrink;
        }
        if (!moved) break;
    }
    return cur.value;
}

std::vector<double> best_response_gap(const VIProblem& problem, const Vector& z, const DescentParams& params) {
    std::vector<double> gaps;
    gaps.reserve(problem.num_agents());
    for (std::size_t i = 0; i < problem.num_agents(); ++i) {
        const double here = oracle_agent_objective(problem, i, z);
        gaps.push_back(std::max(0.0, here - best_response_value(problem, i, z, z, params)));
    }
    return gaps;
}

} // namespace drne

#include "helpers.hpp"

#include "drne/experiments.hpp"
#include "drne/oracle.hpp"
#include "drne/reformulation.hpp"
#include "drne/verification.hpp"

#include <doctest.h>

#include <cmath>

using namespace drne;
using drne::test::scalar_game;

namespace {

Vector point(std::initializer_list<double> v) {
    Vector z(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) z[i++] = x;
    return z;
}

// Per-sample transcription of the reformulated objective and mapping with W~ and Q~(lambda).
struct Literal {
    double objective;
    Vector block; // (x_i, lambda_i)
};

Literal literal(const VIProblem& p, std::size_t i, const Vector& z) {
    const AgentSpec& a = p.game().agent(i);
    const SpectralDecomposition dec = eigendecompose(a.Q);
    const Vector x = p.collective_x(z);
    const double lam = z[p.lambda_index(i)];
    const Eigen::Index m = a.Q.rows(), n = p.n();
    const Vector Pt = dec.L * a.affine_term(x);
    Vector qt(m);
    for (Eigen::Index j = 0; j < m; ++j) qt[j] = 1.0 / (lam - dec.d[j]);
    const double K = static_cast<double>(a.sample_count());
    const Matrix LAi = dec.L * a.A.middleCols(static_cast<Eigen::Index>(i) * n, n);

    double quad = 0.0, sqn = 0.0, lam_terms = 0.0;
    Vector xsum = Vector::Zero(n);
    for (Eigen::Index k = 0; k < a.samples.rows(); ++k) {
        const Vector xi = a.samples.row(k).transpose();
        const Vector xit = dec.L * xi;
        const Vector W = Pt + 2.0 * lam * xit;
        const Vector QW = qt.asDiagonal() * W;
        quad += W.dot(QW);
        sqn += xi.squaredNorm();
        xsum += LAi.transpose() * QW;
        double dq = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) dq += W[j] * W[j] * qt[j] * qt[j];
        lam_terms += 4.0 * xit.dot(QW) - dq;
    }
    const CostEval f = deterministic_cost(a, i, x);
    const double eps2 = a.radius * a.radius;
    Literal out;
    out.objective = f.value + lam * (eps2 - sqn / K) + quad / (4.0 * K);
    out.block.resize(n + 1);
    out.block.head(n) = f.gradient + xsum / (2.0 * K);
    out.block[n] = eps2 - sqn / K + lam_terms / (4.0 * K);
    return out;
}

VIProblem random_problem(std::uint64_t seed) {
    return VIProblem(validate_game(gen_random_instance(seed)));
}

} // namespace

TEST_SUITE("reformulation") {

TEST_CASE("rotate_agent examples") {
    SUBCASE("zero Q") {
        const ValidatedGame g = validate_game(scalar_game(0.0, 0.0, 1.0, 0.0, 0.0, 0.5, {0.0}));
        const auto r = rotate_agent(g.agent(0), 1e-6);
        CHECK(r.decomposition.d[0] == 0.0);
        CHECK(r.A_rot(0, 0) == 1.0);
        CHECK(r.lambda_floor == 1e-6);
    }
    SUBCASE("identity Q") {
        AgentSpec a;
        a.Q = Matrix::Identity(2, 2);
        a.A = Matrix::Zero(2, 1);
        a.b = Vector::Zero(2);
        a.samples = (Matrix(1, 2) << 1.0, 0.0).finished();
        const auto r = rotate_agent(a, 1e-6);
        CHECK(r.samples_rot(0, 0) == 1.0);
        CHECK(r.samples_rot(0, 1) == 0.0);
        CHECK(r.sample_sq_norms[0] == 1.0);
    }
    SUBCASE("coupled Q rotates the sample") {
        AgentSpec a;
        a.Q = (Matrix(2, 2) << 2.0, 1.0, 1.0, 2.0).finished();
        a.A = Matrix::Zero(2, 1);
        a.b = Vector::Zero(2);
        a.samples = (Matrix(1, 2) << 1.0, 0.0).finished();
        const auto r = rotate_agent(a, 1e-6);
        CHECK(std::abs(r.samples_rot(0, 0) - 1.0 / std::sqrt(2.0)) < 1e-14);
        CHECK(std::abs(r.samples_rot(0, 1) - 1.0 / std::sqrt(2.0)) < 1e-14);
    }
    SUBCASE("rotation preserves sample norms") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const ValidatedGame g = validate_game(gen_random_instance(seed));
            const auto r = rotate_agent(g.agent(0), 1e-6);
            for (Eigen::Index k = 0; k < r.samples_rot.rows(); ++k)
                CHECK(std::abs(r.samples_rot.row(k).norm() - g.agent(0).samples.row(k).norm()) <= 1e-10);
            CHECK(r.lambda_floor > r.decomposition.d[0]);
        }
    }
}

TEST_CASE("inner_sup examples") {
    SUBCASE("zero data") {
        const ValidatedGame g = validate_game(scalar_game(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, {0.0}));
        CHECK(inner_sup(rotate_agent(g.agent(0), 1e-6), Vector::Zero(1), 1.0, 0) == 0.0);
    }
    SUBCASE("13/6") {
        const ValidatedGame g = validate_game(scalar_game(0.0, 0.0, 0.0, 1.0, 0.5, 0.0, {1.0}));
        const double v = inner_sup(rotate_agent(g.agent(0), 1e-6), Vector::Zero(1), 2.0, 0);
        CHECK(std::abs(v - 13.0 / 6.0) <= 1e-12);
    }
    SUBCASE("lambda below the largest eigenvalue") {
        const ValidatedGame g = validate_game(scalar_game(0.0, 0.0, 0.0, 1.0, 0.5, 0.0, {1.0}));
        CHECK_THROWS_AS(inner_sup(rotate_agent(g.agent(0), 1e-6), Vector::Zero(1), 0.4, 0), InfiniteSupremum);
        CHECK_THROWS_AS(inner_sup(rotate_agent(g.agent(0), 1e-6), Vector::Zero(1), 0.5, 0), InfiniteSupremum);
    }
}

TEST_CASE("agent_objective examples") {
    SUBCASE("linear single agent") {
        const VIProblem p(validate_game(scalar_game(0.0, 0.0, 1.0, 0.0, 0.0, 0.5, {0.0})));
        CHECK(agent_objective(p, 0, point({1.0, 1.0})) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("no uncertainty mass") {
        const VIProblem p(validate_game(scalar_game(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, {0.0, 0.0})));
        for (double lam : {1e-3, 1.0, 1e4}) CHECK(agent_objective(p, 0, point({0.3, lam})) == 0.0);
    }
    SUBCASE("infeasible lambda") {
        const VIProblem p(validate_game(scalar_game(0.0, 0.0, 1.0, 0.0, 0.5, 0.5, {0.0})));
        CHECK_THROWS_AS(agent_objective(p, 0, point({1.0, 0.2})), InfiniteSupremum);
        CHECK_THROWS_AS(mapping(p, point({1.0, 0.2})), InfiniteSupremum);
    }
}

TEST_CASE("objective minus f and lambda eps^2 is the mean inner supremum") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const VIProblem p = random_problem(seed);
        const Vector z = random_interior_point(p, seed);
        const Vector x = p.collective_x(z);
        for (std::size_t i = 0; i < p.num_agents(); ++i) {
            const double lam = z[p.lambda_index(i)];
            const AgentSpec& a = p.game().agent(i);
            double mean = 0.0;
            for (std::size_t k = 0; k < a.sample_count(); ++k) mean += inner_sup(p.rotated(i), x, lam, k);
            mean /= static_cast<double>(a.sample_count());
            const double lhs = agent_objective(p, i, z) - p.cost(i, x).value - lam * a.radius * a.radius;
            CHECK(std::abs(lhs - mean) <= 1e-10 * std::max(1.0, std::abs(mean)));
        }
    }
}

TEST_CASE("objective and mapping agree with the per-sample W~ transcription") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const VIProblem p = random_problem(seed);
        const Vector z = random_interior_point(p, seed);
        const Vector F = mapping(p, z);
        for (std::size_t i = 0; i < p.num_agents(); ++i) {
            const Literal lit = literal(p, i, z);
            const double J = agent_objective(p, i, z);
            CHECK(std::abs(J - lit.objective) <= 1e-9 * std::max(1.0, std::abs(J)));
            const Vector Fi = F.segment(p.x_offset(i), p.block_size());
            for (Eigen::Index c = 0; c < Fi.size(); ++c)
                CHECK(std::abs(Fi[c] - lit.block[c]) <= 1e-9 * std::max(1.0, std::abs(Fi[c])));
        }
    }
}

TEST_CASE("mapping examples") {
    SUBCASE("linear-case stationary point") {
        const VIProblem p(validate_game(scalar_game(0.0, 0.0, 1.0, 0.0, 0.0, 0.5, {0.0})));
        const Vector F = mapping(p, point({1.0, 1.0}));
        CHECK(F[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(std::abs(F[1]) <= 1e-15);
    }
    SUBCASE("null game") {
        const VIProblem p(validate_game(scalar_game(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, {0.0})));
        for (double lam : {1e-5, 1.0, 100.0}) CHECK(mapping(p, point({0.7, lam})).isZero());
    }
    SUBCASE("matches finite differences") {
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const VIProblem p = random_problem(seed);
            CHECK(fd_gradient_check(p, random_interior_point(p, seed), 1e-5).max_rel_error <= 1e-5);
        }
    }
}

TEST_CASE("lambda block tends to eps^2 as lambda grows") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const VIProblem p = random_problem(seed);
        Vector z = random_interior_point(p, seed);
        for (std::size_t i = 0; i < p.num_agents(); ++i) z[p.lambda_index(i)] = 1e8;
        const Vector F = mapping(p, z);
        for (std::size_t i = 0; i < p.num_agents(); ++i) {
            const double r = p.game().agent(i).radius;
            CHECK(std::abs(F[p.lambda_index(i)] - r * r) <= 1e-6);
        }
    }
}

TEST_CASE("objective is nondecreasing in the radius") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        GameSpec g = gen_random_instance(seed);
        const VIProblem base(validate_game(g));
        const Vector z = random_interior_point(base, seed);
        for (auto& a : g.agents) a.radius += 0.1;
        const VIProblem wider(validate_game(g));
        for (std::size_t i = 0; i < base.num_agents(); ++i)
            CHECK(agent_objective(wider, i, z) >= agent_objective(base, i, z));
    }
}

TEST_CASE("objective is convex in the own block") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const VIProblem p = random_problem(seed);
        const Vector z1 = random_interior_point(p, seed);
        const Vector z2 = random_interior_point(p, seed + 7919);
        SeededStream s(seed);
        for (std::size_t i = 0; i < p.num_agents(); ++i) {
            Vector a = z1, b = z1, mid = z1;
            b.segment(p.x_offset(i), p.block_size()) = z2.segment(p.x_offset(i), p.block_size());
            const double t = s.uniform01();
            mid.segment(p.x_offset(i), p.block_size()) =
                t * a.segment(p.x_offset(i), p.block_size()) + (1 - t) * b.segment(p.x_offset(i), p.block_size());
            const double lhs = agent_objective(p, i, mid);
            const double rhs = t * agent_objective(p, i, a) + (1 - t) * agent_objective(p, i, b);
            CHECK(lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("natural residual examples") {
    SUBCASE("null game") {
        const VIProblem p(validate_game(scalar_game(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, {0.0}, test::interval(-1, 1))));
        CHECK(natural_residual(p, point({0.2, 3.0})) == 0.0);
        CHECK(natural_residual(p, point({0.2, p.lambda_floor(0)})) == 0.0);
    }
    SUBCASE("linear single agent on [0, 2]") {
        const VIProblem p(validate_game(scalar_game(0.0, 0.0, 1.0, 0.0, 0.0, 0.5, {0.0}, test::interval(0, 2))));
        CHECK(natural_residual(p, point({1.0, 1.0})) == doctest::Approx(0.5).epsilon(1e-15));
    }
}

TEST_CASE("per-agent zeta shifts the floor") {
    const ValidatedGame g = validate_game(gen_random_instance(3));
    std::vector<double> zeta(g.num_agents());
    for (std::size_t i = 0; i < zeta.size(); ++i) zeta[i] = 1e-3 * static_cast<double>(i + 1);
    const VIProblem p(g, zeta);
    for (std::size_t i = 0; i < zeta.size(); ++i)
        CHECK(p.lambda_floor(i) == doctest::Approx(g.q_spectrum(i).max_eigenvalue() + zeta[i]));
    CHECK_THROWS_AS(VIProblem(g, std::vector<double>(g.num_agents(), 0.0)), std::invalid_argument);
}

TEST_CASE("cost callback replaces the quadratic cost") {
    VIProblem p(validate_game(scalar_game(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, {0.0})));
    p.set_cost_callback([](std::size_t, const Vector& x) {
        CostEval e;
        e.value = std::exp(x[0]);
        e.gradient = Vector::Constant(1, std::exp(x[0]));
        return e;
    });
    const Vector z = point({0.5, 1.0});
    CHECK(agent_objective(p, 0, z) == doctest::Approx(std::exp(0.5)));
    CHECK(mapping(p, z)[0] == doctest::Approx(std::exp(0.5)));
}

}

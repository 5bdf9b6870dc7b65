#include "helpers.hpp"

#include "drne/experiments.hpp"
#include "drne/projections.hpp"
#include "drne/reformulation.hpp"

#include <doctest.h>

#include <cmath>

using namespace drne;

namespace {

// Simplex projection by bisection on the KKT threshold, then one exact refinement.
Vector simplex_by_bisection(const Vector& v) {
    double lo = v.minCoeff() - 1.0, hi = v.maxCoeff();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((v.array() - mid).max(0.0).sum() > 1.0 ? lo : hi) = mid;
    }
    const double theta = 0.5 * (lo + hi);
    const auto support = (v.array() > theta);
    const double exact = (v.array() * support.cast<double>()).sum();
    const double count = support.cast<double>().sum();
    return (v.array() - (exact - 1.0) / count).max(0.0).matrix();
}

LocalSet random_set(SeededStream& s, int n) {
    switch (s.discrete_uniform(0, 2)) {
    case 0: {
        Vector lo = test::random_vector(s, n, -2.0, 0.0);
        Vector hi = lo + test::random_vector(s, n, 0.0, 2.0);
        return LocalSet::box(lo, hi);
    }
    case 1: return LocalSet::simplex();
    default: return LocalSet::orthant();
    }
}

} // namespace

TEST_SUITE("projections") {

TEST_CASE("examples") {
    const LocalSet box = LocalSet::box(Vector::Zero(2), Vector::Ones(2));
    CHECK(project_local(box, (Vector(2) << 2.0, -1.0).finished()) == (Vector(2) << 1.0, 0.0).finished());
    CHECK(project_local(LocalSet::simplex(), (Vector(2) << 0.5, 0.5).finished()) ==
          (Vector(2) << 0.5, 0.5).finished());
    CHECK(project_local(LocalSet::simplex(), (Vector(2) << 2.0, 0.0).finished()) ==
          (Vector(2) << 1.0, 0.0).finished());
    CHECK(project_local(LocalSet::orthant(), (Vector(2) << -3.0, 2.0).finished()) ==
          (Vector(2) << 0.0, 2.0).finished());
}

TEST_CASE("simplex projection agrees with a bisection oracle and the variational inequality") {
    SeededStream s(11);
    for (int t = 0; t < 1000; ++t) {
        const int n = static_cast<int>(s.discrete_uniform(1, 8));
        const Vector v = test::random_vector(s, n, -3.0, 3.0);
        const Vector p = project_simplex(v);
        REQUIRE((p - simplex_by_bisection(v)).cwiseAbs().maxCoeff() <= 1e-12);
        REQUIRE(p.minCoeff() >= 0.0);
        REQUIRE(std::abs(p.sum() - 1.0) <= 1e-12);
        Vector y = test::random_vector(s, n, 0.0, 1.0);
        y /= y.sum();
        REQUIRE((v - p).dot(y - p) <= 1e-12);
    }
}

TEST_CASE("idempotence and nonexpansiveness") {
    SeededStream s(12);
    for (int t = 0; t < 1000; ++t) {
        const int n = static_cast<int>(s.discrete_uniform(1, 6));
        const LocalSet set = random_set(s, n);
        const Vector u = test::random_vector(s, n, -3.0, 3.0);
        const Vector v = test::random_vector(s, n, -3.0, 3.0);
        const Vector pu = project_local(set, u);
        REQUIRE(project_local(set, pu) == pu);
        REQUIRE((pu - project_local(set, v)).norm() <= (u - v).norm() + 1e-12);
    }
}

TEST_CASE("project_Z") {
    const VIProblem p(validate_game(gen_random_instance(4)));
    SeededStream s(13);

    SUBCASE("feasible points are fixed") {
        const Vector z = project_Z(p, test::random_vector(s, p.dimension(), -2.0, 2.0));
        CHECK(project_Z(p, z) == z);
    }
    SUBCASE("lambda below the floor is clamped") {
        Vector z = project_Z(p, Vector::Zero(p.dimension()));
        z[p.lambda_index(0)] = p.lambda_floor(0) - 1.0;
        CHECK(project_Z(p, z)[p.lambda_index(0)] == p.lambda_floor(0));
    }
    SUBCASE("blockwise projection is the Euclidean projection onto Z") {
        for (int t = 0; t < 200; ++t) {
            const Vector v = test::random_vector(s, p.dimension(), -3.0, 3.0);
            const Vector pz = project_Z(p, v);
            for (std::size_t i = 0; i < p.num_agents(); ++i) {
                const LocalSet& set = p.game().agent(i).local_set;
                const Vector x = pz.segment(p.x_offset(i), p.n());
                REQUIRE((x.array() >= set.lo.array()).all());
                REQUIRE((x.array() <= set.hi.array()).all());
                REQUIRE(pz[p.lambda_index(i)] >= p.lambda_floor(i));
            }
            // Obtuse-angle test against random feasible points.
            for (int r = 0; r < 5; ++r) {
                const Vector y = project_Z(p, test::random_vector(s, p.dimension(), -3.0, 3.0));
                REQUIRE((v - pz).dot(y - pz) <= 1e-12);
            }
        }
    }
    SUBCASE("wrong length") {
        CHECK_THROWS_AS(project_Z(p, Vector::Zero(p.dimension() + 1)), std::invalid_argument);
    }
}

}

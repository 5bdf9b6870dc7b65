#pragma once

#include "drne/game.hpp"
#include "drne/random.hpp"

#include <cstdint>

namespace drne::test {

// Single agent, n = m = 1, every coefficient given explicitly.
inline GameSpec scalar_game(double H, double c, double A, double b, double Q, double radius,
                            std::initializer_list<double> samples, LocalSet set = LocalSet::orthant()) {
    AgentSpec a;
    a.index = 1;
    a.H = {Matrix::Constant(1, 1, H)};
    a.c = Vector::Constant(1, c);
    a.A = Matrix::Constant(1, 1, A);
    a.b = Vector::Constant(1, b);
    a.Q = Matrix::Constant(1, 1, Q);
    a.radius = radius;
    a.samples.resize(static_cast<Eigen::Index>(samples.size()), 1);
    Eigen::Index k = 0;
    for (double s : samples) a.samples(k++, 0) = s;
    a.local_set = std::move(set);
    return GameSpec{1, 1, 1, {a}};
}

inline LocalSet interval(double lo, double hi) {
    return LocalSet::box(Vector::Constant(1, lo), Vector::Constant(1, hi));
}

inline Vector random_vector(SeededStream& s, Eigen::Index n, double a = -1.0, double b = 1.0) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = s.uniform(a, b);
    return v;
}

inline Matrix random_matrix(SeededStream& s, Eigen::Index r, Eigen::Index c, double a = -1.0, double b = 1.0) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = s.uniform(a, b);
    return m;
}

} // namespace drne::test

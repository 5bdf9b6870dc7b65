#include "drne/projections.hpp"

#include "drne/reformulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <stdexcept>
#include <vector>

namespace drne {

Vector project_simplex(const Vector& v) {
    const Eigen::Index n = v.size();
    if (n < 1) throw std::invalid_argument("project_simplex: empty vector");

    // Points already on the simplex up to summation rounding are returned as is,
    // which makes the projection exactly idempotent.
    const double slack = 4.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
    if ((v.array() >= 0.0).all() && std::abs(v.sum() - 1.0) <= slack) return v;

    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());

    // Largest r with u_r - (sum_{j<=r} u_j - 1)/r > 0; always holds for r = 1.
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
        cumulative += u[static_cast<std::size_t>(r)];
        const double candidate = (cumulative - 1.0) / static_cast<double>(r + 1);
        if (u[static_cast<std::size_t>(r)] - candidate > 0.0) theta = candidate;
    }
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

Vector project_local(const LocalSet& set, const Vector& v) {
    switch (set.kind) {
    case LocalSet::Kind::box:
        if (set.lo.size() != v.size() || set.hi.size() != v.size())
            throw std::invalid_argument("project_local: box dimension mismatch");
        return v.cwiseMax(set.lo).cwiseMin(set.hi);
    case LocalSet::Kind::simplex:
        return project_simplex(v);
    case LocalSet::Kind::orthant:
        return v.cwiseMax(0.0);
    }
    throw std::logic_error("project_local: unknown set kind");
}

Vector project_Z(const VIProblem& problem, const Vector& z) {
    if (z.size() != problem.dimension())
        throw std::invalid_argument("project_Z: stacked point has wrong length");
    Vector out(z.size());
    const Eigen::Index n = problem.n();
    for (std::size_t i = 0; i < problem.num_agents(); ++i) {
        const Eigen::Index off = problem.x_offset(i);
        out.segment(off, n) = project_local(problem.game().agent(i).local_set, z.segment(off, n));
        const Eigen::Index li = problem.lambda_index(i);
        out[li] = std::max(z[li], problem.lambda_floor(i));
    }
    return out;
}

} // namespace drne

#include "drne/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace drne {

LocalSet LocalSet::box(Vector lo, Vector hi) {
    return LocalSet{Kind::box, std::move(lo), std::move(hi)};
}

const char* to_string(LocalSet::Kind kind) {
    switch (kind) {
    case LocalSet::Kind::box: return "box";
    case LocalSet::Kind::simplex: return "simplex";
    case LocalSet::Kind::orthant: return "orthant";
    }
    return "unknown";
}

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::ostringstream os;
    os << "invalid game:";
    for (const auto& s : issues) os << "\n  - " << s;
    return os.str();
}

template <class... Ts>
std::string msg(const AgentSpec& a, Ts&&... parts) {
    std::ostringstream os;
    os << "agent " << a.index << ": ";
    (os << ... << parts);
    return os.str();
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

double tolerance_for(const Matrix& m) {
    const double scale = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
    return kPsdTolerance * std::max(1.0, scale);
}

// Symmetrizes `m` in place when its asymmetry is within tolerance.
// Returns false when the matrix is genuinely non-symmetric.
bool repair_symmetry(Matrix& m, bool& repaired) {
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    repaired = false;
    if (asym > tolerance_for(m)) return false;
    if (asym > 0.0) {
        m = (0.5 * (m + m.transpose())).eval();
        repaired = true;
    }
    return true;
}

} // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ValidatedGame validate_game(GameSpec spec) {
    std::vector<std::string> issues;
    std::vector<std::string> warnings;

    if (spec.N < 1) issues.emplace_back("N must be at least 1");
    if (spec.n < 1) issues.emplace_back("n must be at least 1");
    if (spec.m < 1) issues.emplace_back("m must be at least 1");
    if (static_cast<int>(spec.agents.size()) != spec.N) {
        std::ostringstream os;
        os << "expected " << spec.N << " agents, got " << spec.agents.size();
        issues.push_back(os.str());
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));

    const Eigen::Index n = spec.n;
    const Eigen::Index m = spec.m;
    const Eigen::Index nN = n * spec.N;

    std::vector<int> seen(static_cast<std::size_t>(spec.N), 0);
    for (const auto& a : spec.agents) {
        if (a.index < 1 || a.index > spec.N)
            issues.push_back(msg(a, "index out of range 1..", spec.N));
        else
            ++seen[static_cast<std::size_t>(a.index - 1)];
    }
    for (int i = 0; i < spec.N; ++i)
        if (seen[static_cast<std::size_t>(i)] > 1) {
            std::ostringstream os;
            os << "agent index " << i + 1 << " appears more than once";
            issues.push_back(os.str());
        }

    std::vector<SpectralDecomposition> spectra(spec.agents.size());
    for (std::size_t pos = 0; pos < spec.agents.size(); ++pos) {
        AgentSpec& a = spec.agents[pos];

        bool dims_ok = true;
        auto dim_issue = [&](const std::string& s) {
            issues.push_back(msg(a, "dimension mismatch: ", s));
            dims_ok = false;
        };
        if (static_cast<int>(a.H.size()) != spec.N) {
            std::ostringstream os;
            os << "H has " << a.H.size() << " blocks, expected " << spec.N;
            dim_issue(os.str());
        } else {
            for (std::size_t j = 0; j < a.H.size(); ++j)
                if (a.H[j].rows() != n || a.H[j].cols() != n) {
                    std::ostringstream os;
                    os << "H[" << j << "] is " << a.H[j].rows() << "x" << a.H[j].cols() << ", expected "
                       << n << "x" << n;
                    dim_issue(os.str());
                }
        }
        if (a.c.size() != n) dim_issue("c must have length n");
        if (a.A.rows() != m || a.A.cols() != nN) {
            std::ostringstream os;
            os << "A is " << a.A.rows() << "x" << a.A.cols() << ", expected " << m << "x" << nN;
            dim_issue(os.str());
        }
        if (a.b.size() != m) dim_issue("b must have length m");
        if (a.Q.rows() != m || a.Q.cols() != m) dim_issue("Q must be m x m");
        if (a.samples.rows() < 1)
            issues.push_back(msg(a, "empty sample set"));
        else if (a.samples.cols() != m)
            dim_issue("samples must have m columns");
        if (a.local_set.kind == LocalSet::Kind::box) {
            if (a.local_set.lo.size() != n || a.local_set.hi.size() != n)
                dim_issue("box bounds must have length n");
            else if ((a.local_set.lo.array() > a.local_set.hi.array()).any())
                issues.push_back(msg(a, "box has lo > hi"));
        }

        if (!std::isfinite(a.radius) || a.radius < 0.0)
            issues.push_back(msg(a, "negative or non-finite radius"));

        if (!dims_ok) continue;

        bool finite = all_finite(a.c) && all_finite(a.A) && all_finite(a.b) && all_finite(a.Q) &&
                      all_finite(a.samples);
        for (const auto& h : a.H) finite = finite && all_finite(h);
        if (a.local_set.kind == LocalSet::Kind::box)
            finite = finite && !a.local_set.lo.array().isNaN().any() &&
                     !a.local_set.hi.array().isNaN().any();
        if (!finite) {
            issues.push_back(msg(a, "non-finite entries"));
            continue;
        }

        bool repaired = false;
        if (a.index >= 1 && a.index <= spec.N) {
            const auto own_pos = static_cast<std::size_t>(a.index - 1);
            Matrix& own = a.H[own_pos];
            if (!repair_symmetry(own, repaired)) {
                issues.push_back(msg(a, "H[", own_pos, "] not symmetric"));
            } else {
                if (repaired) warnings.push_back(msg(a, "H[", own_pos, "] symmetrized"));
                const auto hs = eigendecompose(own);
                if (hs.min_eigenvalue() < -tolerance_for(own))
                    issues.push_back(msg(a, "H[", own_pos, "] not PSD (min eigenvalue ",
                                         hs.min_eigenvalue(), ")"));
            }
        }

        if (!repair_symmetry(a.Q, repaired)) {
            issues.push_back(msg(a, "Q not symmetric"));
            continue;
        }
        if (repaired) warnings.push_back(msg(a, "Q symmetrized"));
        SpectralDecomposition qs = eigendecompose(a.Q);
        if (qs.min_eigenvalue() < -tolerance_for(a.Q)) {
            issues.push_back(msg(a, "Q not PSD (min eigenvalue ", qs.min_eigenvalue(), ")"));
            continue;
        }
        if (qs.min_eigenvalue() < 0.0) {
            qs.d = qs.d.cwiseMax(0.0);
            warnings.push_back(msg(a, "Q eigenvalues clipped to 0"));
        }
        spectra[pos] = std::move(qs);
    }

    if (!issues.empty()) throw ValidationError(std::move(issues));

    // Indices form a permutation of 1..N; store agents in index order.
    std::vector<AgentSpec> agents(spec.agents.size());
    std::vector<SpectralDecomposition> ordered(spectra.size());
    for (std::size_t pos = 0; pos < spec.agents.size(); ++pos) {
        const auto slot = static_cast<std::size_t>(spec.agents[pos].index - 1);
        agents[slot] = std::move(spec.agents[pos]);
        ordered[slot] = std::move(spectra[pos]);
    }
    spec.agents = std::move(agents);

    ValidatedGame out;
    out.spec_ = std::move(spec);
    out.warnings_ = std::move(warnings);
    out.spectra_ = std::move(ordered);
    return out;
}

CostEval deterministic_cost(const AgentSpec& agent, std::size_t agent_pos, const Vector& x) {
    const Eigen::Index n = agent.c.size();
    const auto N = agent.H.size();
    if (x.size() != n * static_cast<Eigen::Index>(N))
        throw std::invalid_argument("deterministic_cost: collective decision has wrong length");
    if (agent_pos >= N) throw std::out_of_range("deterministic_cost: agent position out of range");

    const Eigen::Index off = static_cast<Eigen::Index>(agent_pos) * n;
    const auto xi = x.segment(off, n);
    CostEval out;
    out.value = agent.c.dot(xi);
    out.gradient = agent.c;
    for (std::size_t j = 0; j < N; ++j) {
        const auto xj = x.segment(static_cast<Eigen::Index>(j) * n, n);
        const Matrix& h = agent.H[j];
        out.value += xi.dot(h * xj);
        if (j == agent_pos)
            out.gradient += (h + h.transpose()) * xi;
        else
            out.gradient += h * xj;
    }
    return out;
}

} // namespace drne

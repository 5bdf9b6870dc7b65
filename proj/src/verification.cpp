#include "drne/verification.hpp"

#include "drne/experiments.hpp"
#include "drne/oracle.hpp"
#include "drne/random.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace drne {

namespace {

constexpr std::uint64_t kGradientKey = 0x6772616431ULL;
constexpr std::uint64_t kInnerSupKey = 0x7375703031ULL;
constexpr std::uint64_t kLinearKey = 0x6C696E3031ULL;
constexpr std::uint64_t kConvergenceKey = 0x636F6E7631ULL;

std::string describe(const char* what, double value) {
    std::ostringstream os;
    os.precision(3);
    os << what << " " << value;
    return os.str();
}

GateResult gate(std::string name, double value, double threshold, std::string detail = {}) {
    GateResult g;
    g.name = std::move(name);
    g.value = value;
    g.threshold = threshold;
    g.passed = std::isfinite(value) && value <= threshold;
    g.detail = std::move(detail);
    return g;
}

GateResult gradient_gate(const VerifyOptions& opt) {
    double worst = 0.0;
    for (std::size_t t = 0; t < opt.gradient_instances; ++t) {
        const std::uint64_t seed = derive_seed(derive_seed(opt.seed, kGradientKey), t);
        const VIProblem problem(validate_game(gen_random_instance(seed)));
        const Vector z = random_interior_point(problem, seed);
        worst = std::max(worst, fd_gradient_check(problem, z, 1e-5).max_rel_error);
    }
    return gate("pseudogradient_fd", worst, 1e-5,
                std::to_string(opt.gradient_instances) + " instances, step 1e-5");
}

GateResult inner_sup_gate(const VerifyOptions& opt) {
    double worst = 0.0;
    for (std::size_t t = 0; t < opt.inner_sup_triples; ++t) {
        const std::uint64_t seed = derive_seed(derive_seed(opt.seed, kInnerSupKey), t);
        const ValidatedGame game = validate_game(gen_random_instance(seed, 2, 3, 5, 20));
        const RotatedAgentData rot = rotate_agent(game.agent(0), game.q_spectrum(0), kDefaultZeta);
        SeededStream s(derive_seed(seed, 1));
        const Eigen::Index len = static_cast<Eigen::Index>(game.n()) * static_cast<Eigen::Index>(game.num_agents());
        Vector x(len);
        for (Eigen::Index c = 0; c < len; ++c) x[c] = s.uniform(-1.0, 1.0);
        const double lambda = rot.decomposition.max_eigenvalue() + s.uniform(0.1, 2.0);
        const auto k = static_cast<std::size_t>(
            s.discrete_uniform(0, static_cast<long long>(game.agent(0).sample_count()) - 1));
        const double closed = inner_sup(rot, x, lambda, k);
        const double ascent = numeric_inner_sup(game.agent(0), x, lambda, k);
        worst = std::max(worst, rel_error(closed, ascent));
    }

    GameSpec one{1, 1, 1, {}};
    AgentSpec a;
    a.index = 1;
    a.H = {Matrix::Constant(1, 1, 1.0)};
    a.c = Vector::Zero(1);
    a.A = Matrix::Zero(1, 1);
    a.b = Vector::Constant(1, 1.0);
    a.Q = Matrix::Constant(1, 1, 0.5);
    a.radius = 0.0;
    a.samples = Matrix::Constant(1, 1, 1.0);
    a.local_set = LocalSet::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
    one.agents.push_back(a);
    const ValidatedGame g = validate_game(one);
    const double analytic = inner_sup(rotate_agent(g.agent(0), g.q_spectrum(0), kDefaultZeta), Vector::Zero(1), 2.0, 0);
    const double analytic_err = std::abs(analytic - 13.0 / 6.0);

    GateResult r = gate("inner_sup_ascent", worst, 1e-6,
                        std::to_string(opt.inner_sup_triples) + " triples; " +
                            describe("13/6 case abs error", analytic_err));
    if (!(analytic_err <= 1e-12)) r.passed = false;
    return r;
}

GateResult linear_gate(const VerifyOptions& opt) {
    SolverParams params = opt.solver;
    params.tol = 1e-12;
    double worst = 0.0;
    std::size_t unconverged = 0;
    for (std::size_t t = 0; t < opt.linear_cases; ++t) {
        const DualityOutcome o = linear_duality_case(derive_seed(derive_seed(opt.seed, kLinearKey), t), params);
        if (!o.converged) ++unconverged;
        worst = std::max({worst, rel_error(o.dual_value, o.analytic_value), rel_error(o.lambda, o.lambda_star)});
    }
    GateResult r = gate("linear_duality", worst, 1e-6,
                        std::to_string(opt.linear_cases) + " cases, " + std::to_string(unconverged) +
                            " unconverged");
    if (unconverged) r.passed = false;
    return r;
}

void solution_gates(const VerifyOptions& opt, std::vector<GateResult>& out) {
    double worst_residual = 0.0;
    double worst_gap = 0.0;
    double worst_feasibility = 0.0;
    double identity_mismatch = 0.0;
    std::size_t failures = 0;
    ScenarioConfig cfg;
    cfg.solver = opt.solver;
    for (std::size_t t = 0; t < opt.convergence_instances; ++t) {
        cfg.seed = derive_seed(derive_seed(opt.seed, kConvergenceKey), t);
        const VIProblem problem(validate_game(generate(cfg)), cfg.zeta);
        const Vector z0 = default_initial_point(problem);
        const RunReport ag = agraal_solve(problem, opt.solver, z0);
        const RunReport hy = hybrid_solve(problem, opt.solver, z0);
        const RunReport nv = hybrid_solve(problem, opt.solver, z0, never_switch());
        for (const RunReport* r : {&ag, &hy}) {
            if (!r->converged) ++failures;
            worst_residual = std::max(worst_residual, r->final_residual);
            for (double g : best_response_gap(problem, r->z)) worst_gap = std::max(worst_gap, g);
            for (std::size_t i = 0; i < problem.num_agents(); ++i) {
                const double lam = r->z[problem.lambda_index(i)];
                worst_feasibility = std::max(worst_feasibility, problem.lambda_floor(i) - lam);
                const Vector xi = r->z.segment(problem.x_offset(i), problem.n());
                const LocalSet& set = problem.game().agent(i).local_set;
                worst_feasibility = std::max(worst_feasibility, (set.lo - xi).maxCoeff());
                worst_feasibility = std::max(worst_feasibility, (xi - set.hi).maxCoeff());
            }
        }
        const bool same = ag.trace.size() == nv.trace.size() &&
                          std::equal(ag.trace.begin(), ag.trace.end(), nv.trace.begin(),
                                     [](const TraceRow& a, const TraceRow& b) {
                                         return a.iter == b.iter && a.residual == b.residual && a.tau == b.tau &&
                                                a.phi == b.phi;
                                     }) &&
                          ag.z == nv.z;
        if (!same) identity_mismatch += 1.0;
    }
    const std::string n = std::to_string(opt.convergence_instances) + " illustrative instances";
    GateResult conv = gate("convergence", worst_residual, opt.solver.tol,
                           n + ", " + std::to_string(failures) + " unconverged runs");
    if (failures) conv.passed = false;
    out.push_back(conv);
    out.push_back(gate("best_response_gap", worst_gap, 1e-5, n));
    out.push_back(gate("feasibility", std::max(0.0, worst_feasibility), 0.0, n));
    out.push_back(gate("hybrid_never_switch_identity", identity_mismatch, 0.0, n));
}

} // namespace

double rel_error(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

bool VerifyReport::all_passed() const {
    return std::all_of(gates.begin(), gates.end(), [](const GateResult& g) { return g.passed; });
}

Vector random_interior_point(const VIProblem& problem, std::uint64_t seed) {
    SeededStream s(derive_seed(seed, 0x7A30));
    Vector z(problem.dimension());
    const Eigen::Index n = problem.n();
    for (std::size_t i = 0; i < problem.num_agents(); ++i) {
        const LocalSet& set = problem.game().agent(i).local_set;
        Vector x(n);
        switch (set.kind) {
        case LocalSet::Kind::box:
            for (Eigen::Index c = 0; c < n; ++c) x[c] = s.uniform(set.lo[c], set.hi[c]);
            break;
        case LocalSet::Kind::simplex:
            for (Eigen::Index c = 0; c < n; ++c) x[c] = s.uniform(0.1, 1.0);
            x /= x.sum();
            break;
        case LocalSet::Kind::orthant:
            for (Eigen::Index c = 0; c < n; ++c) x[c] = s.uniform(0.1, 2.0);
            break;
        }
        z.segment(problem.x_offset(i), n) = x;
        z[problem.lambda_index(i)] = problem.lambda_floor(i) + s.uniform(0.1, 2.0);
    }
    return z;
}

DualityOutcome linear_duality_case(std::uint64_t seed, const SolverParams& params) {
    SeededStream s(derive_seed(seed, 0xD0A1));
    const int n = static_cast<int>(s.discrete_uniform(1, 3));
    const int m = static_cast<int>(s.discrete_uniform(1, 3));
    const auto K = s.discrete_uniform(1, 20);
    AgentSpec a;
    a.index = 1;
    a.H = {Matrix::Identity(n, n)};
    a.c = Vector::Zero(n);
    a.A.resize(m, n);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) a.A(r, c) = s.uniform(-1.0, 1.0);
    a.b.resize(m);
    for (int r = 0; r < m; ++r) a.b[r] = s.uniform(-1.0, 1.0);
    a.Q = Matrix::Zero(m, m);
    a.radius = s.uniform(0.2, 1.0);
    a.samples.resize(K, m);
    for (Eigen::Index k = 0; k < K; ++k)
        for (int j = 0; j < m; ++j) a.samples(k, j) = s.normal();
    Vector x(n);
    for (int c = 0; c < n; ++c) x[c] = s.uniform(-1.0, 1.0);
    a.local_set = LocalSet::box(x, x);

    GameSpec spec{1, n, m, {a}};
    const VIProblem problem(validate_game(spec));
    const RunReport r = agraal_solve(problem, params, default_initial_point(problem));

    DualityOutcome out;
    out.converged = r.converged;
    const Vector xr = problem.collective_x(r.z);
    out.lambda = r.z[problem.lambda_index(0)];
    out.dual_value = agent_objective(problem, 0, r.z) - problem.cost(0, xr).value;
    const LinearCaseValue lc = linear_case_value(problem.game().agent(0), xr);
    out.analytic_value = lc.value;
    out.lambda_star = lc.lambda_star.value_or(NAN);
    return out;
}

VerifyReport verify_battery(const VerifyOptions& options) {
    options.solver.validate();
    VerifyReport rep;
    rep.gates.push_back(gradient_gate(options));
    rep.gates.push_back(inner_sup_gate(options));
    rep.gates.push_back(linear_gate(options));
    solution_gates(options, rep.gates);
    return rep;
}

} // namespace drne

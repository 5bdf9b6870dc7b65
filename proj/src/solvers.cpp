#include "drne/solvers.hpp"

#include "drne/projections.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace drne {

void SolverParams::validate() const {
    auto fail = [](const char* what) { throw std::invalid_argument(std::string("SolverParams: ") + what); };
    if (!(tau0 > 0.0) || !std::isfinite(tau0)) fail("tau0 must be positive");
    if (!(tau_bar > 0.0)) fail("tau_bar must be positive");
    if (!(alpha > 1.0) || alpha > kGoldenRatio + 1e-15) fail("alpha must lie in (1, (1+sqrt 5)/2]");
    if (!(phi_bar > 1.0)) fail("phi_bar must exceed 1");
    if (!(tol >= 0.0)) fail("tol must be nonnegative");
    if (max_iters < 1) fail("max_iters must be at least 1");
    if (record_every < 1) fail("record_every must be at least 1");
}

const char* to_string(RunStatus status) {
    switch (status) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iterations: return "max_iterations";
    case RunStatus::non_finite: return "non_finite";
    }
    return "unknown";
}

double stepsize_update(double tau_prev, double theta_prev, double dz_sq, double dF_sq,
                       const SolverParams& params) {
    double tau = std::min(params.rho() * tau_prev, params.tau_bar);
    if (dF_sq >= 1e-300) {
        const double curvature = params.alpha * theta_prev / (4.0 * tau_prev) * (dz_sq / dF_sq);
        tau = std::min(tau, curvature);
    }
    return tau;
}

Vector default_initial_point(const VIProblem& problem) {
    Vector z(problem.dimension());
    const Eigen::Index n = problem.n();
    for (std::size_t i = 0; i < problem.num_agents(); ++i) {
        z.segment(problem.x_offset(i), n) =
            project_local(problem.game().agent(i).local_set, Vector::Zero(n));
        z[problem.lambda_index(i)] = problem.lambda_floor(i) + 1.0;
    }
    return z;
}

namespace {

using Clock = std::chrono::steady_clock;

class Recorder {
public:
    Recorder(const SolverParams& params, std::vector<TraceRow>& rows, const TraceSink& sink)
        : params_(params), rows_(rows), sink_(sink) {}

    void record(const TraceRow& row) {
        if (row.iter <= params_.record_all_until || row.iter % params_.record_every == 0) push(row);
    }

    // The last row of a run is always kept so the trace ends at the final residual.
    void close(const TraceRow& row) {
        if (rows_.empty() || rows_.back().iter != row.iter) push(row);
    }

private:
    void push(const TraceRow& row) {
        rows_.push_back(row);
        if (sink_) sink_(row);
    }

    const SolverParams& params_;
    std::vector<TraceRow>& rows_;
    const TraceSink& sink_;
};

bool evaluate(const VIProblem& problem, const Vector& z, Vector& F) {
    F = mapping(problem, z);
    return F.allFinite();
}

std::string non_finite_dump(std::size_t iter, const Vector& z, const Vector& F) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite mapping value at iteration " << iter << "; z = [";
    for (Eigen::Index i = 0; i < z.size(); ++i) os << (i ? ", " : "") << z[i];
    os << "]; F = [";
    for (Eigen::Index i = 0; i < F.size(); ++i) os << (i ? ", " : "") << F[i];
    os << "]";
    return os.str();
}

void finish(const VIProblem& problem, RunReport& rep, Clock::time_point start) {
    rep.costs.clear();
    if (rep.status != RunStatus::non_finite)
        for (std::size_t i = 0; i < problem.num_agents(); ++i)
            rep.costs.push_back(agent_objective(problem, i, rep.z));
    rep.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
}

// Iterate state shared by both solvers.
struct State {
    Vector z, z_prev, F, F_prev, zbar;
    double tau_prev = 0.0;
    double theta = 1.0;
    double residual = 0.0;
};

// Projects z0, evaluates F, and takes the auxiliary projected step with tau0.
// Returns false (with rep filled) when F is non-finite.
bool initialize(const VIProblem& problem, const SolverParams& params, const Vector& z0, State& s,
                RunReport& rep) {
    if (z0.size() != problem.dimension())
        throw std::invalid_argument("solve: starting point has wrong length");
    s.z = project_Z(problem, z0);
    rep.z0 = s.z;
    if (!evaluate(problem, s.z, s.F)) {
        rep.status = RunStatus::non_finite;
        rep.diagnostic = non_finite_dump(0, s.z, s.F);
        rep.z = s.z;
        return false;
    }
    s.zbar = s.z;
    s.tau_prev = params.tau0;
    s.theta = 1.0;
    s.z_prev = s.z;
    s.F_prev = s.F;
    s.z = project_Z(problem, s.zbar - params.tau0 * s.F);
    if (!evaluate(problem, s.z, s.F)) {
        rep.status = RunStatus::non_finite;
        rep.diagnostic = non_finite_dump(1, s.z, s.F);
        rep.z = s.z;
        return false;
    }
    s.residual = natural_residual(problem, s.z, s.F);
    return true;
}

// One golden-ratio step with momentum phi. Returns false when F(z^{k+1}) is non-finite.
bool step(const VIProblem& problem, const SolverParams& params, double phi, State& s) {
    const double tau = stepsize_update(s.tau_prev, s.theta, (s.z - s.z_prev).squaredNorm(),
                                       (s.F - s.F_prev).squaredNorm(), params);
    s.zbar = ((phi - 1.0) * s.z + s.zbar) / phi;
    Vector z_next = project_Z(problem, s.zbar - tau * s.F);
    s.theta = params.alpha * tau / s.tau_prev;
    s.tau_prev = tau;
    s.z_prev = std::move(s.z);
    s.F_prev = std::move(s.F);
    s.z = std::move(z_next);
    if (!evaluate(problem, s.z, s.F)) return false;
    s.residual = natural_residual(problem, s.z, s.F);
    return std::isfinite(s.residual);
}

} // namespace

RunReport agraal_solve(const VIProblem& problem, const SolverParams& params, const Vector& z0,
                       const TraceSink& sink) {
    params.validate();
    const auto start = Clock::now();
    RunReport rep;
    Recorder rec(params, rep.trace, sink);
    State s;
    if (!initialize(problem, params, z0, s, rep)) {
        finish(problem, rep, start);
        return rep;
    }

    const double phi = params.alpha;
    std::size_t k = 1;
    for (;;) {
        rec.record({k, s.residual, s.tau_prev, phi});
        if (s.residual <= params.tol) {
            rep.status = RunStatus::converged;
            break;
        }
        if (k >= params.max_iters) {
            rep.status = RunStatus::max_iterations;
            break;
        }
        const bool ok = step(problem, params, phi, s);
        ++k;
        if (!ok) {
            rep.status = RunStatus::non_finite;
            rep.diagnostic = non_finite_dump(k, s.z, s.F);
            break;
        }
    }
    rec.close({k, s.residual, s.tau_prev, phi});
    rep.converged = rep.status == RunStatus::converged;
    rep.iterations = k;
    rep.final_residual = s.residual;
    rep.z = s.z;
    finish(problem, rep, start);
    return rep;
}

SwitchPredicate never_switch() {
    return [](const SwitchContext&) { return false; };
}

SwitchPredicate median_window_switch(std::size_t window, std::size_t cooldown) {
    if (window < 1) throw std::invalid_argument("median_window_switch: window must be positive");
    struct Rule {
        std::size_t window;
        std::size_t cooldown;
        std::size_t since_revert = 0;

        bool operator()(const SwitchContext& ctx) {
            if (ctx.large_momentum) {
                if (ctx.history.empty()) return std::isfinite(ctx.candidate_residual);
                const std::size_t count = std::min(window, ctx.history.size());
                std::vector<double> tail(ctx.history.end() - static_cast<std::ptrdiff_t>(count),
                                         ctx.history.end());
                const auto mid = tail.begin() + static_cast<std::ptrdiff_t>(count / 2);
                std::nth_element(tail.begin(), mid, tail.end());
                double median = *mid;
                if (count % 2 == 0) {
                    const double lower = *std::max_element(tail.begin(), mid);
                    median = 0.5 * (median + lower);
                }
                const bool keep = std::isfinite(ctx.candidate_residual) && ctx.candidate_residual <= median;
                if (!keep) since_revert = 0;
                return keep;
            }
            ++since_revert;
            return since_revert >= cooldown;
        }
    };
    return Rule{window, cooldown};
}

RunReport hybrid_solve(const VIProblem& problem, const SolverParams& params, const Vector& z0,
                       SwitchPredicate predicate, const TraceSink& sink) {
    params.validate();
    if (!predicate) predicate = never_switch();
    const auto start = Clock::now();
    RunReport rep;
    Recorder rec(params, rep.trace, sink);
    State s;
    if (!initialize(problem, params, z0, s, rep)) {
        finish(problem, rep, start);
        return rep;
    }

    std::vector<double> history{s.residual};
    bool large = false;
    double row_phi = params.alpha;
    std::size_t k = 1;
    State saved;
    for (;;) {
        rec.record({k, s.residual, s.tau_prev, row_phi});
        if (s.residual <= params.tol) {
            rep.status = RunStatus::converged;
            break;
        }
        if (k >= params.max_iters) {
            rep.status = RunStatus::max_iterations;
            break;
        }

        const double phi = large ? params.phi_bar : params.alpha;
        if (large) saved = s;
        const bool ok = step(problem, params, phi, s);
        ++k;
        if (!ok && !large) {
            rep.status = RunStatus::non_finite;
            rep.diagnostic = non_finite_dump(k, s.z, s.F);
            break;
        }

        SwitchContext ctx;
        ctx.iter = k;
        ctx.large_momentum = large;
        ctx.candidate_residual = ok ? s.residual : std::numeric_limits<double>::infinity();
        ctx.tau = s.tau_prev;
        ctx.history = history;
        const bool next_large = predicate(ctx) && ok;

        if (large && !next_large) {
            // Rejected large-momentum step: z^{k+1} = z^k, zbar^k = zbar^{k-1}, tau and theta kept.
            s = saved;
            ++rep.reverted_steps;
        } else {
            history.push_back(s.residual);
        }
        row_phi = phi;
        large = next_large;
    }
    rec.close({k, s.residual, s.tau_prev, row_phi});
    rep.converged = rep.status == RunStatus::converged;
    rep.iterations = k;
    rep.final_residual = s.residual;
    rep.z = s.z;
    finish(problem, rep, start);
    return rep;
}

std::vector<RunReport> zeta_sweep(const ValidatedGame& game, const SolverParams& params,
                                  std::span<const double> zetas) {
    std::vector<RunReport> out;
    out.reserve(zetas.size());
    for (const double zeta : zetas) {
        const VIProblem problem(game, zeta);
        out.push_back(agraal_solve(problem, params, default_initial_point(problem)));
    }
    return out;
}

} // namespace drne

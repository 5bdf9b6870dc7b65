#include "drne/drne.h"

#include "drne/experiments.hpp"
#include "drne/projections.hpp"
#include "drne/serialization.hpp"
#include "drne/verification.hpp"

#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

struct drne_game {
    drne::ValidatedGame game;
};

struct drne_problem {
    drne::VIProblem problem;
};

struct drne_report {
    drne::RunReport report;
    std::string algorithm;
};

struct drne_sweep {
    drne::SweepReport report;
};

namespace {

thread_local std::string last_error;

drne_status fail(drne_status status, const std::string& message) {
    last_error = message;
    return status;
}

// Runs `body` and maps exceptions onto status codes.
template <class Body>
drne_status guarded(Body&& body) {
    try {
        last_error.clear();
        return body();
    } catch (const drne::ValidationError& e) {
        std::string msg = "game validation failed:";
        for (const auto& issue : e.issues()) msg += "\n  " + issue;
        return fail(DRNE_ERR_VALIDATION, msg);
    } catch (const drne::ParseError& e) {
        return fail(DRNE_ERR_PARSE, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(DRNE_ERR_PARSE, e.what());
    } catch (const drne::InfiniteSupremum& e) {
        return fail(DRNE_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(DRNE_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::out_of_range& e) {
        return fail(DRNE_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return fail(DRNE_ERR_DOMAIN, e.what());
    } catch (const std::bad_alloc&) {
        return fail(DRNE_ERR_INTERNAL, "out of memory");
    } catch (const std::runtime_error& e) {
        return fail(DRNE_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(DRNE_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(DRNE_ERR_INTERNAL, "unknown error");
    }
}

drne_status null_argument(const char* what) {
    return fail(DRNE_ERR_INVALID_ARGUMENT, std::string("null argument: ") + what);
}

char* duplicate(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

drne::Vector copy_in(const double* data, std::size_t len) {
    drne::Vector v(static_cast<Eigen::Index>(len));
    for (std::size_t i = 0; i < len; ++i) v[static_cast<Eigen::Index>(i)] = data[i];
    return v;
}

void copy_out(const drne::Vector& v, double* data) {
    for (Eigen::Index i = 0; i < v.size(); ++i) data[i] = v[i];
}

drne_status check_length(const drne_problem* p, std::size_t len) {
    const auto dim = static_cast<std::size_t>(p->problem.dimension());
    if (len != dim)
        return fail(DRNE_ERR_INVALID_ARGUMENT,
                    "length mismatch: expected " + std::to_string(dim) + ", got " + std::to_string(len));
    return DRNE_OK;
}

const drne::RunReport* sweep_run(const drne_sweep* s, std::size_t cell, std::size_t instance,
                                 drne_algorithm algorithm) {
    if (cell >= s->report.cells.size()) throw std::out_of_range("sweep cell index out of range");
    const auto& inst = s->report.cells[cell].instances;
    if (instance >= inst.size()) throw std::out_of_range("sweep instance index out of range");
    if (algorithm == DRNE_AGRAAL) return &inst[instance].agraal;
    if (algorithm == DRNE_HYBRID) return &inst[instance].hybrid;
    throw std::invalid_argument("sweeps record only agraal and hybrid runs");
}

} // namespace

extern "C" {

const char* drne_last_error(void) {
    return last_error.c_str();
}

void drne_string_free(char* s) {
    std::free(s);
}

const char* drne_version(void) {
    return "0.1.0";
}

drne_status drne_game_from_json(const char* json, drne_game** out) {
    if (!json || !out) return null_argument("json/out");
    return guarded([&] {
        auto spec = drne::game_from_json(drne::parse_json(json));
        *out = new drne_game{drne::validate_game(std::move(spec))};
        return DRNE_OK;
    });
}

drne_status drne_game_generate(const char* config_json, uint64_t instance, drne_game** out) {
    if (!config_json || !out) return null_argument("config_json/out");
    return guarded([&] {
        const auto config = drne::scenario_from_json(drne::parse_json(config_json));
        *out = new drne_game{drne::validate_game(drne::generate(config, static_cast<std::size_t>(instance)))};
        return DRNE_OK;
    });
}

drne_status drne_game_to_json(const drne_game* game, char** out) {
    if (!game || !out) return null_argument("game/out");
    return guarded([&] {
        *out = duplicate(drne::to_json(game->game.spec()).dump(2) + "\n");
        return DRNE_OK;
    });
}

drne_status drne_game_warnings(const drne_game* game, char** out) {
    if (!game || !out) return null_argument("game/out");
    return guarded([&] {
        std::string text;
        for (const auto& w : game->game.warnings()) text += w + "\n";
        *out = duplicate(text);
        return DRNE_OK;
    });
}

void drne_game_free(drne_game* game) {
    delete game;
}

drne_status drne_problem_create(const drne_game* game, double zeta, drne_problem** out) {
    if (!game || !out) return null_argument("game/out");
    return guarded([&] {
        *out = new drne_problem{drne::VIProblem(game->game, zeta > 0.0 ? zeta : drne::kDefaultZeta)};
        return DRNE_OK;
    });
}

void drne_problem_free(drne_problem* problem) {
    delete problem;
}

size_t drne_problem_dimension(const drne_problem* problem) {
    return problem ? static_cast<size_t>(problem->problem.dimension()) : 0;
}

size_t drne_problem_num_agents(const drne_problem* problem) {
    return problem ? problem->problem.num_agents() : 0;
}

drne_status drne_problem_initial_point(const drne_problem* problem, double* z, size_t len) {
    if (!problem || !z) return null_argument("problem/z");
    if (auto s = check_length(problem, len)) return s;
    return guarded([&] {
        copy_out(drne::default_initial_point(problem->problem), z);
        return DRNE_OK;
    });
}

drne_status drne_problem_project(const drne_problem* problem, const double* v, double* out, size_t len) {
    if (!problem || !v || !out) return null_argument("problem/v/out");
    if (auto s = check_length(problem, len)) return s;
    return guarded([&] {
        copy_out(drne::project_Z(problem->problem, copy_in(v, len)), out);
        return DRNE_OK;
    });
}

drne_status drne_problem_mapping(const drne_problem* problem, const double* z, double* F, size_t len) {
    if (!problem || !z || !F) return null_argument("problem/z/F");
    if (auto s = check_length(problem, len)) return s;
    return guarded([&] {
        copy_out(drne::mapping(problem->problem, copy_in(z, len)), F);
        return DRNE_OK;
    });
}

drne_status drne_problem_residual(const drne_problem* problem, const double* z, size_t len, double* residual) {
    if (!problem || !z || !residual) return null_argument("problem/z/residual");
    if (auto s = check_length(problem, len)) return s;
    return guarded([&] {
        *residual = drne::natural_residual(problem->problem, copy_in(z, len));
        return DRNE_OK;
    });
}

drne_status drne_problem_agent_cost(const drne_problem* problem, size_t agent, const double* z, size_t len,
                                    double* cost) {
    if (!problem || !z || !cost) return null_argument("problem/z/cost");
    if (auto s = check_length(problem, len)) return s;
    if (agent >= problem->problem.num_agents()) return fail(DRNE_ERR_INVALID_ARGUMENT, "agent index out of range");
    return guarded([&] {
        *cost = drne::agent_objective(problem->problem, agent, copy_in(z, len));
        return DRNE_OK;
    });
}

drne_status drne_solve(const drne_problem* problem, drne_algorithm algorithm, const char* params_json,
                       const double* z0, size_t len, drne_report** out) {
    if (!problem || !out) return null_argument("problem/out");
    if (z0)
        if (auto s = check_length(problem, len)) return s;
    return guarded([&] {
        const drne::SolverParams params =
            params_json ? drne::solver_params_from_json(drne::parse_json(params_json)) : drne::SolverParams{};
        params.validate();
        const drne::Vector start = z0 ? copy_in(z0, len) : drne::default_initial_point(problem->problem);
        auto rep = std::make_unique<drne_report>();
        switch (algorithm) {
        case DRNE_AGRAAL:
            rep->report = drne::agraal_solve(problem->problem, params, start);
            rep->algorithm = "agraal";
            break;
        case DRNE_HYBRID:
            rep->report = drne::hybrid_solve(problem->problem, params, start);
            rep->algorithm = "hybrid";
            break;
        case DRNE_HYBRID_NEVER_SWITCH:
            rep->report = drne::hybrid_solve(problem->problem, params, start, drne::never_switch());
            rep->algorithm = "hybrid";
            break;
        default:
            return fail(DRNE_ERR_INVALID_ARGUMENT, "unknown algorithm");
        }
        *out = rep.release();
        return DRNE_OK;
    });
}

void drne_report_free(drne_report* report) {
    delete report;
}

int drne_report_status(const drne_report* report) {
    return report ? static_cast<int>(report->report.status) : -1;
}

size_t drne_report_iterations(const drne_report* report) {
    return report ? report->report.iterations : 0;
}

double drne_report_residual(const drne_report* report) {
    return report ? report->report.final_residual : 0.0;
}

size_t drne_report_reverted_steps(const drne_report* report) {
    return report ? report->report.reverted_steps : 0;
}

double drne_report_wall_seconds(const drne_report* report) {
    return report ? report->report.wall_seconds : 0.0;
}

size_t drne_report_trace_length(const drne_report* report) {
    return report ? report->report.trace.size() : 0;
}

drne_status drne_report_trace_row(const drne_report* report, size_t row, double out[4]) {
    if (!report || !out) return null_argument("report/out");
    if (row >= report->report.trace.size()) return fail(DRNE_ERR_INVALID_ARGUMENT, "trace row out of range");
    const auto& r = report->report.trace[row];
    out[0] = static_cast<double>(r.iter);
    out[1] = r.residual;
    out[2] = r.tau;
    out[3] = r.phi;
    return DRNE_OK;
}

drne_status drne_report_solution(const drne_report* report, double* z, size_t len) {
    if (!report || !z) return null_argument("report/z");
    if (len != static_cast<size_t>(report->report.z.size()))
        return fail(DRNE_ERR_INVALID_ARGUMENT, "length mismatch");
    copy_out(report->report.z, z);
    return DRNE_OK;
}

drne_status drne_report_to_json(const drne_report* report, char** out) {
    if (!report || !out) return null_argument("report/out");
    return guarded([&] {
        *out = duplicate(drne::to_json(report->report, report->algorithm).dump(2) + "\n");
        return DRNE_OK;
    });
}

drne_status drne_report_trace_csv(const drne_report* report, char** out) {
    if (!report || !out) return null_argument("report/out");
    return guarded([&] {
        *out = duplicate(drne::trace_csv(report->report));
        return DRNE_OK;
    });
}

drne_status drne_sweep_run(const char* config_json, unsigned threads, drne_sweep** out) {
    if (!config_json || !out) return null_argument("config_json/out");
    return guarded([&] {
        const auto config = drne::scenario_from_json(drne::parse_json(config_json));
        *out = new drne_sweep{drne::run_sweep(config, threads)};
        return DRNE_OK;
    });
}

void drne_sweep_free(drne_sweep* sweep) {
    delete sweep;
}

drne_status drne_sweep_to_json(const drne_sweep* sweep, char** out) {
    if (!sweep || !out) return null_argument("sweep/out");
    return guarded([&] {
        *out = duplicate(drne::to_json(sweep->report).dump(2) + "\n");
        return DRNE_OK;
    });
}

drne_status drne_sweep_quantiles_csv(const drne_sweep* sweep, char** out) {
    if (!sweep || !out) return null_argument("sweep/out");
    return guarded([&] {
        *out = duplicate(drne::cost_quantiles_csv(sweep->report));
        return DRNE_OK;
    });
}

size_t drne_sweep_num_cells(const drne_sweep* sweep) {
    return sweep ? sweep->report.cells.size() : 0;
}

size_t drne_sweep_num_instances(const drne_sweep* sweep, size_t cell) {
    if (!sweep || cell >= sweep->report.cells.size()) return 0;
    return sweep->report.cells[cell].instances.size();
}

drne_status drne_sweep_trace_name(const drne_sweep* sweep, size_t cell, size_t instance, drne_algorithm algorithm,
                                  char** out) {
    if (!sweep || !out) return null_argument("sweep/out");
    return guarded([&] {
        sweep_run(sweep, cell, instance, algorithm);
        *out = duplicate("cell" + std::to_string(cell) + "_inst" + std::to_string(instance) + "_" +
                         (algorithm == DRNE_AGRAAL ? "agraal" : "hybrid"));
        return DRNE_OK;
    });
}

drne_status drne_sweep_trace_csv(const drne_sweep* sweep, size_t cell, size_t instance, drne_algorithm algorithm,
                                 char** out) {
    if (!sweep || !out) return null_argument("sweep/out");
    return guarded([&] {
        *out = duplicate(drne::trace_csv(*sweep_run(sweep, cell, instance, algorithm)));
        return DRNE_OK;
    });
}

size_t drne_sweep_failures(const drne_sweep* sweep) {
    if (!sweep) return 0;
    size_t failures = 0;
    for (const auto& cell : sweep->report.cells)
        for (const auto& inst : cell.instances) failures += !inst.agraal.converged + !inst.hybrid.converged;
    return failures;
}

drne_status drne_verify(const char* options_json, char** report_json, int* passed) {
    if (!report_json || !passed) return null_argument("report_json/passed");
    return guarded([&] {
        drne::VerifyOptions opt;
        if (options_json) {
            const drne::Json doc = drne::parse_json(options_json);
            if (!doc.is_object()) throw drne::ParseError("verify options: expected an object");
            auto count = [&](const char* key, std::size_t& dst) {
                if (doc.contains(key)) dst = doc.at(key).get<std::size_t>();
            };
            if (doc.contains("seed")) opt.seed = doc.at("seed").get<std::uint64_t>();
            count("gradient_instances", opt.gradient_instances);
            count("inner_sup_triples", opt.inner_sup_triples);
            count("linear_cases", opt.linear_cases);
            count("convergence_instances", opt.convergence_instances);
            if (doc.contains("solver")) opt.solver = drne::solver_params_from_json(doc.at("solver"));
        }
        const drne::VerifyReport rep = drne::verify_battery(opt);
        drne::Json gates = drne::Json::array();
        for (const auto& g : rep.gates)
            gates.push_back({{"name", g.name},
                             {"passed", g.passed},
                             {"value", g.value},
                             {"threshold", g.threshold},
                             {"detail", g.detail}});
        const drne::Json doc = {{"seed", opt.seed}, {"passed", rep.all_passed()}, {"gates", std::move(gates)}};
        *report_json = duplicate(doc.dump(2) + "\n");
        *passed = rep.all_passed() ? 1 : 0;
        return DRNE_OK;
    });
}

} // extern "C"

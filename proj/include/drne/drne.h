/*
 * drne.h - C interface to the distributionally robust Nash equilibrium library.
 *
 * Objects are opaque handles created and destroyed through this API. Every
 * fallible function returns a drne_status; on failure, drne_last_error()
 * returns a message for the calling thread. Strings returned through
 * `char** out` parameters are heap allocated and must be released with
 * drne_string_free().
 */
#ifndef DRNE_H
#define DRNE_H

#include <stddef.h>
#include <stdint.h>

#if defined(DRNE_BUILDING_LIBRARY)
#define DRNE_API __attribute__((visibility("default")))
#else
#define DRNE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum drne_status {
    DRNE_OK = 0,
    DRNE_ERR_INVALID_ARGUMENT = 1, /* null handle, bad index, wrong length */
    DRNE_ERR_PARSE = 2,            /* malformed JSON document or config */
    DRNE_ERR_VALIDATION = 3,       /* game failed validation */
    DRNE_ERR_DOMAIN = 4,           /* evaluation outside the dual domain */
    DRNE_ERR_NUMERIC = 5,          /* non-finite values or failed decomposition */
    DRNE_ERR_INTERNAL = 6
} drne_status;

typedef enum drne_algorithm {
    DRNE_AGRAAL = 0,
    DRNE_HYBRID = 1,
    DRNE_HYBRID_NEVER_SWITCH = 2
} drne_algorithm;

typedef struct drne_game drne_game;       /* validated game */
typedef struct drne_problem drne_problem; /* reformulated VI */
typedef struct drne_report drne_report;   /* result of one solve */
typedef struct drne_sweep drne_sweep;     /* result of a sweep */

/* Message for the last failed call on this thread ("" when none). */
DRNE_API const char* drne_last_error(void);
DRNE_API void drne_string_free(char* s);
DRNE_API const char* drne_version(void);

/* Games */
DRNE_API drne_status drne_game_from_json(const char* json, drne_game** out);
/* Generates instance `instance` of a scenario config (JSON). */
DRNE_API drne_status drne_game_generate(const char* config_json, uint64_t instance, drne_game** out);
DRNE_API drne_status drne_game_to_json(const drne_game* game, char** out);
/* Validation warnings, one per line. */
DRNE_API drne_status drne_game_warnings(const drne_game* game, char** out);
DRNE_API void drne_game_free(drne_game* game);

/* Problems. zeta <= 0 selects the default shift. */
DRNE_API drne_status drne_problem_create(const drne_game* game, double zeta, drne_problem** out);
DRNE_API void drne_problem_free(drne_problem* problem);
DRNE_API size_t drne_problem_dimension(const drne_problem* problem);
DRNE_API size_t drne_problem_num_agents(const drne_problem* problem);
DRNE_API drne_status drne_problem_initial_point(const drne_problem* problem, double* z, size_t len);
DRNE_API drne_status drne_problem_project(const drne_problem* problem, const double* v, double* out, size_t len);
DRNE_API drne_status drne_problem_mapping(const drne_problem* problem, const double* z, double* F, size_t len);
DRNE_API drne_status drne_problem_residual(const drne_problem* problem, const double* z, size_t len,
                                           double* residual);
DRNE_API drne_status drne_problem_agent_cost(const drne_problem* problem, size_t agent, const double* z,
                                             size_t len, double* cost);

/*
 * Solves from z0 (NULL: default initial point). params_json may be NULL or a
 * JSON object with any of alpha, tau0, tau_bar, phi_bar, tol, max_iters,
 * record_every, record_all_until.
 */
DRNE_API drne_status drne_solve(const drne_problem* problem, drne_algorithm algorithm, const char* params_json,
                                const double* z0, size_t len, drne_report** out);
DRNE_API void drne_report_free(drne_report* report);
/* 0 converged, 1 iteration limit, 2 non-finite values. */
DRNE_API int drne_report_status(const drne_report* report);
DRNE_API size_t drne_report_iterations(const drne_report* report);
DRNE_API double drne_report_residual(const drne_report* report);
DRNE_API size_t drne_report_reverted_steps(const drne_report* report);
DRNE_API double drne_report_wall_seconds(const drne_report* report);
DRNE_API size_t drne_report_trace_length(const drne_report* report);
/* Row `row` of the trace as (iter, residual, tau, phi). */
DRNE_API drne_status drne_report_trace_row(const drne_report* report, size_t row, double out[4]);
DRNE_API drne_status drne_report_solution(const drne_report* report, double* z, size_t len);
DRNE_API drne_status drne_report_to_json(const drne_report* report, char** out);
DRNE_API drne_status drne_report_trace_csv(const drne_report* report, char** out);

/* Sweeps. threads = 0 uses the hardware concurrency; output does not depend on it. */
DRNE_API drne_status drne_sweep_run(const char* config_json, unsigned threads, drne_sweep** out);
DRNE_API void drne_sweep_free(drne_sweep* sweep);
DRNE_API drne_status drne_sweep_to_json(const drne_sweep* sweep, char** out);
DRNE_API drne_status drne_sweep_quantiles_csv(const drne_sweep* sweep, char** out);
DRNE_API size_t drne_sweep_num_cells(const drne_sweep* sweep);
DRNE_API size_t drne_sweep_num_instances(const drne_sweep* sweep, size_t cell);
/* Stable file-name stem of a sweep trace, e.g. "cell0_inst3_agraal". */
DRNE_API drne_status drne_sweep_trace_name(const drne_sweep* sweep, size_t cell, size_t instance,
                                           drne_algorithm algorithm, char** out);
DRNE_API drne_status drne_sweep_trace_csv(const drne_sweep* sweep, size_t cell, size_t instance,
                                          drne_algorithm algorithm, char** out);
/* Number of runs in the sweep that did not converge. */
DRNE_API size_t drne_sweep_failures(const drne_sweep* sweep);

/*
 * Oracle battery. options_json may be NULL or an object with any of seed,
 * gradient_instances, inner_sup_triples, linear_cases, convergence_instances,
 * solver. report_json receives {"passed": bool, "gates": [...]}; *passed is
 * set to 1 when every gate passes.
 */
DRNE_API drne_status drne_verify(const char* options_json, char** report_json, int* passed);

#ifdef __cplusplus
}
#endif

#endif /* DRNE_H */

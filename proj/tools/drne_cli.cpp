// drne: command-line front end over the C API.
//
//   drne generate --config scenario.json [--seed S] [--instance K] [--out DIR]
//   drne solve    (--game gamespec.json | --config scenario.json) [--algorithm agraal|hybrid|both]
//   drne sweep    --config scenario.json [--threads T]
//   drne verify   [--seed S] [--quick]
//
// Exit codes: 0 success, 1 invalid input, 2 convergence failure or non-finite
// values, 3 oracle gate failure.

#include "drne/drne.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kNotConverged = 2, kGateFailed = 3 };

struct CliError {
    int code;
    std::string message;
};

void check(drne_status status, const std::string& context) {
    if (status == DRNE_OK) return;
    const int code = status == DRNE_ERR_NUMERIC || status == DRNE_ERR_DOMAIN ? kNotConverged : kInvalid;
    throw CliError{code, context + ": " + drne_last_error()};
}

std::string take(char* s) {
    std::string out = s ? s : "";
    drne_string_free(s);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{kInvalid, "cannot read " + path};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError{kInvalid, "cannot write " + path.string()};
    out << content;
    if (!out) throw CliError{kInvalid, "write failed for " + path.string()};
}

fs::path output_dir(const std::string& flag) {
    std::string dir = flag;
    if (dir.empty()) {
        const char* env = std::getenv("DRNE_OUTPUT_DIR");
        dir = env && *env ? env : ".";
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError{kInvalid, "cannot create output directory " + dir + ": " + ec.message()};
    return dir;
}

// Loads a scenario config and applies the --seed override.
std::string load_config(const std::string& path, const std::optional<std::uint64_t>& seed) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw CliError{kInvalid, path + ": invalid JSON: " + e.what()};
    }
    if (!doc.is_object()) throw CliError{kInvalid, path + ": expected a JSON object"};
    if (seed) doc["seed"] = *seed;
    return doc.dump();
}

template <class T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    ~Handle() { Free(ptr); }
};

json trace_json(const drne_report* r) {
    json rows = json::array();
    double row[4];
    for (size_t k = 0; k < drne_report_trace_length(r); ++k) {
        drne_report_trace_row(r, k, row);
        rows.push_back({{"iter", static_cast<std::size_t>(row[0])},
                        {"residual", row[1]},
                        {"tau", row[2]},
                        {"phi", row[3]}});
    }
    return rows;
}

struct Options {
    std::string config;
    std::string game;
    std::string out;
    std::string solver;
    std::optional<std::uint64_t> seed;
    std::uint64_t instance = 0;
    std::string algorithm = "both";
    std::string format = "csv";
    unsigned threads = 0;
    bool quick = false;
};

int cmd_generate(const Options& o) {
    const std::string config = load_config(o.config, o.seed);
    Handle<drne_game, drne_game_free> game;
    check(drne_game_generate(config.c_str(), o.instance, &game.ptr), "generate");
    char* text = nullptr;
    check(drne_game_to_json(game.ptr, &text), "generate");
    const fs::path dir = output_dir(o.out);
    write_file(dir / "gamespec.json", take(text));
    std::cout << "wrote " << (dir / "gamespec.json").string() << "\n";
    return kOk;
}

int cmd_solve(const Options& o) {
    Handle<drne_game, drne_game_free> game;
    std::string solver_json = "{}";
    if (!o.game.empty()) {
        const std::string text = read_file(o.game);
        check(drne_game_from_json(text.c_str(), &game.ptr), o.game);
    } else if (!o.config.empty()) {
        const std::string config = load_config(o.config, o.seed);
        check(drne_game_generate(config.c_str(), o.instance, &game.ptr), o.config);
        const json doc = json::parse(config);
        if (doc.contains("solver")) solver_json = doc.at("solver").dump();
    } else {
        throw CliError{kInvalid, "solve needs --game or --config"};
    }
    if (!o.solver.empty()) solver_json = read_file(o.solver);

    char* warnings = nullptr;
    check(drne_game_warnings(game.ptr, &warnings), "solve");
    std::cerr << take(warnings);

    Handle<drne_problem, drne_problem_free> problem;
    check(drne_problem_create(game.ptr, 0.0, &problem.ptr), "solve");

    std::vector<std::pair<std::string, drne_algorithm>> runs;
    if (o.algorithm == "agraal" || o.algorithm == "both") runs.emplace_back("agraal", DRNE_AGRAAL);
    if (o.algorithm == "hybrid" || o.algorithm == "both") runs.emplace_back("hybrid", DRNE_HYBRID);

    const fs::path dir = output_dir(o.out);
    json reports = json::array();
    int code = kOk;
    for (const auto& [name, alg] : runs) {
        Handle<drne_report, drne_report_free> rep;
        check(drne_solve(problem.ptr, alg, solver_json.c_str(), nullptr, 0, &rep.ptr), "solve");
        char* text = nullptr;
        check(drne_report_to_json(rep.ptr, &text), "solve");
        reports.push_back(json::parse(take(text)));
        if (o.format == "json") {
            write_file(dir / ("residual_trace_" + name + ".json"), trace_json(rep.ptr).dump(2) + "\n");
        } else {
            char* csv = nullptr;
            check(drne_report_trace_csv(rep.ptr, &csv), "solve");
            write_file(dir / ("residual_trace_" + name + ".csv"), take(csv));
        }
        const int status = drne_report_status(rep.ptr);
        std::cout << name << ": " << (status == 0 ? "converged" : status == 1 ? "iteration limit" : "non-finite")
                  << " after " << drne_report_iterations(rep.ptr) << " iterations, residual "
                  << drne_report_residual(rep.ptr) << "\n";
        if (status != 0) {
            code = kNotConverged;
            if (status == 2) std::cerr << name << ": " << reports.back().value("diagnostic", "") << "\n";
        }
    }
    write_file(dir / "run_report.json", json{{"runs", std::move(reports)}}.dump(2) + "\n");
    return code;
}

int cmd_sweep(const Options& o) {
    const std::string config = load_config(o.config, o.seed);
    Handle<drne_sweep, drne_sweep_free> sweep;
    check(drne_sweep_run(config.c_str(), o.threads, &sweep.ptr), "sweep");

    const fs::path dir = output_dir(o.out);
    const fs::path traces = dir / "traces";
    std::error_code ec;
    fs::create_directories(traces, ec);
    if (ec) throw CliError{kInvalid, "cannot create " + traces.string()};

    char* text = nullptr;
    check(drne_sweep_to_json(sweep.ptr, &text), "sweep");
    const std::string report = take(text);
    write_file(dir / "sweep_report.json", report);

    if (o.format == "json") {
        json table = json::array();
        for (const auto& cell : json::parse(report).at("cells"))
            for (const auto& q : cell.at("cost_quantiles")) {
                json row = q;
                row["cell"] = cell.at("label");
                table.push_back(std::move(row));
            }
        write_file(dir / "cost_quantiles.json", table.dump(2) + "\n");
    } else {
        check(drne_sweep_quantiles_csv(sweep.ptr, &text), "sweep");
        write_file(dir / "cost_quantiles.csv", take(text));
    }

    for (size_t c = 0; c < drne_sweep_num_cells(sweep.ptr); ++c)
        for (size_t k = 0; k < drne_sweep_num_instances(sweep.ptr, c); ++k)
            for (drne_algorithm alg : {DRNE_AGRAAL, DRNE_HYBRID}) {
                char* name = nullptr;
                check(drne_sweep_trace_name(sweep.ptr, c, k, alg, &name), "sweep");
                check(drne_sweep_trace_csv(sweep.ptr, c, k, alg, &text), "sweep");
                write_file(traces / (take(name) + ".csv"), take(text));
            }

    const size_t failures = drne_sweep_failures(sweep.ptr);
    std::cout << "sweep: " << drne_sweep_num_cells(sweep.ptr) << " cells written to " << dir.string();
    if (failures) std::cout << " (" << failures << " runs did not converge; see sweep_report.json)";
    std::cout << "\n";
    return kOk;
}

int cmd_verify(const Options& o) {
    json opts = json::object();
    if (o.seed) opts["seed"] = *o.seed;
    if (o.quick) {
        opts["gradient_instances"] = 20;
        opts["inner_sup_triples"] = 100;
        opts["linear_cases"] = 20;
        opts["convergence_instances"] = 2;
    }
    char* text = nullptr;
    int passed = 0;
    check(drne_verify(opts.dump().c_str(), &text, &passed), "verify");
    const std::string report = take(text);
    const fs::path dir = output_dir(o.out);
    write_file(dir / "verify_report.json", report);
    for (const auto& g : json::parse(report).at("gates"))
        std::cout << (g.at("passed").get<bool>() ? "PASS " : "FAIL ") << g.at("name").get<std::string>() << "  "
                  << g.at("value").get<double>() << " <= " << g.at("threshold").get<double>() << "  ("
                  << g.at("detail").get<std::string>() << ")\n";
    return passed ? kOk : kGateFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributionally robust Nash equilibrium seeking"};
    app.require_subcommand(1);
    Options o;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out,-o", o.out, "Output directory (default: $DRNE_OUTPUT_DIR or .)");
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_option("--format", o.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
    };

    auto* gen = app.add_subcommand("generate", "Generate a game instance from a scenario config");
    gen->add_option("--config,-c", o.config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    gen->add_option("--instance", o.instance, "Instance index (selects the sample draw)");
    add_common(gen);

    auto* solve = app.add_subcommand("solve", "Solve one game with aGRAAL and/or the hybrid method");
    auto* game_opt = solve->add_option("--game,-g", o.game, "Game spec (JSON)")->check(CLI::ExistingFile);
    auto* cfg_opt = solve->add_option("--config,-c", o.config, "Scenario config (JSON)")->check(CLI::ExistingFile);
    game_opt->excludes(cfg_opt);
    solve->add_option("--solver", o.solver, "Solver parameters (JSON)")->check(CLI::ExistingFile);
    solve->add_option("--instance", o.instance, "Instance index when generating from --config");
    solve->add_option("--algorithm,-a", o.algorithm, "agraal, hybrid or both")
        ->check(CLI::IsMember({"agraal", "hybrid", "both"}));
    add_common(solve);

    auto* sweep = app.add_subcommand("sweep", "Solve every instance of every epsilon/sample-range cell");
    sweep->add_option("--config,-c", o.config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    add_common(sweep);

    auto* verify = app.add_subcommand("verify", "Run the seeded oracle battery");
    verify->add_flag("--quick", o.quick, "Smaller battery");
    add_common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    for (auto* sub : {gen, solve, sweep, verify})
        if (sub->parsed() && sub->count("--seed")) o.seed = seed;

    try {
        if (gen->parsed()) return cmd_generate(o);
        if (solve->parsed()) return cmd_solve(o);
        if (sweep->parsed()) return cmd_sweep(o);
        return cmd_verify(o);
    } catch (const CliError& e) {
        std::cerr << "drne: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "drne: " << e.what() << "\n";
        return kInvalid;
    }
}

#include "drne/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace drne {

namespace {

Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

const Json& field(const Json& doc, const char* key, const std::string& where) {
    if (!doc.is_object() || !doc.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    return doc.at(key);
}

double number(const Json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError(where + ": expected a number");
    return v.get<double>();
}

int integer(const Json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
    return v.get<int>();
}

Vector vector_from(const Json& v, const std::string& where) {
    if (!v.is_array()) throw ParseError(where + ": expected an array");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = number(v[i], where);
    return out;
}

Matrix matrix_from(const Json& v, const std::string& where) {
    if (!v.is_array()) throw ParseError(where + ": expected an array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    const auto cols = rows ? static_cast<Eigen::Index>(v[0].is_array() ? v[0].size() : 0) : 0;
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json& row = v[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError(where + ": ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = number(row[static_cast<std::size_t>(c)], where);
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

Json to_json(const GameSpec& game) {
    Json agents = Json::array();
    for (const auto& a : game.agents) {
        Json h = Json::array();
        for (const auto& block : a.H) h.push_back(matrix_json(block));
        Json set = {{"kind", to_string(a.local_set.kind)}};
        if (a.local_set.kind == LocalSet::Kind::box) {
            set["lo"] = vector_json(a.local_set.lo);
            set["hi"] = vector_json(a.local_set.hi);
        }
        agents.push_back({{"index", a.index},
                          {"H", std::move(h)},
                          {"c", vector_json(a.c)},
                          {"A", matrix_json(a.A)},
                          {"b", vector_json(a.b)},
                          {"Q", matrix_json(a.Q)},
                          {"radius", a.radius},
                          {"samples", matrix_json(a.samples)},
                          {"local_set", std::move(set)}});
    }
    return {{"N", game.N}, {"n", game.n}, {"m", game.m}, {"agents", std::move(agents)}};
}

GameSpec game_from_json(const Json& doc) {
    const std::string top = "gamespec";
    GameSpec g;
    g.N = integer(field(doc, "N", top), top + ".N");
    g.n = integer(field(doc, "n", top), top + ".n");
    g.m = integer(field(doc, "m", top), top + ".m");
    const Json& agents = field(doc, "agents", top);
    if (!agents.is_array()) throw ParseError(top + ".agents: expected an array");
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const Json& a = agents[i];
        const std::string where = top + ".agents[" + std::to_string(i) + "]";
        AgentSpec spec;
        spec.index = a.contains("index") ? integer(a.at("index"), where + ".index") : static_cast<int>(i) + 1;
        const Json& h = field(a, "H", where);
        if (!h.is_array()) throw ParseError(where + ".H: expected a list of matrices");
        for (const auto& block : h) spec.H.push_back(matrix_from(block, where + ".H"));
        spec.c = vector_from(field(a, "c", where), where + ".c");
        spec.A = matrix_from(field(a, "A", where), where + ".A");
        spec.b = vector_from(field(a, "b", where), where + ".b");
        spec.Q = matrix_from(field(a, "Q", where), where + ".Q");
        spec.radius = number(field(a, "radius", where), where + ".radius");
        spec.samples = matrix_from(field(a, "samples", where), where + ".samples");
        const Json& set = field(a, "local_set", where);
        const std::string kind = field(set, "kind", where + ".local_set").get<std::string>();
        if (kind == "box")
            spec.local_set = LocalSet::box(vector_from(field(set, "lo", where), where + ".local_set.lo"),
                                           vector_from(field(set, "hi", where), where + ".local_set.hi"));
        else if (kind == "simplex")
            spec.local_set = LocalSet::simplex();
        else if (kind == "orthant")
            spec.local_set = LocalSet::orthant();
        else
            throw ParseError(where + ".local_set.kind: unknown kind '" + kind + "'");
        g.agents.push_back(std::move(spec));
    }
    return g;
}

Json to_json(const SolverParams& p) {
    return {{"alpha", p.alpha},       {"tau0", p.tau0},           {"tau_bar", p.tau_bar},
            {"phi_bar", p.phi_bar},   {"tol", p.tol},             {"max_iters", p.max_iters},
            {"record_every", p.record_every}, {"record_all_until", p.record_all_until}};
}

SolverParams solver_params_from_json(const Json& doc, SolverParams p) {
    if (doc.is_null()) return p;
    if (!doc.is_object()) throw ParseError("solver: expected an object");
    auto num = [&](const char* key, double& dst) {
        if (doc.contains(key)) dst = number(doc.at(key), std::string("solver.") + key);
    };
    auto count = [&](const char* key, std::size_t& dst) {
        if (!doc.contains(key)) return;
        const double v = number(doc.at(key), std::string("solver.") + key);
        if (v < 0 || v != std::floor(v)) throw ParseError(std::string("solver.") + key + ": expected a count");
        dst = static_cast<std::size_t>(v);
    };
    num("alpha", p.alpha);
    num("tau0", p.tau0);
    num("tau_bar", p.tau_bar);
    num("phi_bar", p.phi_bar);
    num("tol", p.tol);
    count("max_iters", p.max_iters);
    count("record_every", p.record_every);
    count("record_all_until", p.record_all_until);
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return p;
}

Json to_json(const ScenarioConfig& c) {
    Json ranges = Json::array();
    for (const auto& r : c.sample_range_grid) ranges.push_back({r.first, r.second});
    return {{"family", to_string(c.family)},
            {"N", c.N},
            {"n", c.n},
            {"m", c.m},
            {"seed", c.seed},
            {"epsilon", c.epsilon},
            {"epsilon_grid", c.epsilon_grid},
            {"sample_range", {c.sample_range.first, c.sample_range.second}},
            {"sample_range_grid", std::move(ranges)},
            {"instances", c.instances},
            {"zeta", c.zeta},
            {"cost_scale", c.cost_scale},
            {"coupling", c.coupling},
            {"solver", to_json(c.solver)},
            {"distribution",
             {{"kind", c.distribution.kind},
              {"dof", c.distribution.dof},
              {"scale", c.distribution.scale},
              {"shift", c.distribution.shift}}}};
}

ScenarioConfig scenario_from_json(const Json& doc) {
    if (!doc.is_object()) throw ParseError("config: expected an object");
    ScenarioConfig c;
    const std::string family = field(doc, "family", "config").get<std::string>();
    if (family == "illustrative")
        c.family = Family::illustrative;
    else if (family == "portfolio") {
        c.family = Family::portfolio;
        c.n = c.m = 3;
    } else
        throw ParseError("config.family: unknown family '" + family + "'");

    auto read_range = [](const Json& v, const std::string& where) {
        if (!v.is_array() || v.size() != 2) throw ParseError(where + ": expected [lo, hi]");
        return SampleRange{integer(v[0], where), integer(v[1], where)};
    };
    if (doc.contains("N")) c.N = integer(doc.at("N"), "config.N");
    if (doc.contains("n")) c.n = integer(doc.at("n"), "config.n");
    if (doc.contains("m")) c.m = integer(doc.at("m"), "config.m");
    if (doc.contains("seed")) {
        const Json& s = doc.at("seed");
        if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0))
            throw ParseError("config.seed: expected a nonnegative integer");
        c.seed = s.get<std::uint64_t>();
    }
    if (doc.contains("epsilon")) c.epsilon = number(doc.at("epsilon"), "config.epsilon");
    if (doc.contains("epsilon_grid")) {
        const Json& g = doc.at("epsilon_grid");
        if (!g.is_array()) throw ParseError("config.epsilon_grid: expected an array");
        for (const auto& e : g) c.epsilon_grid.push_back(number(e, "config.epsilon_grid"));
    }
    if (doc.contains("sample_range")) c.sample_range = read_range(doc.at("sample_range"), "config.sample_range");
    if (doc.contains("sample_range_grid")) {
        const Json& g = doc.at("sample_range_grid");
        if (!g.is_array()) throw ParseError("config.sample_range_grid: expected an array");
        for (const auto& r : g) c.sample_range_grid.push_back(read_range(r, "config.sample_range_grid"));
    }
    if (doc.contains("instances")) {
        const int k = integer(doc.at("instances"), "config.instances");
        if (k < 1) throw ParseError("config.instances: must be at least 1");
        c.instances = static_cast<std::size_t>(k);
    }
    if (doc.contains("zeta")) c.zeta = number(doc.at("zeta"), "config.zeta");
    if (doc.contains("cost_scale")) c.cost_scale = number(doc.at("cost_scale"), "config.cost_scale");
    if (doc.contains("coupling")) c.coupling = number(doc.at("coupling"), "config.coupling");
    if (doc.contains("solver")) c.solver = solver_params_from_json(doc.at("solver"), c.solver);
    if (doc.contains("distribution")) {
        const Json& d = doc.at("distribution");
        if (!d.is_object()) throw ParseError("config.distribution: expected an object");
        if (d.contains("kind")) c.distribution.kind = d.at("kind").get<std::string>();
        if (d.contains("dof")) c.distribution.dof = integer(d.at("dof"), "config.distribution.dof");
        if (d.contains("scale")) c.distribution.scale = number(d.at("scale"), "config.distribution.scale");
        if (d.contains("shift")) c.distribution.shift = number(d.at("shift"), "config.distribution.shift");
    }
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return c;
}

Json to_json(const RunReport& r, const std::string& algorithm) {
    Json trace_summary = {{"rows", r.trace.size()}};
    if (!r.trace.empty()) {
        trace_summary["first_residual"] = r.trace.front().residual;
        trace_summary["last_residual"] = r.trace.back().residual;
    }
    Json out = {{"algorithm", algorithm},
                {"status", to_string(r.status)},
                {"converged", r.converged},
                {"iterations", r.iterations},
                {"final_residual", r.final_residual},
                {"reverted_steps", r.reverted_steps},
                {"z0", vector_json(r.z0)},
                {"z", vector_json(r.z)},
                {"costs", r.costs},
                {"trace", std::move(trace_summary)}};
    if (!r.diagnostic.empty()) out["diagnostic"] = r.diagnostic;
    return out;
}

Json to_json(const SweepReport& rep) {
    Json cells = Json::array();
    for (const auto& cell : rep.cells) {
        Json instances = Json::array();
        for (const auto& inst : cell.instances)
            instances.push_back({{"instance", inst.instance},
                                 {"agraal", to_json(inst.agraal, "agraal")},
                                 {"hybrid", to_json(inst.hybrid, "hybrid")}});
        Json q = Json::array();
        for (std::size_t a = 0; a < cell.cost_quantiles.size(); ++a) {
            const auto& s = cell.cost_quantiles[a];
            q.push_back({{"agent", a + 1},
                         {"min", s.min},
                         {"q25", s.q25},
                         {"median", s.median},
                         {"q75", s.q75},
                         {"max", s.max}});
        }
        cells.push_back({{"label", cell.label},
                         {"epsilon", cell.epsilon},
                         {"sample_range", {cell.sample_range.first, cell.sample_range.second}},
                         {"instances", std::move(instances)},
                         {"cost_quantiles", std::move(q)}});
    }
    return {{"config", to_json(rep.config)}, {"cells", std::move(cells)}};
}

std::string trace_csv(const RunReport& report) {
    std::ostringstream os;
    os << "iter,residual,tau,phi\n";
    for (const auto& row : report.trace)
        os << row.iter << ',' << fmt(row.residual) << ',' << fmt(row.tau) << ',' << fmt(row.phi) << '\n';
    return os.str();
}

std::string cost_quantiles_csv(const SweepReport& report) {
    std::ostringstream os;
    os << "agent,cell,min,q25,median,q75,max\n";
    for (const auto& cell : report.cells)
        for (std::size_t a = 0; a < cell.cost_quantiles.size(); ++a) {
            const auto& s = cell.cost_quantiles[a];
            os << a + 1 << ',' << cell.label << ',' << fmt(s.min) << ',' << fmt(s.q25) << ',' << fmt(s.median)
               << ',' << fmt(s.q75) << ',' << fmt(s.max) << '\n';
        }
    return os.str();
}

} // namespace drne

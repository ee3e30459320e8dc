#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "netroa/grid.hpp"
#include "netroa/hjsolver.hpp"
#include "netroa/netmodel.hpp"
#include "netroa/oracle.hpp"

namespace netroa {

/// Anything wrong with user-supplied configuration (exit code 1 at the CLI).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DynamicsConfig {
    std::string preset = "linear"; ///< "linear" | "nonlinear-quadratic" | "custom"
    double beta = 1.0;             ///< linear preset only
    double gamma = 1.0;            ///< linear preset only
    std::vector<double> f_coeffs;  ///< custom preset only, ascending
    std::vector<double> g_coeffs;  ///< custom preset only, ascending
};

struct TopologyConfig {
    std::string generator = "complete"; ///< "complete" | "ring" | "star" | "edges"
    int n = 4;
    int k = 1;                                         ///< ring only
    std::vector<std::tuple<int, int, double>> edges;   ///< edges only; 1-based (from, to, weight)
};

struct GridConfig {
    double xmin = -0.5, xmax = 2.5, ymin = -0.5, ymax = 2.5;
    int nx = 201, ny = 201;
};

struct SolverSection {
    double t_final = 6.0;
    double cfl = 0.5;
    std::vector<double> snapshot_times = {1.0, 2.0, 4.0, 6.0};
    std::string dissipation = "global-lax-friedrichs";
};

struct InitConfig {
    double cx = 1.0, cy = 1.0, radius = 0.1;
};

struct CompareConfig {
    int boundary_dilation = 2;
};

struct ConvergenceConfig {
    std::array<double, 2> ic = {1.8, 1.2};
};

/**
 * @brief Fully resolved run configuration; every field has a default, and
 * the defaults reproduce the linear half of the default experiment pack.
 */
struct RunConfig {
    DynamicsConfig dynamics;
    TopologyConfig topology;
    std::vector<double> w_values = {2.0, 4.0, 6.0, 8.0};
    GridConfig grid;
    SolverSection solver;
    InitConfig init;
    OracleParams oracle;
    CompareConfig compare;
    ConvergenceConfig convergence;
    std::string output_dir = "out";
};

namespace config_detail {

using nlohmann::json;

inline void expect_keys(const json& obj, const char* where,
                        std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw config_error("unknown key '" + item.key() + "' in " + where);
    }
}

inline double get_num(const json& obj, const char* where, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw config_error(std::string(where) + "." + key + " must be a number");
    return v.get<double>();
}

inline int get_int(const json& obj, const char* where, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        throw config_error(std::string(where) + "." + key + " must be an integer");
    return v.get<int>();
}

inline std::string get_str(const json& obj, const char* where, const char* key,
                           const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string())
        throw config_error(std::string(where) + "." + key + " must be a string");
    return v.get<std::string>();
}

inline std::vector<double> get_num_list(const json& obj, const char* where, const char* key,
                                        std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array())
        throw config_error(std::string(where) + "." + key + " must be an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number())
            throw config_error(std::string(where) + "." + key + " must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

} // namespace config_detail

/// Parse and structurally validate a configuration object. Unknown keys are
/// rejected at every level; missing keys fall back to their defaults.
inline RunConfig parse_config_json(const nlohmann::json& j) {
    using namespace config_detail;
    if (!j.is_object()) throw config_error("configuration root must be an object");
    expect_keys(j, "root",
                {"schema", "dynamics", "topology", "w_values", "grid", "solver", "init",
                 "oracle", "compare", "convergence", "output_dir"});
    if (!j.contains("schema") || !j.at("schema").is_string() ||
        j.at("schema").get<std::string>() != "netroa/1")
        throw config_error("config must declare \"schema\": \"netroa/1\"");

    RunConfig cfg;

    if (j.contains("dynamics")) {
        const auto& d = j.at("dynamics");
        if (!d.is_object()) throw config_error("dynamics must be an object");
        expect_keys(d, "dynamics", {"preset", "beta", "gamma", "f_coeffs", "g_coeffs"});
        cfg.dynamics.preset = get_str(d, "dynamics", "preset", "linear");
        if (cfg.dynamics.preset == "nonlinear") cfg.dynamics.preset = "nonlinear-quadratic";
        if (cfg.dynamics.preset == "linear") {
            cfg.dynamics.beta = get_num(d, "dynamics", "beta", 1.0);
            cfg.dynamics.gamma = get_num(d, "dynamics", "gamma", 1.0);
            if (d.contains("f_coeffs") || d.contains("g_coeffs"))
                throw config_error("dynamics: coefficient lists only apply to preset \"custom\"");
        } else if (cfg.dynamics.preset == "nonlinear-quadratic") {
            if (d.size() > 1)
                throw config_error("dynamics: preset \"nonlinear-quadratic\" takes no parameters");
        } else if (cfg.dynamics.preset == "custom") {
            cfg.dynamics.f_coeffs = get_num_list(d, "dynamics", "f_coeffs", {});
            cfg.dynamics.g_coeffs = get_num_list(d, "dynamics", "g_coeffs", {});
            if (cfg.dynamics.f_coeffs.empty() || cfg.dynamics.g_coeffs.empty())
                throw config_error("dynamics: preset \"custom\" needs f_coeffs and g_coeffs");
        } else {
            throw config_error("dynamics.preset must be \"linear\", \"nonlinear-quadratic\" or "
                               "\"custom\"");
        }
    }

    if (j.contains("topology")) {
        const auto& t = j.at("topology");
        if (!t.is_object()) throw config_error("topology must be an object");
        expect_keys(t, "topology", {"generator", "n", "k", "edges"});
        cfg.topology.generator = get_str(t, "topology", "generator", "complete");
        cfg.topology.n = get_int(t, "topology", "n", 4);
        cfg.topology.k = get_int(t, "topology", "k", 1);
        if (cfg.topology.generator == "edges") {
            if (!t.contains("edges") || !t.at("edges").is_array())
                throw config_error("topology: generator \"edges\" needs an edges array");
            for (const auto& e : t.at("edges")) {
                if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
                    !e[1].is_number_integer() || !e[2].is_number())
                    throw config_error("topology.edges entries must be [from, to, weight]");
                cfg.topology.edges.emplace_back(e[0].get<int>(), e[1].get<int>(),
                                                e[2].get<double>());
            }
        } else if (cfg.topology.generator != "complete" && cfg.topology.generator != "ring" &&
                   cfg.topology.generator != "star") {
            throw config_error("topology.generator must be \"complete\", \"ring\", \"star\" or "
                               "\"edges\"");
        } else if (t.contains("edges")) {
            throw config_error("topology: edges list only applies to generator \"edges\"");
        }
    }

    cfg.w_values = get_num_list(j, "root", "w_values", cfg.w_values);
    if (cfg.w_values.empty()) throw config_error("w_values must not be empty");
    for (double w : cfg.w_values)
        if (!std::isfinite(w) || w < 0.0)
            throw config_error("w_values entries must be finite and >= 0");

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (!g.is_object()) throw config_error("grid must be an object");
        expect_keys(g, "grid", {"xmin", "xmax", "ymin", "ymax", "nx", "ny"});
        cfg.grid.xmin = get_num(g, "grid", "xmin", cfg.grid.xmin);
        cfg.grid.xmax = get_num(g, "grid", "xmax", cfg.grid.xmax);
        cfg.grid.ymin = get_num(g, "grid", "ymin", cfg.grid.ymin);
        cfg.grid.ymax = get_num(g, "grid", "ymax", cfg.grid.ymax);
        cfg.grid.nx = get_int(g, "grid", "nx", cfg.grid.nx);
        cfg.grid.ny = get_int(g, "grid", "ny", cfg.grid.ny);
    }

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        if (!s.is_object()) throw config_error("solver must be an object");
        expect_keys(s, "solver", {"t_final", "cfl", "snapshot_times", "dissipation"});
        cfg.solver.t_final = get_num(s, "solver", "t_final", cfg.solver.t_final);
        cfg.solver.cfl = get_num(s, "solver", "cfl", cfg.solver.cfl);
        cfg.solver.snapshot_times =
            get_num_list(s, "solver", "snapshot_times", cfg.solver.snapshot_times);
        cfg.solver.dissipation = get_str(s, "solver", "dissipation", cfg.solver.dissipation);
        if (cfg.solver.dissipation != "global-lax-friedrichs")
            throw config_error("solver.dissipation: only \"global-lax-friedrichs\" is available");
    }

    if (j.contains("init")) {
        const auto& i = j.at("init");
        if (!i.is_object()) throw config_error("init must be an object");
        expect_keys(i, "init", {"cx", "cy", "radius"});
        cfg.init.cx = get_num(i, "init", "cx", cfg.init.cx);
        cfg.init.cy = get_num(i, "init", "cy", cfg.init.cy);
        cfg.init.radius = get_num(i, "init", "radius", cfg.init.radius);
    }

    if (j.contains("oracle")) {
        const auto& o = j.at("oracle");
        if (!o.is_object()) throw config_error("oracle must be an object");
        expect_keys(o, "oracle", {"dt", "t_max", "eps", "escape_radius"});
        cfg.oracle.dt = get_num(o, "oracle", "dt", cfg.oracle.dt);
        cfg.oracle.t_max = get_num(o, "oracle", "t_max", cfg.oracle.t_max);
        cfg.oracle.eps = get_num(o, "oracle", "eps", cfg.oracle.eps);
        cfg.oracle.escape_radius = get_num(o, "oracle", "escape_radius", cfg.oracle.escape_radius);
    }

    if (j.contains("compare")) {
        const auto& c = j.at("compare");
        if (!c.is_object()) throw config_error("compare must be an object");
        expect_keys(c, "compare", {"boundary_dilation"});
        cfg.compare.boundary_dilation =
            get_int(c, "compare", "boundary_dilation", cfg.compare.boundary_dilation);
        if (cfg.compare.boundary_dilation < 0)
            throw config_error("compare.boundary_dilation must be >= 0");
    }

    if (j.contains("convergence")) {
        const auto& c = j.at("convergence");
        if (!c.is_object()) throw config_error("convergence must be an object");
        expect_keys(c, "convergence", {"ic"});
        const std::vector<double> ic =
            config_detail::get_num_list(c, "convergence", "ic",
                                        {cfg.convergence.ic[0], cfg.convergence.ic[1]});
        if (ic.size() != 2) throw config_error("convergence.ic must have exactly 2 entries");
        cfg.convergence.ic = {ic[0], ic[1]};
    }

    cfg.output_dir = get_str(j, "root", "output_dir", cfg.output_dir);
    if (cfg.output_dir.empty()) throw config_error("output_dir must not be empty");
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw config_error("config file " + path + " is not valid JSON: " + e.what());
    }
    return parse_config_json(j);
}

inline RunConfig default_config() { return RunConfig{}; }

/// Materialization helpers: constructor failures become config errors.

inline DynamicsSpec make_dynamics(const DynamicsConfig& d) {
    try {
        if (d.preset == "linear") return DynamicsSpec::linear(d.beta, d.gamma);
        if (d.preset == "nonlinear-quadratic") return DynamicsSpec::nonlinear_quadratic();
        return DynamicsSpec(Polynomial(d.f_coeffs), Polynomial(d.g_coeffs));
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("dynamics: ") + e.what());
    }
}

inline Topology make_topology(const TopologyConfig& t) {
    try {
        if (t.generator == "complete") return Topology::complete(t.n);
        if (t.generator == "ring") return Topology::ring(t.n, t.k);
        if (t.generator == "star") return Topology::star(t.n);
        std::vector<std::vector<double>> a(static_cast<std::size_t>(t.n),
                                           std::vector<double>(static_cast<std::size_t>(t.n), 0.0));
        for (const auto& [from, to, weight] : t.edges) {
            if (from < 1 || from > t.n || to < 1 || to > t.n)
                throw std::invalid_argument("edge endpoint out of range (nodes are 1-based)");
            a[static_cast<std::size_t>(from - 1)][static_cast<std::size_t>(to - 1)] = weight;
        }
        return Topology(t.n, std::move(a));
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("topology: ") + e.what());
    }
}

inline Grid2D make_grid(const GridConfig& g) {
    try {
        return Grid2D(g.xmin, g.xmax, g.ymin, g.ymax, g.nx, g.ny);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("grid: ") + e.what());
    }
}

inline SolveConfig make_solve_config(const SolverSection& s) {
    SolveConfig cfg;
    cfg.t_final = s.t_final;
    cfg.snapshot_times = s.snapshot_times;
    cfg.cfl = s.cfl;
    try {
        solver_detail::validate(cfg);
        if (!(cfg.cfl > 0.0) || !(cfg.cfl <= 1.0))
            throw std::invalid_argument("cfl must lie in (0, 1]");
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("solver: ") + e.what());
    }
    return cfg;
}

inline void validate_oracle_params(const OracleParams& p) {
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("oracle: ") + e.what());
    }
}

} // namespace netroa

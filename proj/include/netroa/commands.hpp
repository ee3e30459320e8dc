#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "netroa/config.hpp"
#include "netroa/grid.hpp"
#include "netroa/hjsolver.hpp"
#include "netroa/netmodel.hpp"
#include "netroa/oracle.hpp"
#include "netroa/roa.hpp"

namespace netroa {

/// A --check run found the estimate claiming points outside the basin
/// beyond the allowed fraction (exit code 3 at the CLI).
struct check_error : std::runtime_error {
    explicit check_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct RunOptions {
    bool check = false;
    bool serial = true; ///< accepted for interface stability; execution is always serial
    std::string out_override;
};

namespace cmd_detail {

inline std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
}

inline std::string out_dir(const RunConfig& cfg, const RunOptions& opts) {
    return opts.out_override.empty() ? cfg.output_dir : opts.out_override;
}

inline std::string w_dir(const std::string& root, double w) {
    return root + "/w_" + short_num(w);
}

inline void log_line(std::ostream* log, const std::string& s) {
    if (log) (*log) << s << '\n' << std::flush;
}

/// Minimal ordered JSON emitter; numbers go through %.17g so identical runs
/// produce identical bytes.
class JsonBuilder {
public:
    void open(const char* key = nullptr) { start(key, '{'); }
    void close() { finish('}'); }
    void open_list(const char* key = nullptr) { start(key, '['); }
    void close_list() { finish(']'); }

    void field(const char* key, double v) { raw(key, format_g17(v)); }
    void field(const char* key, int v) { raw(key, std::to_string(v)); }
    void field(const char* key, std::size_t v) { raw(key, std::to_string(v)); }
    void field(const char* key, const std::string& v) { raw(key, quote(v)); }
    void field_list(const char* key, const std::vector<double>& v) {
        std::string s = "[";
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (k) s += ", ";
            s += format_g17(v[k]);
        }
        s += "]";
        raw(key, s);
    }

    std::string str() const { return body_ + "\n"; }

private:
    std::string body_;
    int depth_ = 0;
    bool comma_ = false;

    static std::string quote(const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        out += '"';
        return out;
    }

    void pad() {
        if (comma_) body_ += ",";
        if (!body_.empty()) body_ += "\n";
        body_.append(static_cast<std::size_t>(2 * depth_), ' ');
    }

    void start(const char* key, char bracket) {
        pad();
        if (key) body_ += quote(key) + ": ";
        body_ += bracket;
        ++depth_;
        comma_ = false;
    }

    void finish(char bracket) {
        --depth_;
        comma_ = false;
        body_ += "\n";
        body_.append(static_cast<std::size_t>(2 * depth_), ' ');
        body_ += bracket;
        comma_ = true;
    }

    void raw(const char* key, const std::string& value) {
        pad();
        body_ += quote(key) + ": " + value;
        comma_ = true;
    }
};

inline void write_text_file(const std::string& path, const std::string& content) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("cannot open " + path);
    std::fwrite(content.data(), 1, content.size(), fp);
    std::fclose(fp);
}

struct SnapshotSummary {
    double horizon = 0.0;
    double area = 0.0;
    std::size_t points = 0;
    std::size_t contours = 0;
    bool compared = false;
    double conservative_fraction = 1.0;
    double jaccard = 1.0;
    std::size_t considered = 0;
    std::size_t violations = 0;
};

struct WRunSummary {
    double w = 0.0;
    bool has_basin = false;
    double basin_area = 0.0;
    std::size_t basin_points = 0;
    std::vector<SnapshotSummary> snaps;
    std::string error; ///< non-empty when this w aborted; other w values still ran
};

inline void echo_config(JsonBuilder& jb, const RunConfig& cfg) {
    jb.open("config");
    jb.open("dynamics");
    jb.field("preset", cfg.dynamics.preset);
    if (cfg.dynamics.preset == "linear") {
        jb.field("beta", cfg.dynamics.beta);
        jb.field("gamma", cfg.dynamics.gamma);
    } else if (cfg.dynamics.preset == "custom") {
        jb.field_list("f_coeffs", cfg.dynamics.f_coeffs);
        jb.field_list("g_coeffs", cfg.dynamics.g_coeffs);
    }
    jb.close();
    jb.open("topology");
    jb.field("generator", cfg.topology.generator);
    jb.field("n", cfg.topology.n);
    if (cfg.topology.generator == "ring") jb.field("k", cfg.topology.k);
    jb.close();
    jb.field_list("w_values", cfg.w_values);
    jb.open("grid");
    jb.field("xmin", cfg.grid.xmin);
    jb.field("xmax", cfg.grid.xmax);
    jb.field("ymin", cfg.grid.ymin);
    jb.field("ymax", cfg.grid.ymax);
    jb.field("nx", cfg.grid.nx);
    jb.field("ny", cfg.grid.ny);
    jb.close();
    jb.open("solver");
    jb.field("t_final", cfg.solver.t_final);
    jb.field("cfl", cfg.solver.cfl);
    jb.field_list("snapshot_times", cfg.solver.snapshot_times);
    jb.field("dissipation", cfg.solver.dissipation);
    jb.close();
    jb.open("init");
    jb.field("cx", cfg.init.cx);
    jb.field("cy", cfg.init.cy);
    jb.field("radius", cfg.init.radius);
    jb.close();
    jb.open("oracle");
    jb.field("dt", cfg.oracle.dt);
    jb.field("t_max", cfg.oracle.t_max);
    jb.field("eps", cfg.oracle.eps);
    jb.field("escape_radius", cfg.oracle.escape_radius);
    jb.close();
    jb.open("compare");
    jb.field("boundary_dilation", cfg.compare.boundary_dilation);
    jb.close();
    jb.open("convergence");
    jb.field_list("ic", {cfg.convergence.ic[0], cfg.convergence.ic[1]});
    jb.close();
    jb.close();
}

inline void write_summaries(const RunConfig& cfg, const std::string& root,
                            const std::string& command, const std::vector<WRunSummary>& runs) {
    JsonBuilder jb;
    jb.open();
    jb.field("schema", std::string("netroa-summary/1"));
    jb.field("command", command);
    echo_config(jb, cfg);
    jb.open_list("runs");
    for (const WRunSummary& r : runs) {
        jb.open();
        jb.field("w", r.w);
        if (!r.error.empty()) jb.field("error", r.error);
        if (r.has_basin) {
            jb.open("basin");
            jb.field("area", r.basin_area);
            jb.field("points", r.basin_points);
            jb.close();
        }
        if (!r.snaps.empty()) {
            jb.open_list("snapshots");
            for (const SnapshotSummary& s : r.snaps) {
                jb.open();
                jb.field("horizon", s.horizon);
                jb.field("area", s.area);
                jb.field("points", s.points);
                jb.field("contours", s.contours);
                if (s.compared) {
                    jb.field("conservative_fraction", s.conservative_fraction);
                    jb.field("jaccard", s.jaccard);
                    jb.field("considered", s.considered);
                    jb.field("violations", s.violations);
                }
                jb.close();
            }
            jb.close_list();
        }
        jb.close();
    }
    jb.close_list();
    jb.close();
    write_text_file(root + "/summary.json", jb.str());

    std::string txt = "run summary (command: " + command + ")\n";
    txt += "dynamics: " + cfg.dynamics.preset + "\n\n";
    for (const WRunSummary& r : runs)
        if (!r.error.empty())
            txt += "w=" + short_num(r.w) + " error: " + r.error + "\n";
    char buf[160];
    bool any_snaps = false, any_basin = false;
    for (const WRunSummary& r : runs) {
        any_snaps = any_snaps || !r.snaps.empty();
        any_basin = any_basin || r.has_basin;
    }
    if (any_snaps) {
        std::snprintf(buf, sizeof(buf), "%-8s%-8s%-16s%-10s%-14s%-12s%s\n", "w", "T", "area",
                      "points", "frac_conserv", "jaccard", "violations");
        txt += buf;
        for (const WRunSummary& r : runs)
            for (const SnapshotSummary& s : r.snaps) {
                if (s.compared)
                    std::snprintf(buf, sizeof(buf), "%-8s%-8s%-16s%-10zu%-14s%-12s%zu\n",
                                  short_num(r.w).c_str(), short_num(s.horizon).c_str(),
                                  short_num(s.area).c_str(), s.points,
                                  short_num(s.conservative_fraction).c_str(),
                                  short_num(s.jaccard).c_str(), s.violations);
                else
                    std::snprintf(buf, sizeof(buf), "%-8s%-8s%-16s%-10zu%-14s%-12s%s\n",
                                  short_num(r.w).c_str(), short_num(s.horizon).c_str(),
                                  short_num(s.area).c_str(), s.points, "-", "-", "-");
                txt += buf;
            }
        txt += "\n";
    }
    if (any_basin) {
        std::snprintf(buf, sizeof(buf), "%-8s%-16s%s\n", "w", "basin_area", "basin_points");
        txt += buf;
        for (const WRunSummary& r : runs) {
            if (!r.has_basin) continue;
            std::snprintf(buf, sizeof(buf), "%-8s%-16s%zu\n", short_num(r.w).c_str(),
                          short_num(r.basin_area).c_str(), r.basin_points);
            txt += buf;
        }
    }
    write_text_file(root + "/summary.txt", txt);
}

inline std::vector<RoaEstimate> solve_one_w(const RunConfig& cfg, double w,
                                            const std::string& wdir, std::ostream* log) {
    const DynamicsSpec dyn = make_dynamics(cfg.dynamics);
    const ReducedSystem sys(w, dyn);
    const Grid2D grid = make_grid(cfg.grid);
    const SolveConfig scfg = make_solve_config(cfg.solver);
    ScalarField init = [&] {
        try {
            return signed_distance_circle(grid, cfg.init.cx, cfg.init.cy, cfg.init.radius);
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("init: ") + e.what());
        }
    }();

    log_line(log, "[w=" + short_num(w) + "] marching the level set to T=" +
                      short_num(scfg.t_final));
    const std::vector<ScalarField> snaps = solve(grid, sys, init, scfg);

    std::vector<RoaEstimate> estimates;
    estimates.reserve(snaps.size());
    std::filesystem::create_directories(wdir);
    for (const ScalarField& snap : snaps) {
        RoaEstimate est = make_roa_estimate(snap);
        const std::string label = short_num(est.horizon);
        write_field_csv(snap, wdir + "/field_T" + label + ".csv");
        write_mask_csv(est.mask, wdir + "/mask_T" + label + ".csv");
        write_contour_csv(est.contours, wdir + "/contour_T" + label + ".csv");
        estimates.push_back(std::move(est));
    }
    return estimates;
}

inline BasinMask oracle_one_w(const RunConfig& cfg, double w, const std::string& wdir,
                              std::ostream* log) {
    const DynamicsSpec dyn = make_dynamics(cfg.dynamics);
    const ReducedSystem sys(w, dyn);
    const Grid2D grid = make_grid(cfg.grid);
    validate_oracle_params(cfg.oracle);

    log_line(log, "[w=" + short_num(w) + "] classifying the basin point-by-point");
    BasinMask basin = [&] {
        try {
            return classify_basin(grid, sys, {cfg.init.cx, cfg.init.cy}, cfg.oracle);
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("oracle: ") + e.what());
        }
    }();
    std::filesystem::create_directories(wdir);
    write_mask_csv(basin.mask, wdir + "/basin.csv");
    return basin;
}

} // namespace cmd_detail

/**
 * @brief Gershgorin certificate for the full linear-preset network at the
 * uniform equilibrium. Prints a short report; returns 0 when certified and
 * 2 when the certificate fails.
 */
inline int cmd_certify(const RunConfig& cfg, std::ostream& out) {
    if (cfg.dynamics.preset != "linear")
        throw config_error("certify requires the linear preset");
    const Topology topo = make_topology(cfg.topology);
    const auto jac = [&] {
        try {
            return linear_jacobian(topo, cfg.dynamics.beta, cfg.dynamics.gamma);
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("dynamics: ") + e.what());
        }
    }();
    const GershgorinReport rep = gershgorin_certify(jac);
    const std::vector<double> w = weighted_in_degree(topo);
    double wmin = w[0], wmax = w[0];
    for (double x : w) {
        wmin = std::min(wmin, x);
        wmax = std::max(wmax, x);
    }
    out << "nodes: " << topo.n << "\n";
    out << "in_degree_range: [" << cmd_detail::short_num(wmin) << ", "
        << cmd_detail::short_num(wmax) << "]\n";
    out << "beta: " << cmd_detail::short_num(cfg.dynamics.beta) << "\n";
    out << "gamma: " << cmd_detail::short_num(cfg.dynamics.gamma) << "\n";
    out << "certified: " << (rep.certified ? "yes" : "no") << "\n";
    out << "margin: " << format_g17(rep.margin) << "\n";
    return rep.certified ? 0 : 2;
}

/// Level-set march for every requested in-degree; fields, masks and contours
/// per snapshot horizon plus a summary pair.
inline void cmd_solve(const RunConfig& cfg, const RunOptions& opts, std::ostream* log) {
    const std::string root = cmd_detail::out_dir(cfg, opts);
    std::filesystem::create_directories(root);
    std::vector<cmd_detail::WRunSummary> runs;
    for (double w : cfg.w_values) {
        const std::vector<RoaEstimate> ests =
            cmd_detail::solve_one_w(cfg, w, cmd_detail::w_dir(root, w), log);
        cmd_detail::WRunSummary r;
        r.w = w;
        for (const RoaEstimate& e : ests) {
            cmd_detail::SnapshotSummary s;
            s.horizon = e.horizon;
            s.area = e.area;
            s.points = e.mask.count();
            s.contours = e.contours.size();
            r.snaps.push_back(s);
        }
        runs.push_back(std::move(r));
    }
    cmd_detail::write_summaries(cfg, root, "solve", runs);
}

/// Brute-force basin for every requested in-degree; basin.csv per w plus a
/// summary pair.
inline void cmd_oracle(const RunConfig& cfg, const RunOptions& opts, std::ostream* log) {
    const std::string root = cmd_detail::out_dir(cfg, opts);
    std::filesystem::create_directories(root);
    std::vector<cmd_detail::WRunSummary> runs;
    for (double w : cfg.w_values) {
        const BasinMask basin = cmd_detail::oracle_one_w(cfg, w, cmd_detail::w_dir(root, w), log);
        cmd_detail::WRunSummary r;
        r.w = w;
        r.has_basin = true;
        r.basin_points = basin.mask.count();
        r.basin_area = mask_area(basin.mask);
        runs.push_back(std::move(r));
    }
    cmd_detail::write_summaries(cfg, root, "oracle", runs);
}

/**
 * @brief Full pipeline: level-set march, brute-force basin and the
 * estimate-vs-basin comparison for every requested in-degree. A failure in
 * one w is recorded in the summary and the remaining w values still run;
 * any recorded failure makes the command throw after summaries are written.
 * With check set, a conservative fraction below 0.99 at any (w, horizon)
 * raises check_error after all artifacts are written.
 */
inline void cmd_sweep(const RunConfig& cfg, const RunOptions& opts, std::ostream* log) {
    // w-independent inputs are validated up front so a malformed config is a
    // config error for the whole command, not a per-w failure.
    make_dynamics(cfg.dynamics);
    make_solve_config(cfg.solver);
    validate_oracle_params(cfg.oracle);
    {
        const Grid2D g = make_grid(cfg.grid);
        try {
            signed_distance_circle(g, cfg.init.cx, cfg.init.cy, cfg.init.radius);
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("init: ") + e.what());
        }
    }

    const std::string root = cmd_detail::out_dir(cfg, opts);
    std::filesystem::create_directories(root);
    std::vector<cmd_detail::WRunSummary> runs;
    for (double w : cfg.w_values) {
        const std::string wdir = cmd_detail::w_dir(root, w);
        cmd_detail::WRunSummary r;
        r.w = w;
        try {
            const std::vector<RoaEstimate> ests = cmd_detail::solve_one_w(cfg, w, wdir, log);
            const BasinMask basin = cmd_detail::oracle_one_w(cfg, w, wdir, log);
            r.has_basin = true;
            r.basin_points = basin.mask.count();
            r.basin_area = mask_area(basin.mask);
            for (const RoaEstimate& e : ests) {
                const ComparisonReport rep = compare(e, basin, cfg.compare.boundary_dilation);
                cmd_detail::SnapshotSummary s;
                s.horizon = e.horizon;
                s.area = e.area;
                s.points = e.mask.count();
                s.contours = e.contours.size();
                s.compared = true;
                s.conservative_fraction = rep.conservative_fraction;
                s.jaccard = rep.jaccard;
                s.considered = rep.considered;
                s.violations = rep.violations.size();
                r.snaps.push_back(s);
            }
        } catch (const std::exception& e) {
            r.error = e.what();
            cmd_detail::log_line(log, "[w=" + cmd_detail::short_num(w) + "] failed: " + r.error);
        }
        runs.push_back(std::move(r));
    }
    cmd_detail::write_summaries(cfg, root, "sweep", runs);

    for (const auto& r : runs)
        if (!r.error.empty())
            throw std::runtime_error("sweep failed for w=" + cmd_detail::short_num(r.w) + ": " +
                                     r.error);

    if (opts.check) {
        for (const auto& r : runs)
            for (const auto& s : r.snaps)
                if (s.conservative_fraction < 0.99)
                    throw check_error("conservativeness violated at w=" +
                                      cmd_detail::short_num(r.w) + ", T=" +
                                      cmd_detail::short_num(s.horizon) + ": fraction " +
                                      format_g17(s.conservative_fraction) + " with " +
                                      std::to_string(s.violations) + " violating points");
    }
}

/**
 * @brief Convergence-time study: integrate the configured initial condition
 * for every requested in-degree and tabulate the eps-entry times. Rows that
 * do not converge carry the verdict word instead of a time.
 */
inline void cmd_convergence(const RunConfig& cfg, const RunOptions& opts, std::ostream* log) {
    const std::string root = cmd_detail::out_dir(cfg, opts);
    std::filesystem::create_directories(root);
    const DynamicsSpec dyn = make_dynamics(cfg.dynamics);
    validate_oracle_params(cfg.oracle);

    std::string csv = "w,time\n";
    for (double w : cfg.w_values) {
        const ReducedSystem sys(w, dyn);
        cmd_detail::log_line(log, "[w=" + cmd_detail::short_num(w) +
                                      "] integrating from ic=(" +
                                      cmd_detail::short_num(cfg.convergence.ic[0]) + ", " +
                                      cmd_detail::short_num(cfg.convergence.ic[1]) + ")");
        const Trajectory traj = integrate_reduced(cfg.convergence.ic, sys, cfg.oracle,
                                                  {cfg.init.cx, cfg.init.cy});
        csv += format_g17(w) + ",";
        csv += (traj.verdict == Verdict::converged) ? format_g17(traj.entry_time)
                                                    : std::string(to_string(traj.verdict));
        csv += "\n";
    }
    cmd_detail::write_text_file(root + "/convergence.csv", csv);
}

} // namespace netroa

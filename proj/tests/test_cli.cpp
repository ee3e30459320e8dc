#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "netroa/commands.hpp"

using namespace netroa;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
    return parse_config_json(nlohmann::json::parse(text));
}

fs::path fresh_dir(const std::string& leaf) {
    const fs::path p = fs::temp_directory_path() / leaf;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += (c == '\n');
    return n;
}

/// relative path -> file bytes, for whole-tree comparisons
std::map<std::string, std::string> tree_bytes(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file())
            out[fs::relative(e.path(), root).string()] = slurp(e.path());
    return out;
}

/// a small linear run: 21x21 grid, horizon 0.5, single in-degree
RunConfig tiny_linear() {
    RunConfig cfg;
    cfg.w_values = {2.0};
    cfg.grid.nx = 21;
    cfg.grid.ny = 21;
    cfg.solver.t_final = 0.5;
    cfg.solver.snapshot_times = {0.25, 0.5};
    return cfg;
}

} // namespace

TEST_CASE("config: minimal document yields the documented defaults", "[cli]") {
    const RunConfig cfg = parse(R"({"schema": "netroa/1"})");
    CHECK(cfg.dynamics.preset == "linear");
    CHECK(cfg.dynamics.beta == 1.0);
    CHECK(cfg.dynamics.gamma == 1.0);
    CHECK(cfg.topology.generator == "complete");
    CHECK(cfg.topology.n == 4);
    CHECK(cfg.w_values == std::vector<double>{2.0, 4.0, 6.0, 8.0});
    CHECK(cfg.grid.xmin == -0.5);
    CHECK(cfg.grid.xmax == 2.5);
    CHECK(cfg.grid.nx == 201);
    CHECK(cfg.grid.ny == 201);
    CHECK(cfg.solver.t_final == 6.0);
    CHECK(cfg.solver.cfl == 0.5);
    CHECK(cfg.solver.snapshot_times == std::vector<double>{1.0, 2.0, 4.0, 6.0});
    CHECK(cfg.solver.dissipation == "global-lax-friedrichs");
    CHECK(cfg.init.cx == 1.0);
    CHECK(cfg.init.cy == 1.0);
    CHECK(cfg.init.radius == 0.1);
    CHECK(cfg.oracle.dt == 1e-3);
    CHECK(cfg.oracle.t_max == 50.0);
    CHECK(cfg.oracle.eps == 1e-3);
    CHECK(cfg.oracle.escape_radius == 100.0);
    CHECK(cfg.compare.boundary_dilation == 2);
    CHECK(cfg.convergence.ic == std::array<double, 2>{1.8, 1.2});
    CHECK(cfg.output_dir == "out");

    // the default constructor is the same document
    const RunConfig dflt = default_config();
    CHECK(dflt.w_values == cfg.w_values);
    CHECK(dflt.solver.snapshot_times == cfg.solver.snapshot_times);
}

TEST_CASE("config: schema and key discipline", "[cli]") {
    CHECK_THROWS_AS(parse(R"([1, 2])"), config_error);
    CHECK_THROWS_AS(parse(R"({})"), config_error);
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/2"})"), config_error);
    CHECK_THROWS_AS(parse(R"({"schema": 1})"), config_error);
    CHECK_THROWS_WITH(parse(R"({"schema": "netroa/1", "wvalues": [2]})"),
                      ContainsSubstring("unknown key 'wvalues'"));
    CHECK_THROWS_WITH(parse(R"({"schema": "netroa/1", "solver": {"dt": 0.1}})"),
                      ContainsSubstring("unknown key 'dt'"));
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1", "grid": {"nx": 100.5}})"), config_error);
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1", "w_values": "2"})"), config_error);
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1", "dynamics": {"beta": "x"}})"), config_error);
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1", "output_dir": ""})"), config_error);
}

TEST_CASE("config: dynamics presets", "[cli]") {
    CHECK(parse(R"({"schema": "netroa/1", "dynamics": {"preset": "nonlinear"}})")
              .dynamics.preset == "nonlinear-quadratic");
    CHECK(parse(R"({"schema": "netroa/1", "dynamics": {"preset": "nonlinear-quadratic"}})")
              .dynamics.preset == "nonlinear-quadratic");

    CHECK_THROWS_WITH(
        parse(R"({"schema": "netroa/1", "dynamics": {"preset": "nonlinear", "beta": 2}})"),
        ContainsSubstring("takes no parameters"));
    CHECK_THROWS_WITH(
        parse(R"({"schema": "netroa/1", "dynamics": {"preset": "linear", "f_coeffs": [0, 1]}})"),
        ContainsSubstring("custom"));
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1", "dynamics": {"preset": "custom"}})"),
                    config_error);
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1", "dynamics": {"preset": "cubic"}})"),
                    config_error);

    // custom coefficients materialize through the same validation as the API
    const RunConfig ok = parse(
        R"({"schema": "netroa/1",
            "dynamics": {"preset": "custom", "f_coeffs": [1, -1], "g_coeffs": [0, 0.5]}})");
    CHECK_NOTHROW(make_dynamics(ok.dynamics));

    const RunConfig rootless = parse(
        R"({"schema": "netroa/1",
            "dynamics": {"preset": "custom", "f_coeffs": [1, 0, 1], "g_coeffs": [0, 1]}})");
    CHECK_THROWS_WITH(make_dynamics(rootless.dynamics), ContainsSubstring("no real root"));
    const RunConfig degen = parse(
        R"({"schema": "netroa/1",
            "dynamics": {"preset": "custom", "f_coeffs": [1], "g_coeffs": [0, 1]}})");
    CHECK_THROWS_WITH(make_dynamics(degen.dynamics), ContainsSubstring("degree"));

    const RunConfig offset = parse(
        R"({"schema": "netroa/1",
            "dynamics": {"preset": "custom", "f_coeffs": [1, -1], "g_coeffs": [1, 1]}})");
    CHECK_THROWS_WITH(make_dynamics(offset.dynamics), ContainsSubstring("vanish"));

    const RunConfig badbeta = parse(
        R"({"schema": "netroa/1", "dynamics": {"preset": "linear", "beta": -1}})");
    CHECK_THROWS_WITH(make_dynamics(badbeta.dynamics), ContainsSubstring("beta must be positive"));
}

TEST_CASE("config: w list, grid, solver and oracle rejections", "[cli]") {
    CHECK_THROWS_WITH(parse(R"({"schema": "netroa/1", "w_values": []})"),
                      ContainsSubstring("w_values"));
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1", "w_values": [2, -1]})"), config_error);
    CHECK_NOTHROW(parse(R"({"schema": "netroa/1", "w_values": [0]})"));

    CHECK_THROWS_AS(make_grid(parse(R"({"schema": "netroa/1", "grid": {"nx": 5}})").grid),
                    config_error);
    CHECK_THROWS_AS(
        make_grid(parse(R"({"schema": "netroa/1", "grid": {"xmin": 3, "xmax": 1}})").grid),
        config_error);

    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1", "solver": {"dissipation": "local"}})"),
                    config_error);
    auto solver_cfg = [](const char* body) {
        return parse(std::string(R"({"schema": "netroa/1", "solver": )") + body + "}").solver;
    };
    CHECK_THROWS_AS(make_solve_config(solver_cfg(R"({"snapshot_times": [2, 1]})")), config_error);
    CHECK_THROWS_AS(make_solve_config(solver_cfg(R"({"snapshot_times": [1, 2]})")), config_error);
    CHECK_THROWS_AS(make_solve_config(solver_cfg(R"({"snapshot_times": [-1, 6]})")), config_error);
    CHECK_THROWS_AS(make_solve_config(solver_cfg(R"({"cfl": 0})")), config_error);
    CHECK_THROWS_AS(make_solve_config(solver_cfg(R"({"cfl": 1.5})")), config_error);
    CHECK_THROWS_AS(make_solve_config(solver_cfg(R"({"t_final": 0, "snapshot_times": []})")),
                    config_error);
    CHECK_NOTHROW(make_solve_config(solver_cfg(R"({"t_final": 2, "snapshot_times": [1, 2]})")));

    CHECK_THROWS_AS(
        validate_oracle_params(parse(R"({"schema": "netroa/1", "oracle": {"dt": 0}})").oracle),
        config_error);
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1", "compare": {"boundary_dilation": -1}})"),
                    config_error);
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1", "convergence": {"ic": [1]}})"), config_error);
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1", "convergence": {"ic": [1, 2, 3]}})"),
                    config_error);
}

TEST_CASE("config: topology section", "[cli]") {
    const RunConfig ring = parse(
        R"({"schema": "netroa/1", "topology": {"generator": "ring", "n": 6, "k": 2}})");
    CHECK(weighted_in_degree(make_topology(ring.topology)) ==
          std::vector<double>(6, 4.0));

    // explicit 1-based edge list: nodes 2 and 3 feed node 1
    const RunConfig edges = parse(
        R"({"schema": "netroa/1",
            "topology": {"generator": "edges", "n": 3, "edges": [[2, 1, 1.0], [3, 1, 1.0]]}})");
    CHECK(weighted_in_degree(make_topology(edges.topology)) == std::vector<double>{2.0, 0.0, 0.0});

    CHECK_THROWS_WITH(
        make_topology(parse(R"({"schema": "netroa/1",
            "topology": {"generator": "edges", "n": 3, "edges": [[0, 1, 1.0]]}})").topology),
        ContainsSubstring("1-based"));
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1",
            "topology": {"generator": "edges", "n": 3, "edges": [[1, 2]]}})"),
                    config_error);
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1", "topology": {"generator": "edges"}})"),
                    config_error);
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1", "topology": {"generator": "grid"}})"),
                    config_error);
    CHECK_THROWS_AS(parse(R"({"schema": "netroa/1",
            "topology": {"generator": "ring", "edges": [[1, 2, 1.0]]}})"),
                    config_error);
    CHECK_THROWS_AS(
        make_topology(parse(R"({"schema": "netroa/1", "topology": {"n": 0}})").topology),
        config_error);
    CHECK_THROWS_AS(
        make_topology(
            parse(R"({"schema": "netroa/1", "topology": {"generator": "ring", "n": 4, "k": 2}})")
                .topology),
        config_error);
}

TEST_CASE("config: file loading", "[cli]") {
    CHECK_THROWS_WITH(parse_config_file("/nonexistent/netroa.json"),
                      ContainsSubstring("cannot open"));
    const fs::path dir = fresh_dir("netroa_cli_badjson");
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK_THROWS_WITH(parse_config_file(bad.string()), ContainsSubstring("not valid JSON"));
    const fs::path good = dir / "good.json";
    std::ofstream(good) << R"({"schema": "netroa/1", "w_values": [3]})";
    CHECK(parse_config_file(good.string()).w_values == std::vector<double>{3.0});
}

TEST_CASE("certify command", "[cli]") {
    std::ostringstream out;
    CHECK(cmd_certify(default_config(), out) == 0);
    const std::string rep = out.str();
    CHECK_THAT(rep, ContainsSubstring("nodes: 4"));
    CHECK_THAT(rep, ContainsSubstring("in_degree_range: [3, 3]"));
    CHECK_THAT(rep, ContainsSubstring("certified: yes"));
    CHECK_THAT(rep, ContainsSubstring("margin: 1"));

    RunConfig ring = default_config();
    ring.topology.generator = "ring";
    ring.topology.n = 6;
    ring.topology.k = 2;
    ring.dynamics.beta = 0.5;
    ring.dynamics.gamma = 2.0;
    std::ostringstream out2;
    CHECK(cmd_certify(ring, out2) == 0);
    CHECK_THAT(out2.str(), ContainsSubstring("in_degree_range: [4, 4]"));
    CHECK_THAT(out2.str(), ContainsSubstring("margin: 0.5"));

    RunConfig bad = default_config();
    bad.dynamics.beta = -1.0;
    std::ostringstream sink;
    CHECK_THROWS_WITH(cmd_certify(bad, sink), ContainsSubstring("beta must be positive"));

    RunConfig nl = default_config();
    nl.dynamics.preset = "nonlinear-quadratic";
    CHECK_THROWS_WITH(cmd_certify(nl, sink), ContainsSubstring("requires the linear preset"));
}

TEST_CASE("solve command artifacts", "[cli]") {
    const fs::path dir = fresh_dir("netroa_cli_solve");
    RunConfig cfg = tiny_linear();
    RunOptions opts;
    opts.out_override = (dir / "run").string();
    cmd_solve(cfg, opts, nullptr);

    const fs::path wdir = dir / "run" / "w_2";
    for (const char* name : {"field_T0.25.csv", "mask_T0.25.csv", "contour_T0.25.csv",
                             "field_T0.5.csv", "mask_T0.5.csv", "contour_T0.5.csv"})
        CHECK(fs::exists(wdir / name));

    const std::string field = slurp(wdir / "field_T0.5.csv");
    CHECK(line_count(field) == 441 + 1);
    CHECK(field.rfind("x,y,v", 0) == 0);

    const nlohmann::json sum = nlohmann::json::parse(slurp(dir / "run" / "summary.json"));
    CHECK(sum.at("schema") == "netroa-summary/1");
    CHECK(sum.at("command") == "solve");
    CHECK(sum.at("config").at("grid").at("nx") == 21);
    REQUIRE(sum.at("runs").size() == 1);
    const auto& snaps = sum.at("runs").at(0).at("snapshots");
    REQUIRE(snaps.size() == 2);
    CHECK(snaps.at(0).at("horizon").get<double>() == 0.25);
    CHECK(snaps.at(1).at("horizon").get<double>() == 0.5);
    const double dx = 3.0 / 20.0;
    for (const auto& s : snaps)
        CHECK(s.at("area").get<double>() ==
              Approx(s.at("points").get<double>() * dx * dx).epsilon(1e-12));
    CHECK(snaps.at(0).at("points").get<std::size_t>() <
          snaps.at(1).at("points").get<std::size_t>());
    CHECK(fs::exists(dir / "run" / "summary.txt"));
}

TEST_CASE("oracle command artifacts", "[cli]") {
    const fs::path dir = fresh_dir("netroa_cli_oracle");
    RunConfig cfg = tiny_linear();
    RunOptions opts;
    opts.out_override = (dir / "run").string();
    cmd_oracle(cfg, opts, nullptr);

    CHECK(fs::exists(dir / "run" / "w_2" / "basin.csv"));
    const nlohmann::json sum = nlohmann::json::parse(slurp(dir / "run" / "summary.json"));
    CHECK(sum.at("command") == "oracle");
    // the linear preset is globally stable: the whole 21x21 window converges
    CHECK(sum.at("runs").at(0).at("basin").at("points") == 441);
}

TEST_CASE("sweep command: comparison, check mode and per-w isolation", "[cli]") {
    const fs::path dir = fresh_dir("netroa_cli_sweep");
    RunConfig cfg = tiny_linear();
    RunOptions opts;
    opts.out_override = (dir / "run").string();
    opts.check = true; // globally stable linear case must clear the gate
    cmd_sweep(cfg, opts, nullptr);

    const nlohmann::json sum = nlohmann::json::parse(slurp(dir / "run" / "summary.json"));
    CHECK(sum.at("command") == "sweep");
    const auto& run0 = sum.at("runs").at(0);
    CHECK(run0.at("basin").at("points") == 441);
    for (const auto& s : run0.at("snapshots")) {
        CHECK(s.at("conservative_fraction").get<double>() == 1.0);
        CHECK(s.at("violations").get<std::size_t>() == 0);
        CHECK(s.at("jaccard").get<double>() > 0.0);
        CHECK(s.at("jaccard").get<double>() < 1.0);
    }
    const std::string txt = slurp(dir / "run" / "summary.txt");
    CHECK_THAT(txt, ContainsSubstring("frac_conserv"));
    CHECK_THAT(txt, ContainsSubstring("basin_area"));

    // a failing in-degree is recorded, the others still run, and the command
    // reports the failure after writing summaries
    RunConfig mixed = tiny_linear();
    mixed.w_values = {2.0, -1.0};
    RunOptions mixed_opts;
    mixed_opts.out_override = (dir / "mixed").string();
    CHECK_THROWS_WITH(cmd_sweep(mixed, mixed_opts, nullptr),
                      ContainsSubstring("sweep failed for w=-1"));
    const nlohmann::json msum = nlohmann::json::parse(slurp(dir / "mixed" / "summary.json"));
    REQUIRE(msum.at("runs").size() == 2);
    CHECK_FALSE(msum.at("runs").at(0).contains("error"));
    CHECK(msum.at("runs").at(0).at("basin").at("points") == 441);
    CHECK_THAT(msum.at("runs").at(1).at("error").get<std::string>(),
               ContainsSubstring("in_degree"));
    CHECK_THAT(slurp(dir / "mixed" / "summary.txt"), ContainsSubstring("w=-1 error:"));

    // starving the oracle empties the basin; with dilation 0 every estimate
    // point is kept, so the conservativeness gate must trip
    RunConfig starved = tiny_linear();
    starved.oracle.t_max = 0.01;
    starved.compare.boundary_dilation = 0;
    RunOptions strict;
    strict.out_override = (dir / "starved").string();
    strict.check = true;
    CHECK_THROWS_AS(cmd_sweep(starved, strict, nullptr), check_error);
    // without the flag the same run completes and records the bad fraction.
    // (the starved basin still contains the lattice point sitting exactly on
    // the target, so the tiny first-snapshot estimate can be vacuously fine;
    // the gate trips on the grown later snapshot.)
    RunOptions lax;
    lax.out_override = (dir / "starved2").string();
    CHECK_NOTHROW(cmd_sweep(starved, lax, nullptr));
    const nlohmann::json ssum = nlohmann::json::parse(slurp(dir / "starved2" / "summary.json"));
    double min_frac = 1.0;
    std::size_t worst_violations = 0;
    for (const auto& s : ssum.at("runs").at(0).at("snapshots")) {
        min_frac = std::min(min_frac, s.at("conservative_fraction").get<double>());
        worst_violations = std::max(worst_violations, s.at("violations").get<std::size_t>());
    }
    CHECK(min_frac < 0.99);
    CHECK(worst_violations >= 1);
}

TEST_CASE("convergence command", "[cli]") {
    const fs::path dir = fresh_dir("netroa_cli_conv");
    RunConfig cfg;
    cfg.w_values = {2.0, 4.0};
    RunOptions opts;
    opts.out_override = (dir / "lin").string();
    cmd_convergence(cfg, opts, nullptr);

    std::ifstream csv(dir / "lin" / "convergence.csv");
    std::string header, row2, row4;
    REQUIRE(std::getline(csv, header));
    REQUIRE(std::getline(csv, row2));
    REQUIRE(std::getline(csv, row4));
    CHECK(header == "w,time");
    REQUIRE(row2.rfind("2,", 0) == 0);
    REQUIRE(row4.rfind("4,", 0) == 0);
    const double t2 = std::stod(row2.substr(2));
    const double t4 = std::stod(row4.substr(2));
    CHECK(t2 > t4); // stronger coupling converges no later from the off-diagonal start
    CHECK(t2 == Approx(5.2983924717528).epsilon(1e-9));

    RunConfig nl;
    nl.dynamics.preset = "nonlinear-quadratic";
    nl.w_values = {3.0};
    RunOptions nlopts;
    nlopts.out_override = (dir / "nl").string();
    cmd_convergence(nl, nlopts, nullptr);
    const std::string table = slurp(dir / "nl" / "convergence.csv");
    CHECK_THAT(table, ContainsSubstring("3,diverged"));

    RunConfig home;
    home.w_values = {2.0};
    home.convergence.ic = {1.0, 1.0};
    RunOptions hopts;
    hopts.out_override = (dir / "home").string();
    cmd_convergence(home, hopts, nullptr);
    CHECK_THAT(slurp(dir / "home" / "convergence.csv"), ContainsSubstring("2,0\n"));
}

TEST_CASE("identical runs produce identical artifact trees", "[cli]") {
    const fs::path dir = fresh_dir("netroa_cli_repro");
    RunConfig cfg = tiny_linear();
    RunOptions a, b;
    a.out_override = (dir / "a").string();
    b.out_override = (dir / "b").string();
    cmd_sweep(cfg, a, nullptr);
    cmd_sweep(cfg, b, nullptr);

    const auto ta = tree_bytes(dir / "a");
    const auto tb = tree_bytes(dir / "b");
    REQUIRE(ta.size() == tb.size());
    REQUIRE(ta.size() >= 9); // 3 files x 2 snapshots + basin + 2 summaries
    CHECK(ta == tb);
}

#ifdef NETROA_CLI_PATH
namespace {
int run_cli(const std::string& args) {
    const std::string cmd = std::string(NETROA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}
} // namespace

TEST_CASE("cli binary exit codes", "[cli]") {
    const fs::path dir = fresh_dir("netroa_cli_bin");

    CHECK(run_cli("certify") == 0);
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("frobnicate") == 1);                             // unknown subcommand
    CHECK(run_cli("solve --config /nonexistent/nope.json") == 1);  // unreadable config

    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(run_cli("certify --config " + bad.string()) == 1);

    const fs::path schema = dir / "schema.json";
    std::ofstream(schema) << R"({"schema": "netroa/0"})";
    CHECK(run_cli("certify --config " + schema.string()) == 1);

    // a sweep whose oracle is starved of time must fail the --check gate
    const fs::path chk = dir / "check.json";
    std::ofstream(chk) << R"({
        "schema": "netroa/1",
        "w_values": [2],
        "grid": {"nx": 21, "ny": 21},
        "solver": {"t_final": 0.5, "snapshot_times": [0.5]},
        "oracle": {"t_max": 0.01},
        "compare": {"boundary_dilation": 0},
        "output_dir": ")" << (dir / "chk_out").string() << R"("
    })";
    CHECK(run_cli("sweep --check --serial --config " + chk.string()) == 3);
    // same configuration without the gate succeeds and leaves artifacts
    CHECK(run_cli("sweep --config " + chk.string()) == 0);
    CHECK(fs::exists(dir / "chk_out" / "summary.json"));

    const fs::path conv = dir / "conv.json";
    std::ofstream(conv) << R"({
        "schema": "netroa/1",
        "w_values": [2],
        "oracle": {"t_max": 0.01},
        "output_dir": ")" << (dir / "conv_out").string() << R"("
    })";
    CHECK(run_cli("convergence --config " + conv.string()) == 0);
    CHECK(fs::exists(dir / "conv_out" / "convergence.csv"));
}
#endif

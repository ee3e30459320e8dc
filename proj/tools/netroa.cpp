#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <netroa/netroa.hpp>

namespace {

struct CliState {
    std::string config_path;
    std::string out_dir;
    bool check = false;
    bool serial = false;
    std::string command;
};

void add_common(CLI::App* sub, CliState& st) {
    sub->add_option("--config", st.config_path, "JSON configuration file (defaults built in)");
    sub->add_option("--out", st.out_dir, "output directory (overrides config output_dir)");
    sub->add_flag("--serial", st.serial,
                  "deterministic single-threaded execution (always on; flag kept for "
                  "script stability)");
}

int dispatch(const CliState& st) {
    netroa::RunConfig cfg = st.config_path.empty() ? netroa::default_config()
                                                   : netroa::parse_config_file(st.config_path);
    netroa::RunOptions opts;
    opts.check = st.check;
    opts.serial = true;
    opts.out_override = st.out_dir;

    if (st.command == "certify") return netroa::cmd_certify(cfg, std::cout);
    if (st.command == "solve") {
        netroa::cmd_solve(cfg, opts, &std::cerr);
        return 0;
    }
    if (st.command == "oracle") {
        netroa::cmd_oracle(cfg, opts, &std::cerr);
        return 0;
    }
    if (st.command == "sweep") {
        netroa::cmd_sweep(cfg, opts, &std::cerr);
        return 0;
    }
    if (st.command == "convergence") {
        netroa::cmd_convergence(cfg, opts, &std::cerr);
        return 0;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"region-of-attraction estimation for networked load balancing"};
    app.require_subcommand(1);
    CliState st;

    CLI::App* certify =
        app.add_subcommand("certify", "Gershgorin stability certificate for the full network");
    add_common(certify, st);

    CLI::App* solve =
        app.add_subcommand("solve", "level-set march: fields, masks and contours per horizon");
    add_common(solve, st);

    CLI::App* oracle =
        app.add_subcommand("oracle", "brute-force basin classification on the grid");
    add_common(oracle, st);

    CLI::App* sweep =
        app.add_subcommand("sweep", "solve + oracle + conservativeness comparison");
    add_common(sweep, st);
    sweep->add_flag("--check", st.check,
                    "fail (exit 3) if the conservative fraction drops below 0.99");

    CLI::App* convergence =
        app.add_subcommand("convergence", "convergence-time table over the in-degree sweep");
    add_common(convergence, st);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints the message; --help lands here with code 0
        return code == 0 ? 0 : 1;     // usage problems are configuration problems
    }

    for (CLI::App* sub : {certify, solve, oracle, sweep, convergence})
        if (sub->parsed()) st.command = sub->get_name();

    try {
        return dispatch(st);
    } catch (const netroa::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const netroa::check_error& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

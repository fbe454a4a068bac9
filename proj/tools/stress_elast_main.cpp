#include <iostream>

#include <CLI11.hpp>

#include "stress_elast/blas_guard.hpp"
#include "stress_elast/cli/commands.hpp"

int main(int argc, char** argv) {
    namespace sc = stress_elast::cli;
    try {
        stress_elast::ensure_reliable_blas(argv);
    } catch (const stress_elast::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return sc::exit_numerical_failure;
    }
    CLI::App app{"Stress-based elasticity solver and experiment driver"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    for (const char* name : {"solve", "convergence", "spectrum", "psi-sweep", "identities"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "flat key = value config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the out key)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? sc::exit_ok : sc::exit_config_error;
    }
    try {
        const auto command = sc::parse_command(app.get_subcommands().front()->get_name());
        auto cfg = sc::load_config(config_path, command);
        if (!out_dir.empty()) cfg.out = out_dir;
        return sc::run(cfg, std::cout, std::cerr);
    } catch (const stress_elast::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return sc::exit_config_error;
    }
}

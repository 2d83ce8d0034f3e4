// qctrl <task> --config <path> [--out <dir>] [--verbose]
//
// Exit codes: 0 success, 2 config error, 3 numeric failure, 4 I/O error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qctrl/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Hamiltonian engineering toolbox for finite-dimensional quantum systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool verbose = false;

    for (const std::string& name : qctrl::known_tasks()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "path to the JSON run configuration")
            ->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
        sub->add_flag("--verbose", verbose, "list written files");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : qctrl::kExitConfig;
    }

    const std::string task = app.get_subcommands().front()->get_name();

    qctrl::RunConfig cfg;
    try {
        cfg = qctrl::parse_config(config_path);
    } catch (const qctrl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return qctrl::kExitConfig;
    }
    if (cfg.task_name != task) {
        std::cerr << "config error: subcommand '" << task << "' does not match task.name '"
                  << cfg.task_name << "'\n";
        return qctrl::kExitConfig;
    }

    return qctrl::run(cfg, qctrl::RunOptions{out_dir, verbose}, std::cout, std::cerr);
}

// vekua: command-line front end.
//
//   vekua <command> [sub] [--config path] [--domain ball|box] [--n INT] [--m INT]
//         [--seed INT] [--out DIR] [--coeffs PRESET] [--basis FILE]
//
// Exit codes: 0 pass, 1 internal error, 2 tolerance failure, 3 config error,
// 4 contraction violation.

#include <CLI11.hpp>

#include "cli.hpp"

int main(int argc, char** argv) {
    using namespace vekua::cli;
    CLI::App app{"Vekua-Bergman spaces: operator checks, bases, kernels and decompositions"};
    std::string command, sub, config;
    FlagOverrides flags;
    app.add_option("command", command,
                   "algebra-check | operator-convergence | bergman | decompose | examples")
        ->required();
    app.add_option("sub", sub,
                   "bergman: build|reproduce|project|kernel-matrix; examples: schrodinger|df|helmholtz|bessel|t-alpha");
    app.add_option("--config", config, "JSON run configuration");
    app.add_option("--domain", flags.domain, "ball (unit ball) or box (unit cube)");
    app.add_option("--n", flags.n, "cells per axis");
    app.add_option("--m", flags.m, "exterior points for the basis");
    app.add_option("--seed", flags.seed, "seed for random samples");
    app.add_option("--out", flags.out, "output directory");
    app.add_option("--coeffs", flags.coeffs,
                   "coefficient preset: zero|kappa-half|kappa-over-one|main-vekua|helmholtz|bessel");
    app.add_option("--basis", flags.basis, "VKB1 basis file written by 'bergman build'");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }
    RunConfig cfg;
    try {
        cfg = load_config(config.empty() ? std::nullopt : std::optional<std::filesystem::path>(config), flags);
    } catch (const vekua::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    return run(command, sub, cfg);
}

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hessianlab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"hessianlab: Hessian-type Dirichlet problems on the unit ball in C^n"};

    std::string config_path;
    std::string subcommand;
    std::string out_dir;
    std::string grid_override;
    double tol_override = -1.0;
    std::uint64_t seed = 0;
    bool seed_set = false, force = false;

    app.add_option("subcommand", subcommand,
                   "solve | picard | stability | capacity | properties (must match the config)");
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--out-dir", out_dir, "output directory (overrides config)");
    app.add_option("--grid", grid_override, "grid spacing override, e.g. 1/64");
    app.add_option("--tol", tol_override, "solver residual tolerance override");
    auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides config)");
    app.add_flag("--force", force, "allow overwriting an existing artifact directory");

    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;

    try {
        hessianlab::cli::RunConfig cfg = hessianlab::cli::parse_config(config_path);
        if (!subcommand.empty() && subcommand != cfg.subcommand)
            throw hessianlab::ConfigError("subcommand '" + subcommand +
                                          "' does not match config subcommand '" +
                                          cfg.subcommand + "'");
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed_set) cfg.seed = seed;
        if (force) cfg.force = true;
        if (!grid_override.empty()) {
            if (grid_override.rfind("1/", 0) != 0)
                throw hessianlab::ConfigError("--grid expects the form 1/q");
            cfg.q = std::stoi(grid_override.substr(2));
        }
        if (tol_override > 0.0) cfg.solver.tolerance = tol_override;
        return hessianlab::cli::run(cfg);
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = true;
        err["message"] = e.what();
        std::puts(err.dump().c_str());
        return 2;
    }
}

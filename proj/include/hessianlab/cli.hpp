#pragma once

#include <optional>

#include "hessianlab/expr.hpp"
#include "hessianlab/picard.hpp"
#include "hessianlab/stability.hpp"

namespace hessianlab::cli {

struct SetSpec {
    std::vector<double> center;
    double radius = 0.0;
};

struct RunConfig {
    std::string subcommand; // solve | picard | stability | capacity | properties
    int n = 1, m = 1, q = 32; // h = 1/q

    enum class OmegaKind { Zero, ScaledIdentity, Matrix } omega_kind = OmegaKind::Zero;
    double omega_scale = 0.0;
    HermitianMatrix omega_matrix;

    std::optional<expr::Expression> mu, F, G, phi, reference;
    bool monotone_F = false;
    double t_lo = -1.0, t_hi = 1.0; // config-time bound-validation band

    SolverConfig solver;
    PicardTolerances picard;
    bool allow_acceleration = true;
    int envelope_window = 0;
    bool cap_metric_in_trace = true;

    std::uint64_t seed = 0;
    std::string out_dir = "out";
    bool force = false;

    std::vector<SetSpec> sets; // capacity subcommand
    std::optional<expr::Expression> family; // stability: F_j(t, z, j)
    std::vector<int> indices{1, 2, 4, 8, 16, 32};
    std::vector<double> deltas{0.05};
    double stability_threshold = 1e-3;

    int trials = 20; // properties subcommand
    int band = 2;
    std::vector<std::string> checks{"comparison", "max_principle", "demailly",
                                    "weak_convergence"};

    std::string config_echo; // raw JSON for the manifest
};

// Parses + fully validates a JSON config file. Every failure names the
// offending field and the violated constraint (ConfigError).
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& json_text);

// Dispatches to the named module, writes manifest/report/CSV/PGM artifacts
// into out_dir, prints a one-line summary. Returns the process exit status.
int run(const RunConfig& cfg);

} // namespace hessianlab::cli

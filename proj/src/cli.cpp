#include "hessianlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "json.hpp"

#include "hessianlab/io.hpp"
#include "hessianlab/properties.hpp"

namespace hessianlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
}

int parse_spacing(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s.rfind("1/", 0) != 0) bad_field("h", "expected \"1/q\" or a number, got \"" + s + "\"");
        try {
            const int q = std::stoi(s.substr(2));
            return q;
        } catch (...) {
            bad_field("h", "bad denominator in \"" + s + "\"");
        }
    }
    if (j.is_number()) {
        const double h = j.get<double>();
        if (h <= 0.0) bad_field("h", "must be positive");
        const double qd = 1.0 / h;
        const int q = static_cast<int>(std::lround(qd));
        if (std::abs(qd - q) > 1e-9) bad_field("h", "must equal 1/q for an integer q");
        return q;
    }
    bad_field("h", "expected \"1/q\" or a number");
}

cplx parse_complex_entry(const json& j, const std::string& field) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_object() && j.contains("re"))
        return {j["re"].get<double>(), j.value("im", 0.0)};
    bad_field(field, "matrix entries must be numbers, [re, im] pairs, or {re, im} objects");
}

expr::Expression parse_expr_field(const json& j, const std::string& field, int n, bool allow_t,
                                  bool allow_j = false) {
    if (!j.is_string()) bad_field(field, "expected an expression string");
    try {
        expr::Expression::Vars vars;
        vars.t = allow_t;
        vars.j = allow_j;
        vars.coords = n;
        return expr::Expression::parse(j.get<std::string>(), vars);
    } catch (const ConfigError& e) {
        bad_field(field, e.what());
    }
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    RunConfig cfg;
    cfg.config_echo = text;

    if (!j.contains("subcommand") || !j["subcommand"].is_string())
        bad_field("subcommand", "required string");
    cfg.subcommand = j["subcommand"].get<std::string>();
    static const std::vector<std::string> subs{"solve", "picard", "stability", "capacity",
                                               "properties"};
    if (std::find(subs.begin(), subs.end(), cfg.subcommand) == subs.end())
        bad_field("subcommand", "must be one of solve|picard|stability|capacity|properties");

    if (!j.contains("n") || !j["n"].is_number_integer()) bad_field("n", "required integer");
    cfg.n = j["n"].get<int>();
    if (cfg.n < 1 || cfg.n > 2) bad_field("n", "desk-scale limits require n in {1, 2}");
    if (!j.contains("m") || !j["m"].is_number_integer()) bad_field("m", "required integer");
    cfg.m = j["m"].get<int>();
    if (cfg.m < 1) bad_field("m", "must be >= 1");
    if (cfg.m > cfg.n) bad_field("m", "m <= n required");

    if (!j.contains("h")) bad_field("h", "required");
    cfg.q = parse_spacing(j["h"]);
    if (cfg.q < 2) bad_field("h", "must be at most 1/2");
    if (cfg.n == 1 && cfg.q > 64) bad_field("h", "desk-scale limit for n=1 is h >= 1/64");
    if (cfg.n == 2 && cfg.q > 10) bad_field("h", "desk-scale limit for n=2 is h >= 1/10");

    // omega: "zero" | number (c * I) | matrix
    if (j.contains("omega")) {
        const json& w = j["omega"];
        if (w.is_string()) {
            if (w.get<std::string>() != "zero")
                bad_field("omega", "string form must be \"zero\"");
            cfg.omega_kind = RunConfig::OmegaKind::Zero;
        } else if (w.is_number()) {
            cfg.omega_kind = RunConfig::OmegaKind::ScaledIdentity;
            cfg.omega_scale = w.get<double>();
        } else if (w.is_array()) {
            if (static_cast<int>(w.size()) != cfg.n)
                bad_field("omega", "matrix must be n x n");
            cfg.omega_matrix = HermitianMatrix(cfg.n);
            for (int r = 0; r < cfg.n; ++r) {
                if (!w[r].is_array() || static_cast<int>(w[r].size()) != cfg.n)
                    bad_field("omega", "matrix must be n x n");
                for (int c = 0; c < cfg.n; ++c)
                    cfg.omega_matrix(r, c) = parse_complex_entry(w[r][c], "omega");
            }
            if (cfg.omega_matrix.hermitian_defect() > kHermitianTol)
                bad_field("omega", "matrix is not Hermitian within 1e-12");
            cfg.omega_kind = RunConfig::OmegaKind::Matrix;
        } else {
            bad_field("omega", "expected \"zero\", a number, or a matrix");
        }
    }

    const bool needs_problem = cfg.subcommand == "solve" || cfg.subcommand == "picard" ||
                               cfg.subcommand == "stability";
    auto need_expr = [&](const char* name, bool allow_t) {
        if (!j.contains(name)) bad_field(name, "required expression");
        return parse_expr_field(j[name], name, cfg.n, allow_t);
    };
    if (needs_problem) {
        cfg.mu = need_expr("mu", false);
        cfg.F = need_expr("F", true);
        cfg.G = need_expr("G", false);
        cfg.phi = need_expr("phi", false);
        if (cfg.subcommand == "solve" && cfg.F->uses_t())
            bad_field("F", "must not depend on t for subcommand solve");
    } else if (j.contains("phi")) {
        cfg.phi = parse_expr_field(j["phi"], "phi", cfg.n, false);
    }
    if (j.contains("reference"))
        cfg.reference = parse_expr_field(j["reference"], "reference", cfg.n, false);
    cfg.monotone_F = j.value("monotone_F", false);

    if (j.contains("t_range")) {
        const json& tr = j["t_range"];
        if (!tr.is_array() || tr.size() != 2 || !tr[0].is_number() || !tr[1].is_number())
            bad_field("t_range", "expected [lo, hi]");
        cfg.t_lo = tr[0].get<double>();
        cfg.t_hi = tr[1].get<double>();
        if (cfg.t_lo >= cfg.t_hi) bad_field("t_range", "lo < hi required");
    }

    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        if (!t.is_object()) bad_field("tolerances", "expected an object");
        cfg.solver.tolerance = t.value("solver", cfg.solver.tolerance);
        cfg.solver.max_newton = t.value("max_newton", cfg.solver.max_newton);
        cfg.solver.cg_rel_tol = t.value("cg_rel_tol", cfg.solver.cg_rel_tol);
        cfg.picard.sup_tol = t.value("picard_sup", cfg.picard.sup_tol);
        cfg.picard.cap_tol = t.value("cap", cfg.picard.cap_tol);
        cfg.picard.cap_delta = t.value("cap_delta", cfg.picard.cap_delta);
        cfg.picard.max_outer = t.value("max_outer", cfg.picard.max_outer);
        cfg.picard.band_margin = t.value("band_margin", cfg.picard.band_margin);
        if (cfg.solver.tolerance <= 0) bad_field("tolerances.solver", "must be > 0");
        if (cfg.picard.sup_tol <= 0) bad_field("tolerances.picard_sup", "must be > 0");
        if (cfg.picard.cap_delta <= 0) bad_field("tolerances.cap_delta", "must be > 0");
        if (cfg.picard.max_outer < 1) bad_field("tolerances.max_outer", "must be >= 1");
    }
    cfg.allow_acceleration = j.value("allow_acceleration", true);
    cfg.envelope_window = j.value("envelope_window", 0);
    if (cfg.envelope_window < 0) bad_field("envelope_window", "must be >= 0");
    cfg.cap_metric_in_trace = j.value("cap_metric_in_trace", true);

    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            bad_field("seed", "expected a nonnegative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    cfg.out_dir = j.value("out_dir", cfg.out_dir);

    if (cfg.subcommand == "capacity") {
        if (!j.contains("sets") || !j["sets"].is_array() || j["sets"].empty())
            bad_field("sets", "capacity requires a nonempty array of {center, radius}");
        for (size_t s = 0; s < j["sets"].size(); ++s) {
            const json& e = j["sets"][s];
            SetSpec spec;
            if (!e.is_object() || !e.contains("radius") || !e["radius"].is_number())
                bad_field("sets[" + std::to_string(s) + "].radius", "required number");
            spec.radius = e["radius"].get<double>();
            if (spec.radius <= 0) bad_field("sets[" + std::to_string(s) + "].radius", "> 0");
            if (e.contains("center")) {
                if (!e["center"].is_array())
                    bad_field("sets[" + std::to_string(s) + "].center", "expected array");
                for (const json& c : e["center"]) spec.center.push_back(c.get<double>());
                if (static_cast<int>(spec.center.size()) > 2 * cfg.n)
                    bad_field("sets[" + std::to_string(s) + "].center",
                              "at most 2n coordinates");
            }
            cfg.sets.push_back(spec);
        }
    }

    if (cfg.subcommand == "stability") {
        if (!j.contains("family")) bad_field("family", "stability requires F_j(t, z, j)");
        cfg.family = parse_expr_field(j["family"], "family", cfg.n, true, true);
        if (j.contains("indices")) {
            cfg.indices.clear();
            for (const json& e : j["indices"]) {
                const int idx = e.get<int>();
                if (idx < 1) bad_field("indices", "entries must be >= 1");
                cfg.indices.push_back(idx);
            }
            if (cfg.indices.empty()) bad_field("indices", "must be nonempty");
        }
        if (j.contains("deltas")) {
            cfg.deltas.clear();
            for (const json& e : j["deltas"]) {
                const double d = e.get<double>();
                if (d <= 0) bad_field("deltas", "entries must be > 0");
                cfg.deltas.push_back(d);
            }
        }
        cfg.stability_threshold = j.value("threshold", cfg.stability_threshold);
    }

    if (cfg.subcommand == "properties") {
        cfg.trials = j.value("trials", cfg.trials);
        if (cfg.trials < 1) bad_field("trials", "must be >= 1");
        cfg.band = j.value("band", cfg.band);
        if (cfg.band < 0) bad_field("band", "must be >= 0");
        if (j.contains("checks")) {
            cfg.checks.clear();
            for (const json& e : j["checks"]) cfg.checks.push_back(e.get<std::string>());
            static const std::vector<std::string> known{"comparison", "max_principle", "demailly",
                                                        "weak_convergence"};
            for (const auto& c : cfg.checks)
                if (std::find(known.begin(), known.end(), c) == known.end())
                    bad_field("checks", "unknown check '" + c + "'");
        }
    }

    // domain validation on a grid sample: mu >= 0 and the bound F <= G (1.4)
    if (needs_problem) {
        auto grid = make_grid(cfg.n, cfg.q);
        for (int i = 0; i < grid->num_interior(); ++i) {
            const double mv = cfg.mu->eval_spatial(grid->point(i));
            if (!(mv >= -1e-12) || !std::isfinite(mv))
                bad_field("mu", "must be a nonnegative density on the grid");
        }
        const int samples = 100;
        for (int s = 0; s < samples; ++s) {
            const double t = cfg.t_lo + (cfg.t_hi - cfg.t_lo) * s / (samples - 1);
            for (int i = 0; i < grid->num_interior(); ++i) {
                const auto z = grid->point(i);
                const double fv = cfg.F->eval(t, z);
                const double gv = cfg.G->eval_spatial(z);
                if (!(fv <= gv + 1e-12))
                    bad_field("F", "bound violation: F(t,z) > G(z) at t=" + std::to_string(t) +
                                       " (F=" + std::to_string(fv) + ", G=" + std::to_string(gv) +
                                       ")");
                if (cfg.family) {
                    for (int idx : cfg.indices) {
                        const double fj = cfg.family->eval(t, z, idx);
                        if (!(fj <= gv + 1e-12))
                            bad_field("family", "bound violation: F_j(t,z) > G(z) at j=" +
                                                    std::to_string(idx) +
                                                    ", t=" + std::to_string(t));
                    }
                }
            }
        }
    }
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    return parse_config_text(io::read_text(path));
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

HermitianField build_omega(const RunConfig& cfg, std::shared_ptr<const BallGrid> grid) {
    switch (cfg.omega_kind) {
        case RunConfig::OmegaKind::Zero: return HermitianField::zero(std::move(grid));
        case RunConfig::OmegaKind::ScaledIdentity: {
            HermitianMatrix w = HermitianMatrix::identity(cfg.n);
            w *= cfg.omega_scale;
            return HermitianField::constant(std::move(grid), w);
        }
        case RunConfig::OmegaKind::Matrix:
            return HermitianField::constant(std::move(grid), cfg.omega_matrix);
    }
    throw ConfigError("omega: unknown kind");
}

ProblemSpec build_problem(const RunConfig& cfg, std::shared_ptr<const BallGrid> grid) {
    ProblemSpec spec;
    spec.grid = grid;
    spec.m = cfg.m;
    spec.omega = build_omega(cfg, grid);
    spec.mu = MeasureDensity::from_function(
        grid, [&](std::span<const double> z) { return cfg.mu->eval_spatial(z); });
    const expr::Expression F = *cfg.F;
    spec.F.evaluate = [F](double t, std::span<const double> z) { return F.eval(t, z); };
    spec.F.bound = MeasureDensity::from_function(
        grid, [&](std::span<const double> z) { return cfg.G->eval_spatial(z); });
    spec.F.monotone = cfg.monotone_F;
    const expr::Expression phi = *cfg.phi;
    spec.phi = [phi](std::span<const double> x) { return phi.eval_spatial(x); };
    spec.tol = cfg.picard;
    spec.inner = cfg.solver;
    spec.allow_acceleration = cfg.allow_acceleration;
    spec.envelope_window = cfg.envelope_window;
    spec.cap_metric_in_trace = cfg.cap_metric_in_trace;
    return spec;
}

// max |u - reference| when a reference is configured, or against the
// canonical c^{1/m}(|z|^2 - 1) profile when the data admit one.
std::optional<double> reference_error(const RunConfig& cfg, const BallGrid& g,
                                      const MeasureDensity& f, const GridFunction& u) {
    if (cfg.reference) {
        double worst = 0.0;
        for (int i = 0; i < g.num_interior(); ++i)
            worst = std::max(worst,
                             std::abs(u.values[i] - cfg.reference->eval_spatial(g.point(i))));
        return worst;
    }
    if (cfg.omega_kind != RunConfig::OmegaKind::Zero) return std::nullopt;
    double lo = f.values.empty() ? 0.0 : f.values[0], hi = lo;
    for (double v : f.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo > 1e-12 * (1.0 + std::abs(hi))) return std::nullopt;
    for (int s = 0; s < g.num_sphere_points(); ++s)
        if (std::abs(cfg.phi->eval_spatial(g.sphere_point(s))) > 1e-12) return std::nullopt;
    const double c = std::pow(std::max(hi, 0.0), 1.0 / cfg.m);
    double worst = 0.0;
    for (int i = 0; i < g.num_interior(); ++i) {
        auto p = g.point(i);
        double r2 = 0.0;
        for (double x : p) r2 += x * x;
        worst = std::max(worst, std::abs(u.values[i] - c * (r2 - 1.0)));
    }
    return worst;
}

struct CsvBuilder {
    std::string text;
    explicit CsvBuilder(const std::string& header) : text(header + "\n") {}
    void row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const auto& c : cells) {
            if (!first) text += ',';
            text += c;
            first = false;
        }
        text += '\n';
    }
};

int cmd_solve(const RunConfig& cfg, const fs::path& out) {
    auto grid = make_grid(cfg.n, cfg.q);
    const HermitianField omega = build_omega(cfg, grid);
    MeasureDensity f = MeasureDensity::from_function(grid, [&](std::span<const double> z) {
        return cfg.F->eval(0.0, z) * cfg.mu->eval_spatial(z);
    });
    const expr::Expression phi = *cfg.phi;
    const SolveReport rep = solve_dirichlet(
        f, [phi](std::span<const double> x) { return phi.eval_spatial(x); }, omega, cfg.m,
        cfg.solver);

    io::write_field_csv((out / "solution.csv").string(), *grid, rep.solution.values);
    io::write_pgm_slice((out / "solution.pgm").string(), *grid, rep.solution.values);
    io::write_text((out / "report.json").string(), solve_report_json(rep) + "\n");

    std::string summary = "solve: converged=" + std::to_string(rep.converged ? 1 : 0) +
                          " iterations=" + std::to_string(rep.iterations) +
                          " residual=" + fmt(rep.residual) +
                          " violations=" + std::to_string(rep.violations);
    if (auto err = reference_error(cfg, *grid, f, rep.solution))
        summary += " max_error_vs_reference=" + fmt(*err);
    std::puts(summary.c_str());
    return rep.converged ? 0 : 1;
}

int cmd_picard(const RunConfig& cfg, const fs::path& out) {
    auto grid = make_grid(cfg.n, cfg.q);
    const ProblemSpec spec = build_problem(cfg, grid);
    auto [state, reports] = picard_run(spec);

    CsvBuilder trace("j,sup_step,residual,cap_metric,bracket_gap,wall_time_s");
    for (size_t k = 0; k < state.sup_steps.size(); ++k)
        trace.row({std::to_string(k + 1), fmt(state.sup_steps[k]), fmt(state.residuals[k]),
                   fmt(state.cap_metrics[k]), fmt(state.bracket_gaps[k]),
                   fmt(state.wall_times[k])});
    io::write_text((out / "trace.csv").string(), trace.text);
    if (!state.iterates.empty()) {
        io::write_field_csv((out / "final.csv").string(), *grid,
                            state.iterates.back().values);
        io::write_pgm_slice((out / "final.pgm").string(), *grid, state.iterates.back().values);
    }

    const bool sandwich = sandwich_check(state, state.v, state.eps_grid);
    json rep;
    rep["converged"] = state.converged;
    rep["outer_iterations"] = state.sup_steps.size();
    rep["terminal_residual"] = state.terminal_residual;
    rep["accelerated"] = state.accelerated;
    rep["sandwich_ok"] = sandwich;
    rep["bracket_contract_ok"] = state.bracket_contract_ok;
    rep["eps_grid"] = state.eps_grid;
    io::write_text((out / "report.json").string(), rep.dump(2) + "\n");

    std::string summary = "picard: converged=" + std::to_string(state.converged ? 1 : 0) +
                          " outer_iterations=" + std::to_string(state.sup_steps.size()) +
                          " terminal_residual=" + fmt(state.terminal_residual) +
                          " sandwich_ok=" + std::to_string(sandwich ? 1 : 0) +
                          " accelerated=" + std::to_string(state.accelerated ? 1 : 0);
    std::puts(summary.c_str());
    return state.converged ? 0 : 1;
}

int cmd_capacity(const RunConfig& cfg, const fs::path& out) {
    auto grid = make_grid(cfg.n, cfg.q);
    const HermitianField omega = build_omega(cfg, grid);
    const HermitianField zero = HermitianField::zero(grid);

    CsvBuilder csv("set_id,kind,value,cm_value,ratio");
    double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin;
    int used = 0;
    for (size_t s = 0; s < cfg.sets.size(); ++s) {
        const GridSet K = GridSet::ball(grid, cfg.sets[s].center, cfg.sets[s].radius);
        if (K.count() == 0) bad_field("sets[" + std::to_string(s) + "]", "contains no grid point");
        const CapacityEstimate cap = cap_estimate(K, omega, cfg.m);
        const CapacityEstimate cm = cap_estimate(K, zero, cfg.m);
        double ratio = std::numeric_limits<double>::quiet_NaN();
        if (cap.value > 0.0 || cm.value > 0.0) {
            ratio = cm.value / cap.value;
            rmin = std::min(rmin, ratio);
            rmax = std::max(rmax, ratio);
            ++used;
        }
        csv.row({std::to_string(s), "relative-extremal", fmt(cap.value), fmt(cm.value),
                 fmt(ratio)});
        io::write_field_csv((out / ("extremal_" + std::to_string(s) + ".csv")).string(), *grid,
                            cap.extremal.values);
    }
    io::write_text((out / "capacity.csv").string(), csv.text);

    json rep;
    rep["sets"] = cfg.sets.size();
    if (used > 0) {
        rep["ratio_min"] = rmin;
        rep["ratio_max"] = rmax;
    }
    io::write_text((out / "report.json").string(), rep.dump(2) + "\n");
    std::string summary = "capacity: sets=" + std::to_string(cfg.sets.size());
    if (used > 0) summary += " ratio_min=" + fmt(rmin) + " ratio_max=" + fmt(rmax);
    std::puts(summary.c_str());
    return 0;
}

int cmd_properties(const RunConfig& cfg, const fs::path& out) {
    auto grid = make_grid(cfg.n, cfg.q);
    const HermitianField omega = build_omega(cfg, grid);
    std::mt19937_64 rng(cfg.seed);

    struct Agg {
        PropertyReport merged;
        bool seen = false;
        void add(const PropertyReport& r) {
            if (!seen) {
                merged = r;
                seen = true;
                return;
            }
            merged.trials += r.trials;
            merged.failures += r.failures;
            if (std::abs(r.worst_violation) > std::abs(merged.worst_violation)) {
                merged.worst_violation = r.worst_violation;
                merged.worst_point = r.worst_point;
            }
            merged.applicable = merged.applicable || r.applicable;
            if (!r.note.empty()) merged.note = r.note;
        }
    };
    std::vector<PropertyReport> results;

    for (const std::string& check : cfg.checks) {
        Agg agg;
        if (check == "comparison") {
            for (int trial = 0; trial < cfg.trials; ++trial) {
                auto [u, v] = random_ordered_pair(grid, omega, cfg.m, rng);
                agg.add(check_comparison(u, v, omega, cfg.m, 1e-9));
            }
        } else if (check == "max_principle" || check == "demailly") {
            GridFunction canon_u = GridFunction::from_function(grid, [](std::span<const double> z) {
                double r2 = 0.0;
                for (double x : z) r2 += x * x;
                return r2 - 1.0;
            });
            GridFunction canon_v = GridFunction::from_function(
                grid, [](std::span<const double>) { return -0.5; });
            if (check == "max_principle")
                agg.add(check_max_principle(canon_u, canon_v, omega, cfg.m, cfg.band));
            else
                agg.add(check_demailly(canon_u, canon_v, omega, cfg.m, cfg.band));
            for (int trial = 0; trial < cfg.trials; ++trial) {
                const GridFunction u = random_admissible(grid, omega, cfg.m, rng);
                const GridFunction v = random_admissible(grid, omega, cfg.m, rng);
                agg.add(check == "max_principle"
                            ? check_max_principle(u, v, omega, cfg.m, cfg.band)
                            : check_demailly(u, v, omega, cfg.m, cfg.band));
            }
        } else if (check == "weak_convergence") {
            std::vector<GridFunction> seq;
            for (int jj : {25, 50, 100})
                seq.push_back(GridFunction::from_function(grid, [jj](std::span<const double> z) {
                    double r2 = 0.0;
                    for (double x : z) r2 += x * x;
                    return (1.0 + 1.0 / jj) * (r2 - 1.0);
                }));
            const GridFunction limit =
                GridFunction::from_function(grid, [](std::span<const double> z) {
                    double r2 = 0.0;
                    for (double x : z) r2 += x * x;
                    return r2 - 1.0;
                });
            const std::vector<GridFunction> chis = default_test_functions(grid);
            agg.add(check_weak_convergence(seq, limit, omega, cfg.m, chis, 0.025));
        }
        if (agg.seen) results.push_back(agg.merged);
    }

    json arr = json::array();
    bool any_fail = false;
    for (const PropertyReport& r : results) {
        json e;
        e["property"] = r.property;
        e["trials"] = r.trials;
        e["failures"] = r.failures;
        e["worst_violation"] = r.worst_violation;
        e["worst_point"] = r.worst_point;
        e["tolerance"] = r.tolerance;
        e["applicable"] = r.applicable;
        e["pass"] = r.pass();
        e["note"] = r.note;
        arr.push_back(e);
        if (r.applicable && !r.pass()) any_fail = true;
        std::string line = "property " + r.property + ": " + (r.pass() ? "pass" : "FAIL") +
                           " trials=" + std::to_string(r.trials) +
                           " failures=" + std::to_string(r.failures);
        std::puts(line.c_str());
    }
    io::write_text((out / "properties.json").string(), arr.dump(2) + "\n");
    return any_fail ? 1 : 0;
}

int cmd_stability(const RunConfig& cfg, const fs::path& out) {
    auto grid = make_grid(cfg.n, cfg.q);
    StabilityExperiment exp;
    exp.base = build_problem(cfg, grid);
    const expr::Expression fam = *cfg.family;
    const MeasureDensity bound = exp.base.F.bound;
    const bool monotone = cfg.monotone_F;
    exp.family = [fam, bound, monotone](int jj) {
        SourceFunction F;
        F.evaluate = [fam, jj](double t, std::span<const double> z) {
            return fam.eval(t, z, jj);
        };
        F.bound = bound;
        F.monotone = monotone;
        return F;
    };
    exp.indices = cfg.indices;
    exp.deltas = cfg.deltas;
    exp.threshold = cfg.stability_threshold;
    const StabilityReport rep = run_stability(exp);

    CsvBuilder csv("j,delta,cap_metric,sup_diff,iterations");
    for (const StabilityRow& r : rep.rows)
        csv.row({std::to_string(r.j), fmt(r.delta), fmt(r.cap_metric), fmt(r.sup_diff),
                 std::to_string(r.iterations)});
    io::write_text((out / "stability.csv").string(), csv.text);

    json jrep;
    jrep["complete"] = rep.complete;
    jrep["threshold_met"] = rep.threshold_met;
    jrep["envelope_decreasing"] = rep.envelope_decreasing;
    jrep["sandwich_ok"] = rep.sandwich_ok;
    io::write_text((out / "report.json").string(), jrep.dump(2) + "\n");

    std::string summary = "stability: complete=" + std::to_string(rep.complete ? 1 : 0) +
                          " threshold_met=" + std::to_string(rep.threshold_met ? 1 : 0) +
                          " envelope_decreasing=" +
                          std::to_string(rep.envelope_decreasing ? 1 : 0) +
                          " sandwich_ok=" + std::to_string(rep.sandwich_ok ? 1 : 0);
    std::puts(summary.c_str());
    return (rep.complete && rep.threshold_met && rep.sandwich_ok) ? 0 : 1;
}

} // namespace

int run(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path out(cfg.out_dir);
    fs::create_directories(out);
    const fs::path manifest = out / "manifest.json";
    if (fs::exists(manifest) && !cfg.force)
        throw ConfigError("output directory already contains manifest.json; pass --force to "
                          "overwrite");

    int status = 0;
    if (cfg.subcommand == "solve")
        status = cmd_solve(cfg, out);
    else if (cfg.subcommand == "picard")
        status = cmd_picard(cfg, out);
    else if (cfg.subcommand == "capacity")
        status = cmd_capacity(cfg, out);
    else if (cfg.subcommand == "properties")
        status = cmd_properties(cfg, out);
    else if (cfg.subcommand == "stability")
        status = cmd_stability(cfg, out);
    else
        throw ConfigError("unknown subcommand: " + cfg.subcommand);

    json m;
    m["version"] = "hessianlab 0.1.0";
    m["subcommand"] = cfg.subcommand;
    m["seed"] = cfg.seed;
    m["exit_status"] = status;
    m["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
        m["config"] = json::parse(cfg.config_echo);
    } catch (...) {
        m["config"] = cfg.config_echo;
    }
    io::write_text(manifest.string(), m.dump(2) + "\n");
    return status;
}

} // namespace hessianlab::cli

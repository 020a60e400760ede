#pragma once

#include <optional>

#include "hessianlab/capacity.hpp"
#include "hessianlab/solver.hpp"

namespace hessianlab {

// Right-hand side F(t,z) with its dominating bound G (per-point density) and
// the user-declared monotonicity flag (F non-decreasing in t).
struct SourceFunction {
    std::function<double(double, std::span<const double>)> evaluate;
    MeasureDensity bound; // G
    bool monotone = false;
};

// Samples evaluate(t, z) over 100 t-values in [t_lo, t_hi] at every grid point
// and checks F <= G + 1e-12 and F >= -1e-12. Throws ValidationError.
void validate_source_bound(const SourceFunction& F, double t_lo, double t_hi);

struct PicardTolerances {
    double sup_tol = 1e-6;    // primary stopping rule: sup-norm step
    double cap_tol = 1e-3;    // secondary: capacity metric of the step
    double cap_delta = 0.05;  // delta for the capacity metric
    int max_outer = 100;
    double band_margin = 1.0; // margin added to the sandwich band for (1.4) validation
};

struct ProblemSpec {
    std::shared_ptr<const BallGrid> grid;
    int m = 1;
    HermitianField omega;
    MeasureDensity mu;
    SourceFunction F;
    BoundaryFn phi;
    std::optional<GridFunction> subsolution; // else auto-constructed
    PicardTolerances tol;
    SolverConfig inner;
    bool allow_acceleration = true; // averaging when step sizes stall
    int envelope_window = 0;        // >0 enables bracket diagnostics
    bool cap_metric_in_trace = true;
};

struct PicardState {
    std::vector<GridFunction> iterates; // u_0 .. u_J
    std::vector<double> sup_steps;
    std::vector<double> residuals;      // |H(u_{j+1}) - F(u_{j+1}) mu|_inf per iterate
    std::vector<double> cap_metrics;
    std::vector<double> bracket_gaps;   // sup(v1 - v2); NaN unless envelopes enabled
    std::vector<double> wall_times;     // cumulative seconds per outer iteration
    GridFunction u0, v;                 // sandwich bounds u0 and v (v + u0 <= u_j <= u0)
    MeasureDensity phi1, phi2;          // envelope fields at the last window
    std::optional<GridFunction> bracket_hi, bracket_lo; // v1, v2 at the last window
    double eps_grid = 0.0;              // 10 (solver tol + h^2)
    bool bracket_contract_ok = true;    // v2 - eps <= u_{j+1} <= v1 + eps at every window
    bool converged = false;
    bool accelerated = false;
    double terminal_residual = std::numeric_limits<double>::infinity();
};

// v = c (|z|^2 - 1) with c = (max G mu)^{1/m}: H_m(v) = c^m >= G mu, v = 0 on the sphere.
GridFunction build_subsolution(const ProblemSpec& spec);

// Outer iteration: u_0 = h solving H(h)=0, then H(u_{j+1}) = F(u_j, z) mu until
// the sup-norm step or the capacity metric falls under tolerance.
std::pair<PicardState, std::vector<SolveReport>> picard_run(const ProblemSpec& spec);

// v + u0 - eps <= u_j <= u0 + eps for every recorded iterate.
bool sandwich_check(const PicardState& st, const GridFunction& v, double eps_grid);

// Envelope Dirichlet brackets over the last `window` iterates: phi1 = inf F,
// phi2 = sup F (times mu); returns (v1, v2) solving H(v1)=phi1 mu, H(v2)=phi2 mu.
std::pair<GridFunction, GridFunction> envelope_brackets(const PicardState& st,
                                                        const ProblemSpec& spec, int window);

} // namespace hessianlab

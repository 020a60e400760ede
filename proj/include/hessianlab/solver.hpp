#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "hessianlab/forms.hpp"
#include "hessianlab/sparse.hpp"

namespace hessianlab {

struct SolverConfig {
    double tolerance = 1e-8;   // residual max-norm on the sigma_m density
    int max_newton = 200;
    double damping_min = 0.1;
    double damping_max = 1.0;
    double cone_slack = 1e-10; // closed-cone safeguard slack
    bool m1_linear_shortcut = true;
    double cg_rel_tol = 1e-10;
    int cg_max_iter = 20000;
    int gs_sweeps = 50; // fallback block size when damping underflows

    enum class Seed { Linear, Zero, RandomPerturbed };
    Seed seed = Seed::Linear;
    std::uint64_t seed_rng = 12345;

    void validate() const;
};

struct SolveReport {
    GridFunction solution;
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
    int violations = 0; // points outside the closed cone at the returned iterate
    double wall_time_s = 0.0;
    bool converged = false;
    bool used_fallback = false;
    double grid_h = 0.0;
    int n = 0, m = 0;
};

// JSON with exactly the documented fields:
// converged, iterations, residual, violations, wall_time_s, grid_h, n, m.
std::string solve_report_json(const SolveReport& r);

// Dirichlet solve: find admissible u with sigma_m density of (omega + Hess u)
// equal to f and u = phi on the sphere. Linear trace seed, damped Newton with
// cone safeguard, pointwise nonlinear Gauss-Seidel fallback.
SolveReport solve_dirichlet(const MeasureDensity& f, const BoundaryFn& phi,
                            const HermitianField& omega, int m, const SolverConfig& cfg = {});

// Homogeneous solve (f = 0): the Picard iteration seed u0 = h.
SolveReport max_principle_solve(const BoundaryFn& phi, const HermitianField& omega, int m,
                                const SolverConfig& cfg = {});

// --- internals shared with the capacity obstacle solver ---

// Hessian stencil coefficient of the center value: Hess(u)_i depends affinely
// on u_i with matrix slope B_i.
HermitianMatrix center_hessian_coefficient(const BallGrid& g, int i);

struct ScalarRoot {
    bool ok = false;
    double t = 0.0;
};

// Largest t on the closed Gamma_m branch with
// sigma_m(lambda(M + (t - t0) B)) = target (unnormalized sigma_m).
ScalarRoot largest_cone_root(const HermitianMatrix& M, const HermitianMatrix& B, double t0,
                             double target, int m, double slack);

// Assembled Jacobian d(density)/du for a gradient field G, pattern cached.
class HessianLinearizer {
public:
    explicit HessianLinearizer(std::shared_ptr<const BallGrid> g);
    // A[p][q] = scale * tr(G_p * C_{p,q}) over interior stencil nodes q
    void refill(const std::vector<HermitianMatrix>& G, double scale);
    const Csr& matrix() const { return A_; }
    const Csr& transpose() const { return At_; }

private:
    struct Op {
        std::int32_t slot;
        std::int8_t j, k;
        cplx c; // folded coefficient: contribution = Re(c * G(k,j))
    };
    std::shared_ptr<const BallGrid> grid_;
    Csr A_, At_;
    std::vector<std::int32_t> perm_;
    std::vector<Op> ops_;
    std::vector<std::int32_t> ops_rowptr_;
};

} // namespace hessianlab

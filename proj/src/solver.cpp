#include "hessianlab/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "json.hpp"

namespace hessianlab {

void SolverConfig::validate() const {
    if (tolerance <= 0.0) throw ConfigError("solver: tolerance must be > 0");
    if (damping_min <= 0.0 || damping_max > 1.0 || damping_min > damping_max)
        throw ConfigError("solver: damping range must satisfy 0 < min <= max <= 1");
    if (max_newton < 1) throw ConfigError("solver: max_newton must be >= 1");
}

namespace {

// Complex coefficient carried by the cross pair (a,b) into the Hessian entry
// (a/2, b/2): quarter weights from the d2/dz dzbar combination.
cplx pair_coefficient(int a, int b) {
    const bool ax = (a % 2 == 0), bx = (b % 2 == 0);
    if (ax && bx) return {0.25, 0.0};
    if (!ax && !bx) return {0.25, 0.0};
    if (ax && !bx) return {0.0, 0.25};
    return {0.0, -0.25};
}

} // namespace

HermitianMatrix center_hessian_coefficient(const BallGrid& g, int i) {
    const int n = g.complex_dim();
    HermitianMatrix B(n);
    for (int d = 0; d < 2 * n; ++d) {
        const AxisStencil& st = g.axis(i, d);
        B(d / 2, d / 2) += 0.25 * (-2.0 / (st.minus.length * st.plus.length));
    }
    for (int pi = 0; pi < g.num_pairs(); ++pi) {
        const auto [a, b] = g.pair_axes(pi);
        const cplx c = pair_coefficient(a, b);
        const int j = a / 2, k = b / 2;
        for (const CrossNode& nd : g.cross_nodes(g.cross(i, pi))) {
            if (nd.neighbor == i) {
                B(j, k) += c * nd.weight;
                B(k, j) += std::conj(c) * nd.weight;
            }
        }
    }
    return B;
}

ScalarRoot largest_cone_root(const HermitianMatrix& M, const HermitianMatrix& B, double t0,
                             double target, int m, double slack) {
    if (m == 1) {
        const double trB = B.trace_real();
        if (std::abs(trB) < 1e-300) return {};
        return {true, t0 + (target - M.trace_real()) / trB};
    }
    auto spectrum = [&](double t) {
        HermitianMatrix W = M;
        HermitianMatrix S = B;
        S *= (t - t0);
        W += S;
        return eigenvalues(W);
    };
    auto good = [&](const EigenvalueVector& lam) {
        return in_gamma_m(lam, m, false, slack) && sigma_k(lam, m) >= target;
    };
    double step = 0.5 * std::max(1.0, std::abs(t0));
    double lo = t0;
    int tries = 0;
    while (!good(spectrum(lo)) && tries++ < 120) {
        lo -= step;
        step *= 1.6;
    }
    if (!good(spectrum(lo))) return {};
    step = 0.5 * std::max(1.0, std::abs(lo));
    double hi = lo + step;
    tries = 0;
    while (good(spectrum(hi)) && tries++ < 120) {
        lo = hi;
        hi += step;
        step *= 1.6;
    }
    if (good(spectrum(hi))) return {};

    // bisection on the cone-branch predicate, accelerated by Newton steps on
    // sigma_m (derivative via the complementary-spectrum gradient pairing)
    double t = lo;
    for (int it = 0; it < 120 && (hi - lo) > 1e-14 * (1.0 + std::abs(lo)); ++it) {
        double cand = std::numeric_limits<double>::quiet_NaN();
        if (it % 2 == 1) {
            // Newton from the admissible end: sigma_m' (t) = tr(G B)
            HermitianMatrix W = M;
            HermitianMatrix S = B;
            S *= (lo - t0);
            W += S;
            const HermitianMatrix G = sigma_m_gradient(W, m);
            cplx tr = 0.0;
            for (int j = 0; j < W.dim(); ++j)
                for (int k = 0; k < W.dim(); ++k) tr += G(j, k) * B(k, j);
            const double deriv = tr.real();
            if (std::abs(deriv) > 1e-300) {
                const double fx = sigma_k(spectrum(lo), m) - target;
                cand = lo - fx / deriv;
            }
        }
        if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
        if (good(spectrum(cand)))
            lo = cand;
        else
            hi = cand;
        t = lo;
    }
    return {true, t};
}

HessianLinearizer::HessianLinearizer(std::shared_ptr<const BallGrid> g) : grid_(std::move(g)) {
    const BallGrid& gr = *grid_;
    const int N = gr.num_interior();
    const int n = gr.complex_dim();

    struct Contrib {
        std::int32_t col;
        std::int8_t j, k;
        cplx c;
    };
    std::vector<Contrib> row;
    A_.rows = A_.cols = N;
    A_.rowptr.assign(N + 1, 0);
    ops_rowptr_.assign(N + 1, 0);

    std::vector<std::vector<Contrib>> all(N);
    for (int i = 0; i < N; ++i) {
        row.clear();
        for (int d = 0; d < 2 * n; ++d) {
            const AxisStencil& st = gr.axis(i, d);
            const double al = st.minus.length, ar = st.plus.length;
            const std::int8_t j = static_cast<std::int8_t>(d / 2);
            row.push_back({i, j, j, cplx(0.25 * (-2.0 / (al * ar)), 0.0)});
            if (!st.minus.is_sphere())
                row.push_back({st.minus.neighbor, j, j, cplx(0.25 * 2.0 / (al * (al + ar)), 0.0)});
            if (!st.plus.is_sphere())
                row.push_back({st.plus.neighbor, j, j, cplx(0.25 * 2.0 / (ar * (al + ar)), 0.0)});
        }
        for (int pi = 0; pi < gr.num_pairs(); ++pi) {
            const auto [a, b] = gr.pair_axes(pi);
            const cplx c2 = 2.0 * pair_coefficient(a, b); // off-diagonal fold factor
            const std::int8_t j = static_cast<std::int8_t>(a / 2);
            const std::int8_t k = static_cast<std::int8_t>(b / 2);
            for (const CrossNode& nd : gr.cross_nodes(gr.cross(i, pi)))
                if (nd.neighbor >= 0) row.push_back({nd.neighbor, j, k, c2 * nd.weight});
        }
        all[i] = row;
    }

    // CSR pattern: sorted unique columns per row
    for (int i = 0; i < N; ++i) {
        auto& r = all[i];
        std::sort(r.begin(), r.end(), [](const Contrib& x, const Contrib& y) {
            return x.col < y.col;
        });
        int uniq = 0;
        for (size_t t = 0; t < r.size(); ++t)
            if (t == 0 || r[t].col != r[t - 1].col) ++uniq;
        A_.rowptr[i + 1] = A_.rowptr[i] + uniq;
        ops_rowptr_[i + 1] = ops_rowptr_[i] + static_cast<std::int32_t>(r.size());
    }
    A_.col.resize(A_.rowptr[N]);
    A_.val.assign(A_.rowptr[N], 0.0);
    ops_.resize(ops_rowptr_[N]);
    for (int i = 0; i < N; ++i) {
        const auto& r = all[i];
        std::int32_t slot = A_.rowptr[i] - 1;
        std::int32_t op = ops_rowptr_[i];
        for (size_t t = 0; t < r.size(); ++t) {
            if (t == 0 || r[t].col != r[t - 1].col) A_.col[++slot] = r[t].col;
            ops_[op++] = Op{slot, r[t].j, r[t].k, r[t].c};
        }
    }
    At_ = transpose_pattern(A_, perm_);
}

void HessianLinearizer::refill(const std::vector<HermitianMatrix>& G, double scale) {
    const int N = A_.rows;
    std::fill(A_.val.begin(), A_.val.end(), 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < N; ++i) {
        for (std::int32_t t = ops_rowptr_[i]; t < ops_rowptr_[i + 1]; ++t) {
            const Op& op = ops_[t];
            A_.val[op.slot] += scale * (op.c * G[i](op.k, op.j)).real();
        }
    }
    const auto nnz = static_cast<std::int64_t>(A_.val.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < nnz; ++t) At_.val[perm_[t]] = A_.val[t];
}

namespace {

struct Evaluation {
    std::vector<double> density;
    std::vector<std::uint8_t> mask;
    double max_residual = 0.0;
    int violations = 0;
};

Evaluation evaluate(const BallGrid& g, const GridFunction& u, std::span<const double> bv,
                    const HermitianField& omega, int m, const std::vector<double>& f,
                    double slack, std::vector<HermitianMatrix>* gradient) {
    const int N = g.num_interior();
    const double norm = binomial(g.complex_dim(), m);
    Evaluation ev;
    ev.density.resize(N);
    ev.mask.resize(N);
    if (gradient) gradient->assign(N, HermitianMatrix(g.complex_dim()));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < N; ++i) {
        HermitianMatrix W = hessian_at_point(g, u, bv, i);
        W += omega.m[i];
        const EigenvalueVector lam = eigenvalues(W);
        ev.density[i] = sigma_k(lam, m) / norm;
        ev.mask[i] = in_gamma_m(lam, m, false, slack) ? 1 : 0;
        if (gradient) (*gradient)[i] = sigma_m_gradient(W, m);
    }
    for (int i = 0; i < N; ++i) {
        ev.max_residual = std::max(ev.max_residual, std::abs(ev.density[i] - f[i]));
        if (!ev.mask[i]) ++ev.violations;
    }
    return ev;
}

void gauss_seidel_sweeps(const BallGrid& g, GridFunction& u, std::span<const double> bv,
                         const HermitianField& omega, int m, const std::vector<double>& f,
                         const std::vector<HermitianMatrix>& centerB, double slack, int sweeps) {
    const int N = g.num_interior();
    const double norm = binomial(g.complex_dim(), m);
    for (int s = 0; s < sweeps; ++s) {
        for (int i = 0; i < N; ++i) {
            HermitianMatrix M = hessian_at_point(g, u, bv, i);
            M += omega.m[i];
            const ScalarRoot r =
                largest_cone_root(M, centerB[i], u.values[i], f[i] * norm, m, slack);
            if (r.ok && std::isfinite(r.t)) u.values[i] = r.t;
        }
    }
}

} // namespace

SolveReport solve_dirichlet(const MeasureDensity& f_in, const BoundaryFn& phi,
                            const HermitianField& omega, int m, const SolverConfig& cfg) {
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();
    auto grid = f_in.grid;
    const BallGrid& g = *grid;
    const int n = g.complex_dim();
    const int N = g.num_interior();
    if (m < 1 || m > n) throw ArgumentError("solve_dirichlet: need 1 <= m <= n");
    if (!omega.grid->same_layout(g)) throw ArgumentError("solve_dirichlet: omega grid mismatch");
    if (!phi) throw ArgumentError("solve_dirichlet: boundary datum required");

    std::vector<double> f(N);
    for (int i = 0; i < N; ++i) {
        if (f_in.values[i] < -1e-10)
            throw ArgumentError("solve_dirichlet: f is negative at point " + std::to_string(i));
        f[i] = std::max(f_in.values[i], 0.0);
    }

    HessianLinearizer lin(grid);

    // boundary values are fixed by phi for the whole solve
    GridFunction u = GridFunction::zeros(grid);
    u.boundary = phi;
    const std::vector<double> bv = boundary_values(u);

    // linear trace seed: density_1(u) = f^{1/m}
    auto solve_linear_trace = [&](const std::vector<double>& target) {
        const HermitianField h0 = complex_hessian(u); // u currently zero interior
        std::vector<double> rhs(N);
        for (int i = 0; i < N; ++i)
            rhs[i] = target[i] - (omega.m[i].trace_real() + h0.m[i].trace_real()) / n;
        std::vector<HermitianMatrix> eye(N, HermitianMatrix::identity(n));
        lin.refill(eye, 1.0 / n);
        std::vector<double> x;
        cgls_solve(lin.matrix(), lin.transpose(), rhs, x, cfg.cg_rel_tol, cfg.cg_max_iter);
        return x;
    };

    if (cfg.seed != SolverConfig::Seed::Zero) {
        std::vector<double> target(N);
        for (int i = 0; i < N; ++i) target[i] = std::pow(f[i], 1.0 / m);
        u.values = solve_linear_trace(target);
        if (cfg.seed == SolverConfig::Seed::RandomPerturbed) {
            std::mt19937_64 rng(cfg.seed_rng);
            double scale = 0.0;
            for (double v : u.values) scale = std::max(scale, std::abs(v));
            std::uniform_real_distribution<double> dist(-0.01 * (1.0 + scale),
                                                        0.01 * (1.0 + scale));
            for (double& v : u.values) v += dist(rng);
        }
    }

    SolveReport rep;
    rep.grid_h = g.spacing();
    rep.n = n;
    rep.m = m;

    std::vector<HermitianMatrix> centerB;
    std::vector<HermitianMatrix> G;
    std::vector<double> delta;
    const double norm = binomial(n, m);
    // boundary-of-cone solutions carry eigenvalue noise at the scale of the
    // residual tolerance; the violation count must not be stricter than that
    const double mask_slack = std::max(cfg.cone_slack, cfg.tolerance);

    for (int iter = 0;; ++iter) {
        Evaluation ev = evaluate(g, u, bv, omega, m, f, mask_slack, &G);
        rep.residual = ev.max_residual;
        rep.violations = ev.violations;
        rep.iterations = iter;
        if (ev.max_residual <= cfg.tolerance && ev.violations == 0) {
            rep.converged = true;
            break;
        }
        if (iter >= cfg.max_newton) break;

        bool stepped = false;
        // Levenberg-style shift when the linearization degenerates on the
        // cone boundary (sigma_{m-1} of the complementary spectrum ~ 0)
        double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
        for (int i = 0; i < N; ++i) {
            const EigenvalueVector ge = eigenvalues(G[i]);
            gmin = std::min(gmin, ge[0]);
            gmax = std::max(gmax, ge[n - 1]);
        }
        if (gmin < 1e-8 * std::max(1.0, gmax)) {
            HermitianMatrix shift = HermitianMatrix::identity(n);
            shift *= 1e-3 * std::max(1.0, gmax);
            for (int i = 0; i < N; ++i) G[i] += shift;
        }
        lin.refill(G, 1.0 / norm);
        std::vector<double> rhs(N);
        for (int i = 0; i < N; ++i) rhs[i] = f[i] - ev.density[i];
        const CglsResult cg =
            cgls_solve(lin.matrix(), lin.transpose(), rhs, delta, cfg.cg_rel_tol, cfg.cg_max_iter);
        bool delta_ok = cg.iterations > 0;
        for (double d : delta)
            if (!std::isfinite(d)) delta_ok = false;

        if (delta_ok) {
            double alpha = cfg.damping_max;
            GridFunction u_try = u;
            while (alpha >= cfg.damping_min * (1.0 - 1e-12)) {
                for (int i = 0; i < N; ++i) u_try.values[i] = u.values[i] + alpha * delta[i];
                const Evaluation et =
                    evaluate(g, u_try, bv, omega, m, f, mask_slack, nullptr);
                const bool accept =
                    (ev.violations == 0)
                        ? (et.violations == 0 &&
                           (et.max_residual <= ev.max_residual * (1.0 - 1e-4 * alpha) ||
                            et.max_residual <= cfg.tolerance))
                        : (et.violations < ev.violations);
                if (accept) {
                    u.values = u_try.values;
                    stepped = true;
                    break;
                }
                alpha *= 0.5;
            }
        }
        if (!stepped) {
            // damping underflow: pointwise nonlinear Gauss-Seidel block
            if (centerB.empty()) {
                centerB.resize(N, HermitianMatrix(n));
                for (int i = 0; i < N; ++i) centerB[i] = center_hessian_coefficient(g, i);
            }
            gauss_seidel_sweeps(g, u, bv, omega, m, f, centerB, mask_slack, cfg.gs_sweeps);
            rep.used_fallback = true;
        }
    }

    rep.solution = std::move(u);
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

SolveReport max_principle_solve(const BoundaryFn& phi, const HermitianField& omega, int m,
                                const SolverConfig& cfg) {
    return solve_dirichlet(MeasureDensity::constant(omega.grid, 0.0), phi, omega, m, cfg);
}

std::string solve_report_json(const SolveReport& r) {
    nlohmann::json j;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["residual"] = r.residual;
    j["violations"] = r.violations;
    j["wall_time_s"] = r.wall_time_s;
    j["grid_h"] = r.grid_h;
    j["n"] = r.n;
    j["m"] = r.m;
    return j.dump(2);
}

} // namespace hessianlab

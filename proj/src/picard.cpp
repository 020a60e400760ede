#include "hessianlab/picard.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace hessianlab {

void validate_source_bound(const SourceFunction& F, double t_lo, double t_hi) {
    const BallGrid& g = *F.bound.grid;
    const int samples = 100;
    for (int s = 0; s < samples; ++s) {
        const double t = t_lo + (t_hi - t_lo) * s / (samples - 1);
        for (int i = 0; i < g.num_interior(); ++i) {
            const double f = F.evaluate(t, g.point(i));
            if (!std::isfinite(f))
                throw ValidationError("source function not finite at t=" + std::to_string(t));
            if (f < -1e-12)
                throw ValidationError("source function negative at t=" + std::to_string(t));
            if (f > F.bound.values[i] + 1e-12)
                throw ValidationError("bound violated: F(t,z) > G(z) at t=" + std::to_string(t) +
                                      ", point " + std::to_string(i) + " (F=" + std::to_string(f) +
                                      ", G=" + std::to_string(F.bound.values[i]) + ")");
        }
    }
}

GridFunction build_subsolution(const ProblemSpec& spec) {
    const MeasureDensity gmu = spec.F.bound * spec.mu;
    double peak = 0.0;
    for (double v : gmu.values) {
        if (!std::isfinite(v)) throw ConfigError("build_subsolution: G mu unbounded");
        peak = std::max(peak, v);
    }
    const double c = std::pow(peak, 1.0 / spec.m);
    return GridFunction::from_function(spec.grid, [c](std::span<const double> z) {
        double r2 = 0.0;
        for (double x : z) r2 += x * x;
        return c * (r2 - 1.0);
    });
}

namespace {

MeasureDensity frozen_rhs(const ProblemSpec& spec, const GridFunction& u) {
    const BallGrid& g = *spec.grid;
    MeasureDensity f;
    f.grid = spec.grid;
    f.values.resize(g.num_interior());
    for (int i = 0; i < g.num_interior(); ++i) {
        const double val = spec.F.evaluate(u.values[i], g.point(i)) * spec.mu.values[i];
        if (val < -1e-12)
            throw ValidationError("picard: F(u_j, z) mu negative at point " + std::to_string(i));
        f.values[i] = std::max(val, 0.0);
    }
    return f;
}

double terminal_residual_of(const ProblemSpec& spec, const GridFunction& u) {
    const HessianMeasureResult hm = hessian_measure(u, spec.omega, spec.m);
    const MeasureDensity fu = frozen_rhs(spec, u);
    double worst = 0.0;
    for (size_t i = 0; i < fu.values.size(); ++i)
        worst = std::max(worst, std::abs(hm.density.values[i] - fu.values[i]));
    return worst;
}

std::pair<MeasureDensity, MeasureDensity> envelope_fields(const PicardState& st,
                                                          const ProblemSpec& spec, int window) {
    if (window < 1 || static_cast<int>(st.iterates.size()) < window)
        throw ArgumentError("envelope_brackets: need at least `window` recorded iterates");
    const BallGrid& g = *spec.grid;
    const size_t first = st.iterates.size() - window;
    MeasureDensity lo = MeasureDensity::constant(spec.grid, 0.0);
    MeasureDensity hi = MeasureDensity::constant(spec.grid, 0.0);
    for (int i = 0; i < g.num_interior(); ++i) {
        double fmin = std::numeric_limits<double>::infinity();
        double fmax = -std::numeric_limits<double>::infinity();
        for (size_t k = first; k < st.iterates.size(); ++k) {
            const double f = spec.F.evaluate(st.iterates[k].values[i], g.point(i));
            fmin = std::min(fmin, f);
            fmax = std::max(fmax, f);
        }
        lo.values[i] = std::max(0.0, fmin * spec.mu.values[i]);
        hi.values[i] = std::max(0.0, fmax * spec.mu.values[i]);
    }
    return {lo, hi};
}

} // namespace

std::pair<GridFunction, GridFunction> envelope_brackets(const PicardState& st,
                                                        const ProblemSpec& spec, int window) {
    auto [phi1, phi2] = envelope_fields(st, spec, window);
    const SolveReport r1 = solve_dirichlet(phi1, spec.phi, spec.omega, spec.m, spec.inner);
    const SolveReport r2 = solve_dirichlet(phi2, spec.phi, spec.omega, spec.m, spec.inner);
    if (!r1.converged || !r2.converged)
        throw NumericalError("envelope_brackets: inner Dirichlet solve failed");
    return {r1.solution, r2.solution}; // (v1, v2): H(v1) = phi1 mu <= H(v2) = phi2 mu
}

bool sandwich_check(const PicardState& st, const GridFunction& v, double eps_grid) {
    if (st.iterates.empty()) return false;
    const GridFunction& u0 = st.u0;
    for (const GridFunction& u : st.iterates) {
        for (size_t i = 0; i < u.values.size(); ++i) {
            if (u.values[i] < v.values[i] + u0.values[i] - eps_grid) return false;
            if (u.values[i] > u0.values[i] + eps_grid) return false;
        }
    }
    return true;
}

std::pair<PicardState, std::vector<SolveReport>> picard_run(const ProblemSpec& spec) {
    const auto t_start = std::chrono::steady_clock::now();
    const BallGrid& g = *spec.grid;
    const int N = g.num_interior();
    PicardState st;
    std::vector<SolveReport> reports;

    if (spec.m < 1 || spec.m > g.complex_dim()) throw ArgumentError("picard: need 1 <= m <= n");
    const MeasureDensity mu = spec.mu.validated_nonnegative();

    // seed u0 = h with H(h) = 0
    reports.push_back(max_principle_solve(spec.phi, spec.omega, spec.m, spec.inner));
    if (!reports.back().converged) return {st, reports}; // abort with partial trace
    st.u0 = reports.back().solution;
    st.iterates.push_back(st.u0);
    st.eps_grid = 10.0 * (spec.inner.tolerance + g.spacing() * g.spacing());

    // subsolution and condition (a)
    if (spec.subsolution) {
        st.v = *spec.subsolution;
        const MeasureDensity gmu = spec.F.bound * mu;
        const HessianMeasureResult hv =
            hessian_measure(st.v, HermitianField::zero(spec.grid), spec.m);
        for (int i = 0; i < N; ++i)
            if (hv.density.values[i] < gmu.values[i] - 1e-9)
                throw ValidationError("picard: supplied subsolution violates G mu <= H_m(v) "
                                      "at point " + std::to_string(i));
    } else {
        st.v = build_subsolution(spec);
    }

    // sandwich band + (1.4) validation on it
    double band_lo = std::numeric_limits<double>::infinity();
    double band_hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i) {
        band_lo = std::min(band_lo, st.v.values[i] + st.u0.values[i]);
        band_hi = std::max(band_hi, st.u0.values[i]);
    }
    for (double b : boundary_values(st.u0)) {
        band_lo = std::min(band_lo, b);
        band_hi = std::max(band_hi, b);
    }
    validate_source_bound(spec.F, band_lo - spec.tol.band_margin,
                          band_hi + spec.tol.band_margin);

    const GridSet cap_set = GridSet::ball(spec.grid, std::array<double, 8>{}, 0.9);
    GridFunction u = st.u0;

    for (int j = 0; j < spec.tol.max_outer; ++j) {
        const MeasureDensity fj = frozen_rhs(spec, u);
        reports.push_back(solve_dirichlet(fj, spec.phi, spec.omega, spec.m, spec.inner));
        if (!reports.back().converged) break; // partial trace preserved
        GridFunction unew = reports.back().solution;
        if (st.accelerated)
            for (int i = 0; i < N; ++i)
                unew.values[i] = 0.5 * unew.values[i] + 0.5 * u.values[i];

        const double step = sup_norm_diff(unew, u);
        double capm = std::numeric_limits<double>::quiet_NaN();
        if (spec.cap_metric_in_trace)
            capm = cap_metric(unew, u, spec.tol.cap_delta, cap_set, spec.omega, spec.m);

        // envelope bracket diagnostics over the last `window` iterates
        double gap = std::numeric_limits<double>::quiet_NaN();
        if (spec.envelope_window > 0 &&
            static_cast<int>(st.iterates.size()) >= spec.envelope_window) {
            auto [v1, v2] = envelope_brackets(st, spec, spec.envelope_window);
            auto [p1, p2] = envelope_fields(st, spec, spec.envelope_window);
            st.phi1 = p1;
            st.phi2 = p2;
            gap = 0.0;
            for (int i = 0; i < N; ++i) {
                gap = std::max(gap, v1.values[i] - v2.values[i]);
                if (unew.values[i] < v2.values[i] - st.eps_grid ||
                    unew.values[i] > v1.values[i] + st.eps_grid)
                    st.bracket_contract_ok = false;
            }
            st.bracket_hi = v1;
            st.bracket_lo = v2;
        }

        st.iterates.push_back(unew);
        st.sup_steps.push_back(step);
        st.cap_metrics.push_back(capm);
        st.bracket_gaps.push_back(gap);
        st.residuals.push_back(terminal_residual_of(spec, unew));
        st.wall_times.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count());
        u = unew;

        if (step <= spec.tol.sup_tol ||
            (spec.cap_metric_in_trace && capm <= spec.tol.cap_tol)) {
            st.converged = true;
            break;
        }
        // oscillation: steps not decreasing over 10 iterations -> averaging
        const size_t k = st.sup_steps.size();
        if (spec.allow_acceleration && !st.accelerated && k >= 11 &&
            st.sup_steps[k - 1] >= st.sup_steps[k - 11])
            st.accelerated = true;
    }

    if (!st.residuals.empty()) st.terminal_residual = st.residuals.back();
    return {st, reports};
}

} // namespace hessianlab

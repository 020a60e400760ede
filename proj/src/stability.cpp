#include "hessianlab/stability.hpp"

#include <algorithm>
#include <cmath>

namespace hessianlab {

StabilityReport run_stability(const StabilityExperiment& exp) {
    StabilityReport rep;
    if (exp.indices.empty() || exp.deltas.empty())
        throw ArgumentError("run_stability: need index and delta lists");

    auto [ref_state, ref_reports] = picard_run(exp.base);
    if (!ref_state.converged) return rep; // incomplete
    rep.reference = ref_state.iterates.back();
    const GridFunction& u0 = ref_state.u0;
    const GridFunction& v = ref_state.v;
    const double eps = ref_state.eps_grid;
    const BallGrid& g = *exp.base.grid;

    // sandwich band for envelope sampling
    double band_lo = std::numeric_limits<double>::infinity();
    double band_hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.num_interior(); ++i) {
        band_lo = std::min(band_lo, v.values[i] + u0.values[i]);
        band_hi = std::max(band_hi, u0.values[i]);
    }

    const GridSet K = GridSet::ball(exp.base.grid, std::array<double, 8>{}, exp.set_radius);
    double prev_env = std::numeric_limits<double>::infinity();
    bool all_ran = true;

    for (int j : exp.indices) {
        ProblemSpec spec_j = exp.base;
        spec_j.F = exp.family(j);

        // local-uniform convergence diagnostic: max |F_j - F| over band x grid
        double env = 0.0;
        const int tsamples = 100;
        for (int s = 0; s < tsamples; ++s) {
            const double t = band_lo + (band_hi - band_lo) * s / (tsamples - 1);
            for (int i = 0; i < g.num_interior(); ++i)
                env = std::max(env, std::abs(spec_j.F.evaluate(t, g.point(i)) -
                                             exp.base.F.evaluate(t, g.point(i))));
        }
        if (env > prev_env + 1e-12) rep.envelope_decreasing = false;
        prev_env = env;

        auto [st, reports] = picard_run(spec_j);
        if (!st.converged) {
            all_ran = false;
            break; // partial report, experiment incomplete
        }
        const GridFunction& uj = st.iterates.back();

        for (int i = 0; i < g.num_interior(); ++i) {
            if (uj.values[i] < v.values[i] + u0.values[i] - eps ||
                uj.values[i] > u0.values[i] + eps) {
                rep.sandwich_ok = false;
                break;
            }
        }

        const double sup = sup_norm_diff(uj, rep.reference);
        const int iters = static_cast<int>(st.sup_steps.size());
        for (double d : exp.deltas) {
            StabilityRow row;
            row.j = j;
            row.delta = d;
            row.cap_metric = cap_metric(uj, rep.reference, d, K, exp.base.omega, exp.base.m);
            row.sup_diff = sup;
            row.iterations = iters;
            rep.rows.push_back(row);
        }
    }

    rep.complete = all_ran;
    if (all_ran) {
        rep.threshold_met = true;
        const int last = exp.indices.back();
        for (const StabilityRow& r : rep.rows)
            if (r.j == last && r.cap_metric > exp.threshold) rep.threshold_met = false;
    }
    return rep;
}

} // namespace hessianlab

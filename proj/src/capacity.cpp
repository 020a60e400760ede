#include "hessianlab/capacity.hpp"

#include <algorithm>
#include <cmath>

namespace hessianlab {

int GridSet::count() const {
    int c = 0;
    for (auto b : member)
        if (b) ++c;
    return c;
}

GridSet GridSet::ball(std::shared_ptr<const BallGrid> g, std::span<const double> center,
                      double radius) {
    GridSet s;
    s.member.resize(g->num_interior());
    for (int i = 0; i < g->num_interior(); ++i) {
        auto p = g->point(i);
        double d2 = 0.0;
        for (size_t d = 0; d < p.size(); ++d) {
            const double c = d < center.size() ? center[d] : 0.0;
            d2 += (p[d] - c) * (p[d] - c);
        }
        s.member[i] = d2 <= radius * radius ? 1 : 0;
    }
    s.grid = std::move(g);
    return s;
}

GridSet GridSet::whole_interior(std::shared_ptr<const BallGrid> g) {
    GridSet s;
    s.member.assign(g->num_interior(), 1);
    s.grid = std::move(g);
    return s;
}

GridSet GridSet::where_diff_at_least(const GridFunction& u, const GridFunction& v, double delta,
                                     const GridSet& K) {
    if (!u.grid->same_layout(*v.grid) || !u.grid->same_layout(*K.grid))
        throw ArgumentError("where_diff_at_least: grid mismatch");
    GridSet s;
    s.grid = u.grid;
    s.member.resize(u.values.size());
    for (size_t i = 0; i < u.values.size(); ++i)
        s.member[i] = (K.member[i] && std::abs(u.values[i] - v.values[i]) >= delta) ? 1 : 0;
    return s;
}

GridFunction relative_extremal(const GridSet& K, const HermitianField& omega, int m,
                               const ObstacleConfig& cfg) {
    if (K.count() == 0) throw ArgumentError("relative_extremal: K is empty");
    auto grid = K.grid;
    const BallGrid& g = *grid;
    if (!omega.grid->same_layout(g)) throw ArgumentError("relative_extremal: omega grid mismatch");
    const int N = g.num_interior();
    const int n = g.complex_dim();
    if (m < 1 || m > n) throw ArgumentError("relative_extremal: need 1 <= m <= n");

    std::vector<double> obstacle(N);
    for (int i = 0; i < N; ++i) obstacle[i] = K.member[i] ? -1.0 : 0.0;

    GridFunction u = GridFunction::zeros(grid);
    u.values = obstacle;
    const std::vector<double> bv = boundary_values(u); // zeros on the sphere

    std::vector<HermitianMatrix> centerB(N, HermitianMatrix(n));
    for (int i = 0; i < N; ++i) centerB[i] = center_hessian_coefficient(g, i);

    int sweep = 0;
    for (; sweep < cfg.max_sweeps; ++sweep) {
        double max_update = 0.0;
        for (int i = 0; i < N; ++i) {
            HermitianMatrix M = hessian_at_point(g, u, bv, i);
            M += omega.m[i];
            const ScalarRoot r =
                largest_cone_root(M, centerB[i], u.values[i], 0.0, m, cfg.cone_slack);
            if (!r.ok || !std::isfinite(r.t)) continue;
            double t = u.values[i] + cfg.over_relaxation * (r.t - u.values[i]);
            t = std::min(t, obstacle[i]);
            max_update = std::max(max_update, std::abs(t - u.values[i]));
            u.values[i] = t;
        }
        if (max_update <= cfg.tol) break;
    }
    if (sweep == cfg.max_sweeps)
        throw NumericalError("relative_extremal: projected Gauss-Seidel did not reach " +
                             std::to_string(cfg.tol) + " in " + std::to_string(cfg.max_sweeps) +
                             " sweeps");
    return u;
}

CapacityEstimate cap_estimate(const GridSet& K, const HermitianField& omega, int m,
                              const ObstacleConfig& cfg) {
    CapacityEstimate est;
    est.kind = EstimatorKind::RelativeExtremal;
    est.extremal = relative_extremal(K, omega, m, cfg);
    HermitianField w = complex_hessian(est.extremal);
    for (size_t i = 0; i < w.m.size(); ++i) w.m[i] += omega.m[i];
    const MeasureDensity dens = measure_from_field(w, m).density;
    est.value = std::max(0.0, dens.mass_over(K.member));
    return est;
}

double cap_metric(const GridFunction& u, const GridFunction& v, double delta, const GridSet& K,
                  const HermitianField& omega, int m, const ObstacleConfig& cfg) {
    if (delta <= 0.0) throw ArgumentError("cap_metric: delta must be > 0");
    const GridSet s = GridSet::where_diff_at_least(u, v, delta, K);
    if (s.count() == 0) return 0.0;
    return cap_estimate(s, omega, m, cfg).value;
}

std::pair<double, double> cap_equivalence_probe(std::span<const GridSet> sets,
                                                const HermitianField& omega, int m,
                                                const ObstacleConfig& cfg) {
    if (sets.empty()) throw ArgumentError("cap_equivalence_probe: empty set list");
    const HermitianField zero = HermitianField::zero(omega.grid);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    int used = 0;
    for (const GridSet& s : sets) {
        const double cap = cap_estimate(s, omega, m, cfg).value;
        const double cm = cap_estimate(s, zero, m, cfg).value;
        if (cap <= 0.0 && cm <= 0.0) continue; // degenerate set, skipped
        const double ratio = cm / cap;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        ++used;
    }
    if (used == 0) throw ArgumentError("cap_equivalence_probe: all sets degenerate");
    return {lo, hi};
}

} // namespace hessianlab

#include "hessianlab/properties.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace hessianlab {

namespace {

bool all_true(const std::vector<std::uint8_t>& mask) {
    for (auto b : mask)
        if (!b) return false;
    return true;
}

// Lattice graph distance from each interior point to the given set
// (axis-neighbor BFS); -1 encodes "unreachable / empty set" = infinity.
std::vector<int> distance_to(const BallGrid& g, const std::vector<std::uint8_t>& set) {
    const int N = g.num_interior();
    std::vector<int> dist(N, -1);
    std::deque<int> queue;
    for (int i = 0; i < N; ++i)
        if (set[i]) {
            dist[i] = 0;
            queue.push_back(i);
        }
    while (!queue.empty()) {
        const int i = queue.front();
        queue.pop_front();
        for (int d = 0; d < g.real_dim(); ++d) {
            for (const Arm* a : {&g.axis(i, d).minus, &g.axis(i, d).plus}) {
                if (a->is_sphere()) continue;
                if (dist[a->neighbor] < 0) {
                    dist[a->neighbor] = dist[i] + 1;
                    queue.push_back(a->neighbor);
                }
            }
        }
    }
    return dist;
}

// max(u,v) agrees with u on every node of i's stencil (sphere nodes included).
bool max_equals_u_on_stencil(const BallGrid& g, const GridFunction& u, const GridFunction& v,
                             const std::vector<double>& bu, const std::vector<double>& bvv,
                             int i) {
    bool ok = true;
    g.visit_stencil(
        i,
        [&](int q) {
            if (u.values[q] < v.values[q]) ok = false;
        },
        [&](int s) {
            if (bu[s] < bvv[s]) ok = false;
        });
    return ok;
}

} // namespace

PropertyReport check_comparison(const GridFunction& u, const GridFunction& v,
                                const HermitianField& omega, int m, double tol) {
    PropertyReport rep;
    rep.property = "comparison";
    rep.tolerance = tol;
    const HessianMeasureResult hu = hessian_measure(u, omega, m);
    const HessianMeasureResult hv = hessian_measure(v, omega, m);
    if (!all_true(hu.admissible) || !all_true(hv.admissible)) {
        rep.applicable = false;
        rep.note = "inadmissible input";
        return rep;
    }
    rep.trials = 1;

    // boundary ordering on the sphere stencil values
    const std::vector<double> bu = boundary_values(u);
    const std::vector<double> bv = boundary_values(v);
    for (size_t s = 0; s < bu.size(); ++s) {
        const double gap = bu[s] - bv[s];
        if (gap < -1e-12) {
            ++rep.failures;
            rep.worst_violation = std::min(rep.worst_violation, gap);
            rep.note = "boundary ordering violated";
            return rep;
        }
    }
    // hypothesis: H(v) >= H(u) - tol pointwise
    for (size_t i = 0; i < hu.density.values.size(); ++i) {
        const double gap = hv.density.values[i] - hu.density.values[i];
        if (gap < -tol) {
            ++rep.failures;
            if (gap < rep.worst_violation) {
                rep.worst_violation = gap;
                rep.worst_point = static_cast<int>(i);
            }
            rep.note = "measure ordering violated";
        }
    }
    if (rep.failures) return rep;
    // conclusion: u >= v - tol
    for (size_t i = 0; i < u.values.size(); ++i) {
        const double gap = u.values[i] - v.values[i];
        if (gap < -tol) {
            ++rep.failures;
            if (gap < rep.worst_violation) {
                rep.worst_violation = gap;
                rep.worst_point = static_cast<int>(i);
            }
            rep.note = "conclusion u >= v violated";
        }
    }
    return rep;
}

PropertyReport check_max_principle(const GridFunction& u, const GridFunction& v,
                                   const HermitianField& omega, int m, int band) {
    PropertyReport rep;
    rep.property = "max_principle";
    rep.tolerance = 1e-9;
    const BallGrid& g = *u.grid;
    const HessianMeasureResult hu = hessian_measure(u, omega, m);
    const HessianMeasureResult hv = hessian_measure(v, omega, m);
    if (!all_true(hu.admissible) || !all_true(hv.admissible)) {
        rep.applicable = false;
        rep.note = "inadmissible input";
        return rep;
    }
    const GridFunction w = max_of(u, v);
    const HessianMeasureResult hw = hessian_measure(w, omega, m);
    const std::vector<double> bu = boundary_values(u);
    const std::vector<double> bvv = boundary_values(v);

    std::vector<std::uint8_t> interface(g.num_interior());
    for (int i = 0; i < g.num_interior(); ++i)
        interface[i] = (u.values[i] <= v.values[i]) ? 1 : 0;
    const std::vector<int> dist = distance_to(g, interface);

    int excluded = 0;
    for (int i = 0; i < g.num_interior(); ++i) {
        if (u.values[i] <= v.values[i]) continue;
        if (dist[i] >= 0 && dist[i] < band) continue;
        if (!max_equals_u_on_stencil(g, u, v, bu, bvv, i)) {
            ++excluded;
            continue;
        }
        ++rep.trials;
        const double gap = std::abs(hw.density.values[i] - hu.density.values[i]);
        if (gap > rep.tolerance) {
            ++rep.failures;
            if (gap > std::abs(rep.worst_violation)) {
                rep.worst_violation = gap;
                rep.worst_point = i;
            }
        }
    }
    if (rep.trials == 0) {
        rep.applicable = false;
        rep.note = "empty test region";
    } else if (excluded > 0) {
        rep.note = std::to_string(excluded) + " points excluded by the stencil condition";
    }
    return rep;
}

PropertyReport check_demailly(const GridFunction& u, const GridFunction& v,
                              const HermitianField& omega, int m, int band) {
    PropertyReport rep;
    rep.property = "demailly";
    rep.tolerance = 1e-9;
    const BallGrid& g = *u.grid;
    const HessianMeasureResult hu = hessian_measure(u, omega, m);
    const HessianMeasureResult hv = hessian_measure(v, omega, m);
    if (!all_true(hu.admissible) || !all_true(hv.admissible)) {
        rep.applicable = false;
        rep.note = "inadmissible input";
        return rep;
    }
    const GridFunction w = max_of(u, v);
    const HessianMeasureResult hw = hessian_measure(w, omega, m);
    const std::vector<double> bu = boundary_values(u);
    const std::vector<double> bvv = boundary_values(v);

    std::vector<std::uint8_t> u_side(g.num_interior()), v_side(g.num_interior());
    for (int i = 0; i < g.num_interior(); ++i) {
        u_side[i] = (u.values[i] > v.values[i]) ? 1 : 0;
        v_side[i] = u_side[i] ? 0 : 1;
    }
    const std::vector<int> dist_to_vside = distance_to(g, v_side);
    const std::vector<int> dist_to_uside = distance_to(g, u_side);

    int inside_band_skipped = 0;
    for (int i = 0; i < g.num_interior(); ++i) {
        const bool far_from_interface =
            u_side[i] ? (dist_to_vside[i] < 0 || dist_to_vside[i] >= band)
                      : (dist_to_uside[i] < 0 || dist_to_uside[i] >= band);
        double bound;
        if (far_from_interface) {
            // the indicator splitting, checked on the matching side
            if (u_side[i]) {
                if (!max_equals_u_on_stencil(g, u, v, bu, bvv, i)) {
                    ++inside_band_skipped;
                    continue;
                }
                bound = hu.density.values[i];
            } else {
                if (!max_equals_u_on_stencil(g, v, u, bvv, bu, i)) {
                    ++inside_band_skipped;
                    continue;
                }
                bound = hv.density.values[i];
            }
        } else {
            // contact-set measure unresolved by the grid: only nonnegativity,
            // and only where the max stays in the closed cone
            if (!hw.admissible[i]) {
                ++inside_band_skipped;
                continue;
            }
            bound = 0.0;
        }
        ++rep.trials;
        const double gap = hw.density.values[i] - bound;
        if (gap < -rep.tolerance) {
            ++rep.failures;
            if (gap < rep.worst_violation) {
                rep.worst_violation = gap;
                rep.worst_point = i;
            }
        }
    }
    if (rep.trials == 0) {
        rep.applicable = false;
        rep.note = "empty test region";
    } else if (inside_band_skipped > 0) {
        rep.note = std::to_string(inside_band_skipped) + " kink/stencil points not resolved";
    }
    return rep;
}

PropertyReport check_weak_convergence(std::span<const GridFunction> sequence,
                                      const GridFunction& limit, const HermitianField& omega,
                                      int m, std::span<const GridFunction> test_functions,
                                      double rel_tol) {
    PropertyReport rep;
    rep.property = "weak_convergence";
    rep.tolerance = rel_tol;
    if (sequence.empty() || test_functions.empty()) {
        rep.applicable = false;
        rep.note = "empty sequence or test set";
        return rep;
    }
    const BallGrid& g = *limit.grid;
    const GridSet K = GridSet::ball(limit.grid, std::array<double, 8>{}, 0.9);

    // precondition: capacity metric at delta = 0.05 decreasing below 1e-3
    double prev = std::numeric_limits<double>::infinity();
    for (const GridFunction& uj : sequence) {
        const double c = cap_metric(uj, limit, 0.05, K, omega, m);
        if (c > prev + 1e-9) {
            rep.applicable = false;
            rep.note = "capacity metric not decreasing";
            return rep;
        }
        prev = c;
    }
    if (prev > 1e-3) {
        rep.applicable = false;
        rep.note = "capacity metric above 1e-3 at the last term";
        return rep;
    }

    const MeasureDensity dl = hessian_measure(limit, omega, m).density;
    const MeasureDensity dj = hessian_measure(sequence.back(), omega, m).density;
    const double cell = g.cell_volume() * factorial(g.complex_dim());
    for (const GridFunction& chi : test_functions) {
        double p_lim = 0.0, p_j = 0.0;
        for (int i = 0; i < g.num_interior(); ++i) {
            p_lim += chi.values[i] * dl.values[i] * cell;
            p_j += chi.values[i] * dj.values[i] * cell;
        }
        ++rep.trials;
        const double rel = std::abs(p_j - p_lim) / std::max(std::abs(p_lim), 1e-300);
        if (rel > rel_tol) {
            ++rep.failures;
            rep.worst_violation = std::max(rep.worst_violation, rel);
        }
    }
    return rep;
}

GridFunction random_admissible(std::shared_ptr<const BallGrid> g, const HermitianField& omega,
                               int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ua(1.0, 2.0);
    std::uniform_int_distribution<int> uk(2, 3);
    std::uniform_real_distribution<double> uc(-0.5, 0.5);
    std::uniform_real_distribution<double> uw(0.45, 0.7);
    std::uniform_real_distribution<double> us(-1.0, 1.0);
    const int D = g->real_dim();

    for (int attempt = 0; attempt < 200; ++attempt) {
        const double a = ua(rng);
        const int k = uk(rng);
        std::vector<std::vector<double>> centers(k, std::vector<double>(D));
        std::vector<double> widths(k), amps(k);
        for (int b = 0; b < k; ++b) {
            for (int d = 0; d < D; ++d) centers[b][d] = uc(rng);
            widths[b] = uw(rng);
            amps[b] = us(rng) * a / 10.0;
        }
        auto f = [a, k, centers, widths, amps](std::span<const double> z) {
            double r2 = 0.0;
            for (double x : z) r2 += x * x;
            double val = a * (r2 - 1.0);
            for (int b = 0; b < k; ++b) {
                double d2 = 0.0;
                for (size_t d = 0; d < z.size(); ++d)
                    d2 += (z[d] - centers[b][d]) * (z[d] - centers[b][d]);
                val += amps[b] * std::exp(-d2 / (widths[b] * widths[b]));
            }
            return val;
        };
        GridFunction u = GridFunction::from_function(g, f);
        if (all_true(hessian_measure(u, omega, m).admissible)) return u;
    }
    throw NumericalError("random_admissible: rejection sampling failed after 200 attempts");
}

std::pair<GridFunction, GridFunction> random_ordered_pair(std::shared_ptr<const BallGrid> g,
                                                          const HermitianField& omega, int m,
                                                          std::mt19937_64& rng) {
    GridFunction u = random_admissible(g, omega, m, rng);
    std::uniform_real_distribution<double> ucc(0.2, 1.0);
    const double c = ucc(rng);
    GridFunction v;
    v.grid = u.grid;
    v.values.resize(u.values.size());
    for (int i = 0; i < g->num_interior(); ++i) {
        auto p = g->point(i);
        double r2 = 0.0;
        for (double x : p) r2 += x * x;
        v.values[i] = u.values[i] + c * (r2 - 1.0);
    }
    auto bu = u.boundary;
    v.boundary = [bu, c](std::span<const double> x) {
        double r2 = 0.0;
        for (double t : x) r2 += t * t;
        return bu(x) + c * (r2 - 1.0);
    };
    return {u, v};
}

std::vector<GridFunction> default_test_functions(std::shared_ptr<const BallGrid> g) {
    std::vector<GridFunction> out;
    for (double R : {0.75, 0.85}) {
        out.push_back(GridFunction::from_function(g, [R](std::span<const double> z) {
            double r2 = 0.0;
            for (double x : z) r2 += x * x;
            if (r2 >= R * R) return 0.0;
            return std::exp(-1.0 / (R * R - r2));
        }));
    }
    return out;
}

} // namespace hessianlab

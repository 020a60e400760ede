#include "hessianlab/forms.hpp"

#include <algorithm>
#include <cmath>

namespace hessianlab {

MeasureDensity MeasureDensity::constant(std::shared_ptr<const BallGrid> g, double v) {
    MeasureDensity d;
    d.values.assign(g->num_interior(), v);
    d.grid = std::move(g);
    return d;
}

MeasureDensity MeasureDensity::from_function(
    std::shared_ptr<const BallGrid> g, const std::function<double(std::span<const double>)>& f) {
    MeasureDensity d;
    d.values.resize(g->num_interior());
    for (int i = 0; i < g->num_interior(); ++i) d.values[i] = f(g->point(i));
    d.grid = std::move(g);
    return d;
}

double MeasureDensity::total_mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid->cell_volume() * factorial(grid->complex_dim());
}

double MeasureDensity::mass_over(std::span<const std::uint8_t> member) const {
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i)
        if (member[i]) s += values[i];
    return s * grid->cell_volume() * factorial(grid->complex_dim());
}

double MeasureDensity::max_value() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
}

MeasureDensity MeasureDensity::validated_nonnegative(double floor) const {
    MeasureDensity out = *this;
    for (size_t i = 0; i < out.values.size(); ++i) {
        if (out.values[i] < -floor)
            throw ValidationError("measure density negative beyond tolerance at point " +
                                  std::to_string(i) + ": " + std::to_string(out.values[i]));
        if (out.values[i] < 0.0) out.values[i] = 0.0;
    }
    return out;
}

MeasureDensity operator*(const MeasureDensity& a, const MeasureDensity& b) {
    if (!a.grid->same_layout(*b.grid)) throw ArgumentError("density grid mismatch");
    MeasureDensity r = a;
    for (size_t i = 0; i < r.values.size(); ++i) r.values[i] *= b.values[i];
    return r;
}

int HessianMeasureResult::violations() const {
    int c = 0;
    for (auto b : admissible)
        if (!b) ++c;
    return c;
}

namespace {

void check_order(const BallGrid& g, int m) {
    if (m < 1 || m > g.complex_dim())
        throw ArgumentError("order m must be in [1," + std::to_string(g.complex_dim()) +
                            "], got " + std::to_string(m));
}

} // namespace

HessianMeasureResult measure_from_field(const HermitianField& w, int m) {
    const BallGrid& g = *w.grid;
    check_order(g, m);
    const double norm = binomial(g.complex_dim(), m);
    HessianMeasureResult out;
    out.density.grid = w.grid;
    out.density.values.resize(g.num_interior());
    out.admissible.resize(g.num_interior());
    const int N = g.num_interior();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < N; ++i) {
        const EigenvalueVector lam = eigenvalues(w.m[i]);
        out.density.values[i] = sigma_k(lam, m) / norm;
        out.admissible[i] = in_gamma_m(lam, m, /*strict=*/false) ? 1 : 0;
    }
    return out;
}

HessianMeasureResult hessian_measure(const GridFunction& u, const HermitianField& omega, int m) {
    if (!u.grid->same_layout(*omega.grid))
        throw ArgumentError("hessian_measure: omega grid mismatch");
    HermitianField w = complex_hessian(u);
    for (size_t i = 0; i < w.m.size(); ++i) w.m[i] += omega.m[i];
    return measure_from_field(w, m);
}

HessianMeasureResult hessian_measure_serial(const GridFunction& u, const HermitianField& omega,
                                            int m) {
    if (!u.grid->same_layout(*omega.grid))
        throw ArgumentError("hessian_measure: omega grid mismatch");
    HermitianField w = complex_hessian_serial(u);
    for (size_t i = 0; i < w.m.size(); ++i) w.m[i] += omega.m[i];

    const BallGrid& g = *w.grid;
    check_order(g, m);
    const double norm = binomial(g.complex_dim(), m);
    HessianMeasureResult out;
    out.density.grid = w.grid;
    out.density.values.resize(g.num_interior());
    out.admissible.resize(g.num_interior());
    for (int i = 0; i < g.num_interior(); ++i) {
        const EigenvalueVector lam = eigenvalues(w.m[i]);
        out.density.values[i] = sigma_k(lam, m) / norm;
        out.admissible[i] = in_gamma_m(lam, m, false) ? 1 : 0;
    }
    return out;
}

double mixed_sigma(std::span<const HermitianMatrix> args, int n) {
    const int m = static_cast<int>(args.size());
    if (m < 1 || m > n) throw ArgumentError("mixed_sigma: need 1..n matrices");
    for (const auto& a : args) {
        if (a.dim() != n) throw ArgumentError("mixed_sigma: matrix dimension mismatch");
        if (a.hermitian_defect() > kHermitianTol)
            throw ValidationError("mixed_sigma: argument not Hermitian within tolerance");
    }
    // Polarization: Sigma(A_1..A_m) = (1/m!) sum_{S != {}} (-1)^{m-|S|} sigma_m(sum_{i in S} A_i)
    double total = 0.0;
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        HermitianMatrix s(n);
        int bits = 0;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) {
                s += args[i];
                ++bits;
            }
        const double sign = ((m - bits) % 2 == 0) ? 1.0 : -1.0;
        total += sign * sigma_k(eigenvalues(s), m);
    }
    return total / factorial(m) / binomial(n, m);
}

MixedExpansionConfig make_expansion_config(const GridFunction& rho, const HermitianField& omega) {
    if (!rho.grid->same_layout(*omega.grid))
        throw ArgumentError("expansion config: grid mismatch");
    MixedExpansionConfig cfg;
    cfg.rho = rho;
    cfg.tau = complex_hessian(rho) - omega;
    for (size_t i = 0; i < cfg.tau.m.size(); ++i) {
        const EigenvalueVector lam = eigenvalues(cfg.tau.m[i]);
        if (lam[0] < -1e-10)
            throw ValidationError("expansion config: dd^c rho - omega not psd at point " +
                                  std::to_string(i) + " (min eigenvalue " +
                                  std::to_string(lam[0]) + ")");
    }
    return cfg;
}

MixedExpansionConfig default_expansion_config(const HermitianField& omega, double extra) {
    double c = 0.0;
    for (const auto& w : omega.m) {
        const EigenvalueVector lam = eigenvalues(w);
        c = std::max(c, lam[lam.size() - 1]);
    }
    c += extra;
    GridFunction rho = GridFunction::from_function(omega.grid, [c](std::span<const double> z) {
        double r2 = 0.0;
        for (double x : z) r2 += x * x;
        return c * r2;
    });
    return make_expansion_config(rho, omega);
}

MeasureDensity binomial_expansion_density(const GridFunction& u, const HermitianField& omega,
                                          int m, const MixedExpansionConfig& cfg) {
    const BallGrid& g = *u.grid;
    check_order(g, m);
    if (!u.grid->same_layout(*cfg.rho.grid))
        throw ArgumentError("binomial_expansion_density: grid mismatch");
    const int n = g.complex_dim();

    // cfg must have been built against this omega: tau + omega = dd^c rho
    {
        const HermitianField check = complex_hessian(cfg.rho) - omega;
        for (size_t i = 0; i < check.m.size(); ++i) {
            HermitianMatrix d = check.m[i];
            d -= cfg.tau.m[i];
            if (d.max_abs() > 1e-9)
                throw ValidationError(
                    "binomial_expansion_density: config tau does not match dd^c rho - omega");
        }
    }

    // Hess(u + rho) per point
    GridFunction upr = u;
    for (size_t i = 0; i < upr.values.size(); ++i) upr.values[i] += cfg.rho.values[i];
    auto bu = u.boundary, br = cfg.rho.boundary;
    upr.boundary = [bu, br](std::span<const double> x) { return bu(x) + br(x); };
    const HermitianField P = complex_hessian(upr);

    MeasureDensity out;
    out.grid = u.grid;
    out.values.assign(g.num_interior(), 0.0);
    const int N = g.num_interior();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < N; ++i) {
        std::vector<HermitianMatrix> args(m, HermitianMatrix(n));
        double s = 0.0;
        for (int k = 0; k <= m; ++k) {
            for (int t = 0; t < m; ++t) args[t] = (t < k) ? P.m[i] : cfg.tau.m[i];
            const double sign = ((m - k) % 2 == 0) ? 1.0 : -1.0;
            s += binomial(m, k) * sign * mixed_sigma(args, n);
        }
        out.values[i] = s;
    }
    return out;
}

} // namespace hessianlab

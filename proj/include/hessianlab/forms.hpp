#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hessianlab/grid.hpp"

namespace hessianlab {

// Nonnegative (after validation) scalar per interior point, read as a density
// relative to beta^n. Raw densities produced by hessian_measure keep their
// sign; validated_nonnegative() is the gate for use as a measure.
struct MeasureDensity {
    std::shared_ptr<const BallGrid> grid;
    std::vector<double> values;

    static MeasureDensity constant(std::shared_ptr<const BallGrid> g, double v);
    static MeasureDensity from_function(std::shared_ptr<const BallGrid> g,
                                        const std::function<double(std::span<const double>)>& f);

    // Total mass in Lebesgue terms: sum * cell volume * n!  (beta^n = n! dV).
    double total_mass() const;
    double mass_over(std::span<const std::uint8_t> member) const;
    double max_value() const;

    // Clamps values in [-floor, 0) to 0; throws ValidationError below -floor.
    MeasureDensity validated_nonnegative(double floor = 1e-10) const;
};

MeasureDensity operator*(const MeasureDensity& a, const MeasureDensity& b);

struct HessianMeasureResult {
    MeasureDensity density;
    std::vector<std::uint8_t> admissible; // closed Gamma_m membership per point
    int violations() const;
};

// Pointwise density of (omega + dd^c u)^m ^ beta^{n-m} relative to beta^n:
// sigma_m(lambda(omega + Hess u)) / C(n,m). Calibrated so that
// hessian_measure(|z|^2, 0, m) == 1. Signs are reported as-is together with a
// closed-cone admissibility mask. OpenMP-parallel; _serial is the reference.
HessianMeasureResult hessian_measure(const GridFunction& u, const HermitianField& omega, int m);
HessianMeasureResult hessian_measure_serial(const GridFunction& u, const HermitianField& omega,
                                            int m);
// Same, starting from a precomputed Hessian field w = omega + Hess u.
HessianMeasureResult measure_from_field(const HermitianField& w, int m);

// Polarized sigma_m: the symmetric multilinear form agreeing with
// sigma_m(lambda(A))/C(n,m) on the diagonal, via inclusion-exclusion over
// subsets of the m arguments (2^m sigma evaluations).
double mixed_sigma(std::span<const HermitianMatrix> args, int n);

// rho strictly plurisubharmonic with dd^c rho >= omega; tau = dd^c rho - omega.
struct MixedExpansionConfig {
    GridFunction rho;
    HermitianField tau;
};

// Validates the positivity of dd^c rho - omega (eigenvalues >= -1e-10).
MixedExpansionConfig make_expansion_config(const GridFunction& rho, const HermitianField& omega);

// Default rho = c|z|^2 with c = max eigenvalue of omega over the grid + 1.
MixedExpansionConfig default_expansion_config(const HermitianField& omega, double extra = 1.0);

// Alternating binomial sum of mixed sigmas with k copies of Hess(u+rho) and
// m-k copies of tau; agrees with hessian_measure independently of rho.
MeasureDensity binomial_expansion_density(const GridFunction& u, const HermitianField& omega,
                                          int m, const MixedExpansionConfig& cfg);

} // namespace hessianlab

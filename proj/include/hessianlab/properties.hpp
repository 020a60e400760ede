#pragma once

#include <random>
#include <string>

#include "hessianlab/capacity.hpp"

namespace hessianlab {

struct PropertyReport {
    std::string property;
    int trials = 0;
    int failures = 0;
    double worst_violation = 0.0;
    int worst_point = -1;
    double tolerance = 0.0;
    bool applicable = true;
    std::string note;
    bool pass() const { return applicable && trials > 0 && failures == 0; }
};

// Comparison principle: both admissible, boundary liminf(u - v) >= 0,
// H(v) >= H(u) pointwise => u >= v. Inadmissible inputs mark the report
// inapplicable; violated hypotheses or conclusion are failures with the worst
// negative gap recorded.
PropertyReport check_comparison(const GridFunction& u, const GridFunction& v,
                                const HermitianField& omega, int m, double tol);

// Locality of the Hessian measure: on {u > v}, at lattice distance >= band
// from the interface and where max(u,v) = u on the whole stencil, the density
// of max(u,v) equals the density of u within 1e-9.
PropertyReport check_max_principle(const GridFunction& u, const GridFunction& v,
                                   const HermitianField& omega, int m, int band = 2);

// Demailly-type inequality for max(u,v); away from the interface band the
// indicator splitting holds within 1e-9, inside the band nonnegativity is
// asserted where the max's admissibility mask is true.
PropertyReport check_demailly(const GridFunction& u, const GridFunction& v,
                              const HermitianField& omega, int m, int band = 2);

// Weak convergence of Hessian measures along a capacity-convergent sequence:
// test-function pairings of the last term within rel_tol of the limit pairing.
PropertyReport check_weak_convergence(std::span<const GridFunction> sequence,
                                      const GridFunction& limit, const HermitianField& omega,
                                      int m, std::span<const GridFunction> test_functions,
                                      double rel_tol = 0.01);

// a (|z|^2 - 1) + sum b_i bumps with a in [1,2], |b_i| <= a/10,
// rejection-sampled until the closed-cone admissibility mask is all true.
GridFunction random_admissible(std::shared_ptr<const BallGrid> g, const HermitianField& omega,
                               int m, std::mt19937_64& rng);

// Measure-ordered admissible pair: v = u + c (|z|^2 - 1), c > 0, so that
// H(v) >= H(u) pointwise, boundary traces agree, and u >= v in the interior.
std::pair<GridFunction, GridFunction> random_ordered_pair(std::shared_ptr<const BallGrid> g,
                                                          const HermitianField& omega, int m,
                                                          std::mt19937_64& rng);

// Smooth bump test functions vanishing near the sphere.
std::vector<GridFunction> default_test_functions(std::shared_ptr<const BallGrid> g);

} // namespace hessianlab

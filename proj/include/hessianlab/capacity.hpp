#pragma once

#include <span>
#include <utility>

#include "hessianlab/forms.hpp"
#include "hessianlab/solver.hpp"

namespace hessianlab {

// Per-point membership set of interior grid points.
struct GridSet {
    std::shared_ptr<const BallGrid> grid;
    std::vector<std::uint8_t> member;

    int count() const;
    static GridSet ball(std::shared_ptr<const BallGrid> g, std::span<const double> center,
                        double radius);
    static GridSet whole_interior(std::shared_ptr<const BallGrid> g);
    // { |u - v| >= delta } intersected with K
    static GridSet where_diff_at_least(const GridFunction& u, const GridFunction& v, double delta,
                                       const GridSet& K);
};

enum class EstimatorKind { RelativeExtremal, WitnessSample };

struct CapacityEstimate {
    double value = 0.0;
    EstimatorKind kind = EstimatorKind::RelativeExtremal;
    GridFunction extremal;
};

struct ObstacleConfig {
    double over_relaxation = 1.5;
    double tol = 1e-9; // max update per sweep
    int max_sweeps = 60000;
    double cone_slack = 1e-10;
};

// Discrete relative extremal of K: largest admissible u <= 0 with u <= -1 on K
// and vanishing Hessian measure off K; projected Gauss-Seidel on the obstacle.
GridFunction relative_extremal(const GridSet& K, const HermitianField& omega, int m,
                               const ObstacleConfig& cfg = {});

// Lower-bound capacity estimator: Hessian-measure mass of the relative
// extremal over K (beta^n units converted to Lebesgue via n!).
CapacityEstimate cap_estimate(const GridSet& K, const HermitianField& omega, int m,
                              const ObstacleConfig& cfg = {});

// Cap estimate of K ∩ {|u - v| >= delta}; 0 for the empty set.
double cap_metric(const GridFunction& u, const GridFunction& v, double delta, const GridSet& K,
                  const HermitianField& omega, int m, const ObstacleConfig& cfg = {});

// (min, max) over sets of the ratio C_m-estimate / Cap-estimate, where the
// C_m estimator reruns cap_estimate with omega = 0.
std::pair<double, double> cap_equivalence_probe(std::span<const GridSet> sets,
                                                const HermitianField& omega, int m,
                                                const ObstacleConfig& cfg = {});

} // namespace hessianlab

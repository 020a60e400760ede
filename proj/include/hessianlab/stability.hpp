#pragma once

#include "hessianlab/picard.hpp"

namespace hessianlab {

// Perturbation family F_j for the stability experiment; every F_j must obey
// the same bound G as the base problem.
struct StabilityExperiment {
    ProblemSpec base;
    std::function<SourceFunction(int)> family; // j >= 1
    std::vector<int> indices;                  // e.g. {1, 2, 4, 8, 16, 32}
    std::vector<double> deltas;                // capacity-metric deltas
    double threshold = 1e-3;                   // acceptance at the final index
    double set_radius = 0.9;                   // K = {|z| <= set_radius}
};

struct StabilityRow {
    int j = 0;
    double delta = 0.0;
    double cap_metric = 0.0;
    double sup_diff = 0.0;
    int iterations = 0;
};

struct StabilityReport {
    std::vector<StabilityRow> rows;
    bool envelope_decreasing = true; // max-sample |F_j - F| decreasing in j
    bool sandwich_ok = true;         // v + u0 <= u_j <= u0 (within eps_grid) for all j
    bool threshold_met = false;      // cap metric <= threshold at the final index
    bool complete = false;
    GridFunction reference;          // solution of the limit problem
};

StabilityReport run_stability(const StabilityExperiment& exp);

} // namespace hessianlab

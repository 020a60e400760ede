// Compares the OpenMP kernels against their serial reference implementations:
// discrete complex Hessian, sigma_m density evaluation, and spmv.

#include <chrono>
#include <cstdio>
#include <random>

#include "hessianlab/forms.hpp"
#include "hessianlab/solver.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace hessianlab;

namespace {

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (dt < best) best = dt;
    }
    return best;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s serial %8.4f s   parallel %8.4f s   speedup %5.2fx\n", name, serial,
                parallel, serial / parallel);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; both columns run serially\n");
#endif

    auto grid = make_grid(2, 10);
    std::printf("grid: n=2 h=1/10, %d interior points\n\n", grid->num_interior());

    GridFunction u = GridFunction::from_function(grid, [](std::span<const double> z) {
        double r2 = 0.0;
        for (double x : z) r2 += x * x;
        return std::exp(r2) + 0.25 * z[0] * z[2];
    });
    const HermitianField omega = HermitianField::constant(grid, HermitianMatrix::identity(2));

    report("complex_hessian",
           time_best_of(3, [&] { (void)complex_hessian_serial(u); }),
           time_best_of(3, [&] { (void)complex_hessian(u); }));

    report("hessian_measure (m=2)",
           time_best_of(3, [&] { (void)hessian_measure_serial(u, omega, 2); }),
           time_best_of(3, [&] { (void)hessian_measure(u, omega, 2); }));

    HessianLinearizer lin(grid);
    std::vector<HermitianMatrix> G(grid->num_interior(), HermitianMatrix::identity(2));
    lin.refill(G, 0.5);
    std::vector<double> x(grid->num_interior()), y;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : x) v = dist(rng);
    const int spmv_reps = 200;
    report("spmv x200",
           time_best_of(3, [&] {
               for (int r = 0; r < spmv_reps; ++r) lin.matrix().apply_serial(x, y);
           }),
           time_best_of(3, [&] {
               for (int r = 0; r < spmv_reps; ++r) lin.matrix().apply(x, y);
           }));
    return 0;
}

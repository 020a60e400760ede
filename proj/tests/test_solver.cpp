#include <cmath>
#include <random>

#include "doctest.h"

#include "hessianlab/solver.hpp"

using namespace hessianlab;

namespace {

double r2_of(std::span<const double> z) {
    double s = 0.0;
    for (double x : z) s += x * x;
    return s;
}

double canonical_error(const SolveReport& rep) {
    const BallGrid& g = *rep.solution.grid;
    double worst = 0.0;
    for (int i = 0; i < g.num_interior(); ++i)
        worst = std::max(worst, std::abs(rep.solution.values[i] - (r2_of(g.point(i)) - 1.0)));
    return worst;
}

} // namespace

TEST_CASE("canonical solve: f = 1, phi = 0, omega = 0 recovers |z|^2 - 1") {
    for (auto [n, m, q] : {std::tuple{1, 1, 32}, std::tuple{2, 1, 8}, std::tuple{2, 2, 8}}) {
        auto g = make_grid(n, q);
        const SolveReport rep = solve_dirichlet(
            MeasureDensity::constant(g, 1.0), [](std::span<const double>) { return 0.0; },
            HermitianField::zero(g), m);
        CHECK(rep.converged);
        CHECK(rep.violations == 0);
        CHECK(rep.residual <= 1e-8);
        const double err = canonical_error(rep);
        CHECK(err <= (n == 1 ? 5e-3 : 2e-2));
        // the scheme reproduces quadratics exactly: error is solver noise
        CHECK(err <= 1e-6);
    }
}

TEST_CASE("pluriharmonic data: f = 0, phi = Re z1 gives u = Re z1") {
    for (auto [n, m, q] : {std::tuple{1, 1, 32}, std::tuple{2, 2, 6}}) {
        auto g = make_grid(n, q);
        const SolveReport rep = max_principle_solve(
            [](std::span<const double> z) { return z[0]; }, HermitianField::zero(g), m);
        CHECK(rep.converged);
        double worst = 0.0;
        for (int i = 0; i < g->num_interior(); ++i)
            worst = std::max(worst, std::abs(rep.solution.values[i] - g->point(i)[0]));
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("constant boundary data solves to the constant") {
    auto g = make_grid(1, 16);
    const SolveReport rep = max_principle_solve(
        [](std::span<const double>) { return 0.7; }, HermitianField::zero(g), 1);
    CHECK(rep.converged);
    for (double v : rep.solution.values) CHECK(v == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("f = 0 with omega = I solves to 1 - |z|^2") {
    auto g = make_grid(1, 32);
    const HermitianField eye = HermitianField::constant(g, HermitianMatrix::identity(1));
    const SolveReport rep =
        max_principle_solve([](std::span<const double>) { return 0.0; }, eye, 1);
    CHECK(rep.converged);
    for (int i = 0; i < g->num_interior(); ++i)
        CHECK(rep.solution.values[i] ==
              doctest::Approx(1.0 - r2_of(g->point(i))).epsilon(1e-8));
}

TEST_CASE("quartic manufactured solution: f = 4|z|^2, phi = 1, genuine O(h^2)") {
    auto solve_quartic = [](int q) {
        auto g = make_grid(1, q);
        MeasureDensity f = MeasureDensity::from_function(
            g, [](std::span<const double> z) { return 4.0 * r2_of(z); });
        const SolveReport rep = solve_dirichlet(
            f, [](std::span<const double>) { return 1.0; }, HermitianField::zero(g), 1);
        REQUIRE(rep.converged);
        double worst = 0.0;
        for (int i = 0; i < rep.solution.grid->num_interior(); ++i) {
            const double r2 = r2_of(rep.solution.grid->point(i));
            worst = std::max(worst, std::abs(rep.solution.values[i] - r2 * r2));
        }
        return worst;
    };
    const double e32 = solve_quartic(32);
    const double e64 = solve_quartic(64);
    CHECK(e32 <= 10.0 / (32.0 * 32.0));
    const double ratio = e32 / e64;
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
}

TEST_CASE("solved comparison: ordered data give ordered solutions") {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> amp(0.0, 1.0);
    for (auto [n, m, q] : {std::tuple{1, 1, 16}, std::tuple{2, 1, 6}, std::tuple{2, 2, 6}}) {
        auto g = make_grid(n, q);
        const HermitianField zero = HermitianField::zero(g);
        SolverConfig cfg;
        for (int trial = 0; trial < 6; ++trial) {
            const double a = amp(rng), b = amp(rng), c = amp(rng);
            // f_u <= f_v pointwise, phi_u >= phi_v on the sphere
            MeasureDensity fu = MeasureDensity::from_function(
                g, [&](std::span<const double> z) {
                    return 0.5 + a * 0.4 * std::sin(2.0 * z[0]) * std::sin(2.0 * z[1]) + 0.4;
                });
            MeasureDensity fv = fu;
            for (double& v : fv.values) v += 0.3 + 0.5 * b;
            auto phi_v = [c](std::span<const double> z) { return 0.2 * std::cos(3.0 * z[0]) * c; };
            auto phi_u = [phi_v](std::span<const double> z) { return phi_v(z) + 0.1; };
            const SolveReport ru = solve_dirichlet(fu, phi_u, zero, m, cfg);
            const SolveReport rv = solve_dirichlet(fv, phi_v, zero, m, cfg);
            REQUIRE(ru.converged);
            REQUIRE(rv.converged);
            for (size_t i = 0; i < ru.solution.values.size(); ++i)
                CHECK(ru.solution.values[i] >= rv.solution.values[i] - 10.0 * cfg.tolerance);
        }
    }
}

TEST_CASE("uniqueness proxy: linear and zero seeds agree") {
    for (auto [n, m, q] : {std::tuple{1, 1, 16}, std::tuple{2, 2, 6}}) {
        auto g = make_grid(n, q);
        MeasureDensity f = MeasureDensity::from_function(
            g, [](std::span<const double> z) { return 1.0 + 0.5 * z[0]; });
        const HermitianField zero = HermitianField::zero(g);
        auto phi = [](std::span<const double> z) { return 0.3 * z[1]; };
        SolverConfig a, b, c;
        a.seed = SolverConfig::Seed::Linear;
        b.seed = SolverConfig::Seed::Zero;
        c.seed = SolverConfig::Seed::RandomPerturbed;
        c.seed_rng = 99;
        const SolveReport ra = solve_dirichlet(f, phi, zero, m, a);
        const SolveReport rb = solve_dirichlet(f, phi, zero, m, b);
        const SolveReport rc = solve_dirichlet(f, phi, zero, m, c);
        REQUIRE(ra.converged);
        REQUIRE(rb.converged);
        REQUIRE(rc.converged);
        CHECK(sup_norm_diff(ra.solution, rb.solution) <= 10.0 * a.tolerance);
        CHECK(sup_norm_diff(ra.solution, rc.solution) <= 10.0 * a.tolerance);
    }
}

TEST_CASE("negative f is an argument error") {
    auto g = make_grid(1, 8);
    MeasureDensity f = MeasureDensity::constant(g, -0.5);
    CHECK_THROWS_AS(solve_dirichlet(f, [](std::span<const double>) { return 0.0; },
                                    HermitianField::zero(g), 1),
                    ArgumentError);
}

TEST_CASE("budget exhaustion reports non-convergence honestly") {
    auto g = make_grid(2, 5);
    MeasureDensity f = MeasureDensity::from_function(
        g, [](std::span<const double> z) { return 1.0 + 0.9 * std::sin(4.0 * z[0]); });
    SolverConfig cfg;
    cfg.tolerance = 1e-15; // unreachable
    cfg.max_newton = 1;
    const SolveReport rep = solve_dirichlet(
        f, [](std::span<const double>) { return 0.0; }, HermitianField::zero(g), 2, cfg);
    CHECK_FALSE(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(std::isfinite(rep.residual));
}

TEST_CASE("report JSON carries exactly the documented fields") {
    auto g = make_grid(1, 8);
    const SolveReport rep = solve_dirichlet(
        MeasureDensity::constant(g, 1.0), [](std::span<const double>) { return 0.0; },
        HermitianField::zero(g), 1);
    const std::string js = solve_report_json(rep);
    for (const char* key : {"\"converged\"", "\"iterations\"", "\"residual\"", "\"violations\"",
                            "\"wall_time_s\"", "\"grid_h\"", "\"n\"", "\"m\""})
        CHECK(js.find(key) != std::string::npos);
    // no other fields
    size_t count = 0;
    for (size_t p = js.find('"'); p != std::string::npos; p = js.find('"', p + 1)) ++count;
    CHECK(count == 16); // 8 keys, opening+closing quotes
}

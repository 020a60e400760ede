#include <cmath>
#include <random>

#include "doctest.h"

#include "hessianlab/grid.hpp"

using namespace hessianlab;

namespace {

double r2_of(std::span<const double> z) {
    double s = 0.0;
    for (double x : z) s += x * x;
    return s;
}

GridFunction squared_norm(std::shared_ptr<const BallGrid> g) {
    return GridFunction::from_function(g, [](std::span<const double> z) { return r2_of(z); });
}

} // namespace

TEST_CASE("grid construction and desk-scale limits") {
    auto g = make_grid(1, 8);
    CHECK(g->complex_dim() == 1);
    CHECK(g->spacing() == doctest::Approx(0.125));
    CHECK(g->num_interior() > 0);
    CHECK_THROWS_AS(make_grid(3, 4), ConfigError);
    CHECK_THROWS_AS(make_grid(1, 100), ConfigError);
    CHECK_THROWS_AS(make_grid(2, 16), ConfigError);
}

TEST_CASE("interior points sit inside |z| < 1 - h/2") {
    for (auto [n, q] : {std::pair{1, 16}, std::pair{2, 6}}) {
        auto g = make_grid(n, q);
        const double margin = 1.0 - g->spacing() / 2;
        for (int i = 0; i < g->num_interior(); ++i)
            CHECK(std::sqrt(r2_of(g->point(i))) < margin);
    }
}

TEST_CASE("every axis arm is a lattice neighbor or a sphere hit beyond h/2") {
    for (auto [n, q] : {std::pair{1, 32}, std::pair{2, 8}}) {
        auto g = make_grid(n, q);
        const double h = g->spacing();
        for (int i = 0; i < g->num_interior(); ++i) {
            for (int d = 0; d < g->real_dim(); ++d) {
                for (const Arm* a : {&g->axis(i, d).minus, &g->axis(i, d).plus}) {
                    if (a->is_sphere()) {
                        CHECK(a->length > h / 2 * (1.0 - 1e-12));
                        CHECK(r2_of(g->sphere_point(a->sphere)) == doctest::Approx(1.0));
                    } else {
                        CHECK(a->length == doctest::Approx(h));
                    }
                }
            }
        }
    }
}

TEST_CASE("one-sided stencil interpolation weights are convex") {
    auto g = make_grid(2, 8);
    for (int i = 0; i < g->num_interior(); ++i) {
        for (int d = 0; d < g->real_dim(); ++d) {
            const AxisStencil& st = g->axis(i, d);
            const double am = st.minus.length, ap = st.plus.length;
            const double wm = ap / (am + ap), wp = am / (am + ap);
            CHECK(wm >= 0.0);
            CHECK(wp >= 0.0);
            CHECK(wm + wp == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("complex hessian of |z|^2 is the identity at every interior point") {
    for (auto [n, q] : {std::pair{1, 32}, std::pair{2, 8}}) {
        auto g = make_grid(n, q);
        const HermitianField H = complex_hessian(squared_norm(g));
        for (int i = 0; i < g->num_interior(); ++i) {
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    const cplx expect = (j == k) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
                    CHECK(std::abs(H.m[i](j, k) - expect) < 1e-10);
                }
        }
    }
}

TEST_CASE("pluriharmonic Re(z1^2) has zero complex hessian") {
    for (auto [n, q] : {std::pair{1, 32}, std::pair{2, 8}}) {
        auto g = make_grid(n, q);
        GridFunction u = GridFunction::from_function(
            g, [](std::span<const double> z) { return z[0] * z[0] - z[1] * z[1]; });
        const HermitianField H = complex_hessian(u);
        for (int i = 0; i < g->num_interior(); ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) CHECK(std::abs(H.m[i](j, k)) < 1e-10);
    }
}

TEST_CASE("hessian is exact on random real quadratics") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto [n, q] : {std::pair{1, 16}, std::pair{2, 6}}) {
        auto g = make_grid(n, q);
        const int D = 2 * n;
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> quad(D * D), lin(D);
            for (auto& v : quad) v = d(rng);
            for (auto& v : lin) v = d(rng);
            const double c0 = d(rng);
            auto f = [&, c0](std::span<const double> z) {
                double s = c0;
                for (int a = 0; a < D; ++a) {
                    s += lin[a] * z[a];
                    for (int b = 0; b < D; ++b) s += 0.5 * quad[a * D + b] * z[a] * z[b];
                }
                return s;
            };
            GridFunction u = GridFunction::from_function(g, f);
            const HermitianField H = complex_hessian(u);
            auto sym = [&](int a, int b) { return 0.5 * (quad[a * D + b] + quad[b * D + a]); };
            for (int i = 0; i < g->num_interior(); ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        const double re =
                            0.25 * (sym(2 * j, 2 * k) + sym(2 * j + 1, 2 * k + 1));
                        const double im =
                            0.25 * (sym(2 * j, 2 * k + 1) - sym(2 * j + 1, 2 * k));
                        CHECK(std::abs(H.m[i](j, k) - cplx(re, j == k ? 0.0 : im)) < 1e-9);
                    }
        }
    }
}

TEST_CASE("hessian of |z1|^4 in the disk matches 4|z|^2 to O(h^2)") {
    auto g = make_grid(1, 32);
    GridFunction u = GridFunction::from_function(
        g, [](std::span<const double> z) { return r2_of(z) * r2_of(z); });
    const HermitianField H = complex_hessian(u);
    std::vector<int> c{16, 0}; // lattice point z = 0.5
    const int i = g->index_at(c);
    REQUIRE(i >= 0);
    CHECK(std::abs(H.m[i](0, 0).real() - 1.0) < 5e-3);
}

TEST_CASE("hessian is linear to machine precision") {
    auto g = make_grid(2, 6);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    GridFunction u = GridFunction::from_function(g, [](std::span<const double> z) {
        return std::exp(r2_of(z)) + std::sin(z[0] + 2 * z[3]);
    });
    GridFunction v = GridFunction::from_function(g, [](std::span<const double> z) {
        return std::cos(z[1]) * (1 + z[2] * z[2]);
    });
    const double a = d(rng), b = d(rng);
    GridFunction w;
    w.grid = g;
    w.values.resize(u.values.size());
    for (size_t i = 0; i < w.values.size(); ++i) w.values[i] = a * u.values[i] + b * v.values[i];
    auto bu = u.boundary, bv = v.boundary;
    w.boundary = [=](std::span<const double> x) { return a * bu(x) + b * bv(x); };

    const HermitianField Hu = complex_hessian(u);
    const HermitianField Hv = complex_hessian(v);
    const HermitianField Hw = complex_hessian(w);
    double scale = 0.0;
    for (int i = 0; i < g->num_interior(); ++i) scale = std::max(scale, Hw.m[i].max_abs());
    for (int i = 0; i < g->num_interior(); ++i) {
        HermitianMatrix lin = Hu.m[i];
        lin *= a;
        HermitianMatrix bvv = Hv.m[i];
        bvv *= b;
        lin += bvv;
        lin -= Hw.m[i];
        CHECK(lin.max_abs() < 1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("O(h^2) convergence of the hessian on exp(|z|^2), full stencils") {
    // max error over points whose stencil avoids the boundary, against the
    // analytic hessian of exp(|z|^2): d2/dz dzbar = e^{r2} (1 + |z|^2) in C^1.
    auto err_at = [](int q) {
        auto g = make_grid(1, q);
        GridFunction u = GridFunction::from_function(
            g, [](std::span<const double> z) { return std::exp(r2_of(z)); });
        const HermitianField H = complex_hessian(u);
        double worst = 0.0;
        for (int i = 0; i < g->num_interior(); ++i) {
            if (g->boundary_adjacent(i)) continue;
            const double r2 = r2_of(g->point(i));
            const double expect = std::exp(r2) * (1.0 + r2);
            worst = std::max(worst, std::abs(H.m[i](0, 0).real() - expect));
        }
        return worst;
    };
    const double ratio = err_at(16) / err_at(32);
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
}

TEST_CASE("boundary stencils reproduce affine functions exactly") {
    for (auto [n, q] : {std::pair{1, 24}, std::pair{2, 8}}) {
        auto g = make_grid(n, q);
        GridFunction u = GridFunction::from_function(g, [](std::span<const double> z) {
            double s = 0.7;
            for (size_t d = 0; d < z.size(); ++d) s += (0.3 + 0.1 * d) * z[d];
            return s;
        });
        const HermitianField H = complex_hessian(u);
        for (int i = 0; i < g->num_interior(); ++i) CHECK(H.m[i].max_abs() < 1e-10);
    }
}

TEST_CASE("sup_norm_diff") {
    auto g = make_grid(1, 8);
    GridFunction u = squared_norm(g);
    GridFunction v = u;
    CHECK(sup_norm_diff(u, v) == 0.0);
    for (double& x : v.values) x += 0.3;
    CHECK(sup_norm_diff(u, v) == doctest::Approx(0.3));

    // |z|^2 vs 2|z|^2: the sup is max |z|^2 over the lattice, by enumeration
    GridFunction w = GridFunction::from_function(
        g, [](std::span<const double> z) { return 2.0 * r2_of(z); });
    double expect = 0.0;
    for (int i = 0; i < g->num_interior(); ++i) expect = std::max(expect, r2_of(g->point(i)));
    CHECK(sup_norm_diff(u, w) == doctest::Approx(expect));
    CHECK(expect <= 1.0);

    auto g2 = make_grid(1, 16);
    CHECK_THROWS_AS(sup_norm_diff(u, squared_norm(g2)), ArgumentError);
}

TEST_CASE("max_of") {
    auto g = make_grid(1, 8);
    GridFunction u = squared_norm(g);
    GridFunction mm = max_of(u, u);
    CHECK(sup_norm_diff(mm, u) == 0.0);

    GridFunction a = GridFunction::from_function(
        g, [](std::span<const double> z) { return r2_of(z) - 1.0; });
    GridFunction b = GridFunction::from_function(g, [](std::span<const double>) { return -1.0; });
    CHECK(sup_norm_diff(max_of(a, b), a) == 0.0);

    GridFunction x1 = GridFunction::from_function(
        g, [](std::span<const double> z) { return z[0]; });
    GridFunction nx1 = GridFunction::from_function(
        g, [](std::span<const double> z) { return -z[0]; });
    const GridFunction ab = max_of(x1, nx1);
    for (int i = 0; i < g->num_interior(); ++i)
        CHECK(ab.values[i] == doctest::Approx(std::abs(g->point(i)[0])));
}

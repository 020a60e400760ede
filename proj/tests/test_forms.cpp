#include <cmath>
#include <random>

#include "doctest.h"

#include "hessianlab/forms.hpp"
#include "hessianlab/properties.hpp"

using namespace hessianlab;

namespace {

double r2_of(std::span<const double> z) {
    double s = 0.0;
    for (double x : z) s += x * x;
    return s;
}

HermitianMatrix random_psd(int n, std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> d(-scale, scale);
    HermitianMatrix A(n);
    for (int j = 0; j < n; ++j) {
        A(j, j) = d(rng);
        for (int k = j + 1; k < n; ++k) {
            A(j, k) = cplx(d(rng), d(rng));
            A(k, j) = std::conj(A(j, k));
        }
    }
    const EigenvalueVector lam = eigenvalues(A);
    HermitianMatrix shift = HermitianMatrix::identity(n);
    shift *= std::max(0.0, -lam[0]) + 0.1;
    A += shift;
    return A;
}

} // namespace

TEST_CASE("measure density validation and mass") {
    auto g = make_grid(1, 8);
    MeasureDensity d = MeasureDensity::constant(g, 1.0);
    // mass of density 1: area of the covered disk |z| < 1 - h/2 (n = 1)
    const double margin = 1.0 - g->spacing() / 2;
    CHECK(d.total_mass() == doctest::Approx(M_PI * margin * margin).epsilon(0.03));

    d.values[3] = -5e-11;
    const MeasureDensity ok = d.validated_nonnegative();
    CHECK(ok.values[3] == 0.0);
    d.values[3] = -1e-3;
    CHECK_THROWS_AS(d.validated_nonnegative(), ValidationError);
}

TEST_CASE("hessian measure calibration") {
    for (auto [n, q] : {std::pair{1, 16}, std::pair{2, 8}}) {
        auto g = make_grid(n, q);
        const HermitianField zero = HermitianField::zero(g);
        const HermitianField eye = HermitianField::constant(g, HermitianMatrix::identity(n));
        for (int m = 1; m <= n; ++m) {
            // u = |z|^2 - 1, omega = 0: density 1 everywhere
            GridFunction u = GridFunction::from_function(
                g, [](std::span<const double> z) { return r2_of(z) - 1.0; });
            const HessianMeasureResult r1 = hessian_measure(u, zero, m);
            for (int i = 0; i < g->num_interior(); ++i) {
                CHECK(r1.density.values[i] == doctest::Approx(1.0).epsilon(1e-10));
                CHECK(r1.admissible[i]);
            }
            // u = 0, omega = I: density 1
            GridFunction z0 = GridFunction::zeros(g);
            const HessianMeasureResult r2 = hessian_measure(z0, eye, m);
            for (int i = 0; i < g->num_interior(); ++i)
                CHECK(r2.density.values[i] == doctest::Approx(1.0).epsilon(1e-10));
            // u = |z|^2, omega = I: density 2^m
            GridFunction u2 = GridFunction::from_function(
                g, [](std::span<const double> z) { return r2_of(z); });
            const HessianMeasureResult r3 = hessian_measure(u2, eye, m);
            for (int i = 0; i < g->num_interior(); ++i)
                CHECK(r3.density.values[i] ==
                      doctest::Approx(std::pow(2.0, m)).epsilon(1e-10));
        }
    }
}

TEST_CASE("hessian measure reports signed density and mask for inadmissible input") {
    auto g = make_grid(1, 16);
    const HermitianField zero = HermitianField::zero(g);
    GridFunction u = GridFunction::from_function(
        g, [](std::span<const double> z) { return 1.0 - r2_of(z); }); // concave
    const HessianMeasureResult r = hessian_measure(u, zero, 1);
    for (int i = 0; i < g->num_interior(); ++i) {
        CHECK(r.density.values[i] == doctest::Approx(-1.0).epsilon(1e-10));
        CHECK_FALSE(r.admissible[i]);
    }
    CHECK(r.violations() == g->num_interior());
}

TEST_CASE("mixed sigma: fixed values") {
    const HermitianMatrix I2 = HermitianMatrix::identity(2);
    HermitianMatrix threeI = I2;
    threeI *= 3.0;
    const HermitianMatrix args1[] = {threeI, I2};
    CHECK(mixed_sigma(args1, 2) == doctest::Approx(3.0));
    const HermitianMatrix args2[] = {I2, I2};
    CHECK(mixed_sigma(args2, 2) == doctest::Approx(1.0));
    CHECK_THROWS_AS(([&] {
                        const HermitianMatrix bad[] = {I2, I2, I2};
                        mixed_sigma(bad, 2);
                    }()),
                    ArgumentError);
}

TEST_CASE("mixed sigma: diagonal restriction, symmetry, multilinearity") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 3);
        const int m = 1 + static_cast<int>(rng() % n);
        std::vector<HermitianMatrix> args;
        for (int i = 0; i < m; ++i) args.push_back(random_psd(n, rng, 1.0));

        // diagonal restriction
        std::vector<HermitianMatrix> diag(m, args[0]);
        const double expect = sigma_k(eigenvalues(args[0]), m) / binomial(n, m);
        CHECK(mixed_sigma(diag, n) == doctest::Approx(expect).epsilon(1e-11));

        // permutation symmetry
        const double base = mixed_sigma(args, n);
        std::vector<HermitianMatrix> perm = args;
        std::shuffle(perm.begin(), perm.end(), rng);
        CHECK(mixed_sigma(perm, n) == doctest::Approx(base).epsilon(1e-11));

        // multilinearity in the first slot
        const HermitianMatrix B = random_psd(n, rng, 1.0);
        const double s = d(rng);
        std::vector<HermitianMatrix> lhs = args;
        HermitianMatrix sB = B;
        sB *= s;
        lhs[0] += sB;
        std::vector<HermitianMatrix> second = args;
        second[0] = B;
        const double expect2 = base + s * mixed_sigma(second, n);
        CHECK(mixed_sigma(lhs, n) ==
              doctest::Approx(expect2).epsilon(1e-10).scale(std::max(1.0, std::abs(expect2))));
    }
}

TEST_CASE("binomial expansion: fixed example") {
    // n=2, m=2, omega=I, u=|z|^2, rho=2|z|^2: density 4 everywhere
    auto g = make_grid(2, 6);
    const HermitianField eye = HermitianField::constant(g, HermitianMatrix::identity(2));
    GridFunction u = GridFunction::from_function(
        g, [](std::span<const double> z) { return r2_of(z); });
    GridFunction rho = GridFunction::from_function(
        g, [](std::span<const double> z) { return 2.0 * r2_of(z); });
    const MixedExpansionConfig cfg = make_expansion_config(rho, eye);
    const MeasureDensity d = binomial_expansion_density(u, eye, 2, cfg);
    for (int i = 0; i < g->num_interior(); ++i)
        CHECK(d.values[i] == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("binomial expansion: m=1 is the trace density regardless of rho") {
    auto g = make_grid(2, 6);
    const HermitianField eye = HermitianField::constant(g, HermitianMatrix::identity(2));
    GridFunction u = GridFunction::from_function(g, [](std::span<const double> z) {
        return std::exp(r2_of(z) / 2) + 0.1 * z[0] * z[2];
    });
    const HessianMeasureResult direct = hessian_measure(u, eye, 1);
    for (double c : {2.0, 3.5}) {
        GridFunction rho = GridFunction::from_function(
            g, [c](std::span<const double> z) { return c * r2_of(z); });
        const MeasureDensity d = binomial_expansion_density(u, eye, 1,
                                                            make_expansion_config(rho, eye));
        for (int i = 0; i < g->num_interior(); ++i)
            CHECK(d.values[i] == doctest::Approx(direct.density.values[i]).epsilon(1e-10));
    }
}

TEST_CASE("binomial expansion telescopes to the direct density (omega = 0)") {
    auto g = make_grid(1, 16);
    const HermitianField zero = HermitianField::zero(g);
    GridFunction rho = GridFunction::from_function(
        g, [](std::span<const double> z) { return r2_of(z); });
    GridFunction u = GridFunction::from_function(g, [](std::span<const double> z) {
        return std::exp(r2_of(z)) - 0.3 * z[0];
    });
    const MeasureDensity d =
        binomial_expansion_density(u, zero, 1, make_expansion_config(rho, zero));
    const HessianMeasureResult direct = hessian_measure(u, zero, 1);
    for (int i = 0; i < g->num_interior(); ++i)
        CHECK(d.values[i] == doctest::Approx(direct.density.values[i]).epsilon(1e-10));
}

TEST_CASE("expansion identity on random admissible configurations") {
    std::mt19937_64 rng(99);
    for (auto [n, q] : {std::pair{1, 12}, std::pair{2, 5}}) {
        auto g = make_grid(n, q);
        for (int m = 1; m <= n; ++m) {
            for (int trial = 0; trial < 10; ++trial) {
                const HermitianField omega =
                    HermitianField::constant(g, random_psd(n, rng, 0.5));
                const GridFunction u = random_admissible(g, omega, m, rng);
                const HessianMeasureResult direct = hessian_measure(u, omega, m);

                const MixedExpansionConfig cfg1 = default_expansion_config(omega);
                const MeasureDensity e1 = binomial_expansion_density(u, omega, m, cfg1);
                const MixedExpansionConfig cfg2 = default_expansion_config(omega, 2.3);
                const MeasureDensity e2 = binomial_expansion_density(u, omega, m, cfg2);

                for (int i = 0; i < g->num_interior(); ++i) {
                    const double ref = direct.density.values[i];
                    const double scale = std::max({1.0, std::abs(ref)});
                    CHECK(std::abs(e1.values[i] - ref) <= 1e-9 * scale);
                    CHECK(std::abs(e2.values[i] - e1.values[i]) <= 1e-9 * scale);
                    if (direct.admissible[i]) CHECK(ref >= -1e-10);
                }
            }
        }
    }
}

TEST_CASE("expansion config validation") {
    auto g = make_grid(1, 8);
    const HermitianField eye = HermitianField::constant(g, HermitianMatrix::identity(1));
    // rho too weak: dd^c rho = 0.5 I < omega = I
    GridFunction weak = GridFunction::from_function(
        g, [](std::span<const double> z) { return 0.5 * r2_of(z); });
    CHECK_THROWS_AS(make_expansion_config(weak, eye), ValidationError);
    // mismatched omega at call time
    GridFunction rho = GridFunction::from_function(
        g, [](std::span<const double> z) { return 2.0 * r2_of(z); });
    const MixedExpansionConfig cfg = make_expansion_config(rho, eye);
    const HermitianField zero = HermitianField::zero(g);
    GridFunction u = GridFunction::zeros(g);
    CHECK_THROWS_AS(binomial_expansion_density(u, zero, 1, cfg), ValidationError);
}

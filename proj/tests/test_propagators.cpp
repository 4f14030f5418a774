#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qzeno/error.hpp"
#include "qzeno/projectors.hpp"
#include "qzeno/propagators.hpp"

using namespace qzeno;

namespace {
const Grid1D kGrid(256, 0.02);

DensityMatrix small_gaussian(const Grid1D& g, double sigma) { return gaussian_state(g, sigma); }
}  // namespace

TEST_CASE("free kernel spreads a Gaussian per the closed form") {
    const auto rho = gaussian_state(kGrid, 0.1);
    for (double t : {0.005, 0.02}) {
        const auto out = evolve_kernel(rho, {1, 0, 1}, t);
        CHECK(oracle::sup(out.values() - oracle::free_gaussian(kGrid, 0.1, t)) < 1e-6);
        const double s2 = 0.01 * (1 + std::pow(t / (2 * 0.01), 2));
        CHECK(moments(out).x2 == doctest::Approx(s2).epsilon(1e-6));
    }
}

TEST_CASE("kernel preserves trace and Hermiticity, p2 grows by 2Dt") {
    const auto rho = gaussian_state(kGrid, 0.1, 15.0, 0.1);
    const auto m0 = moments(rho);
    for (double D : {0.0, 100.0, 4000.0}) {
        const double t = 0.01;
        const auto out = evolve_kernel(rho, {1, D, 1}, t);
        CHECK(std::abs(out.trace() - rho.trace()) < 1e-9);
        CHECK(out.hermiticity_defect() < 1e-12);
        const auto m1 = moments(out);
        CHECK(m1.p2 == doctest::Approx(m0.p2 + 2 * D * t).epsilon(1e-6));
        CHECK(out.time() == doctest::Approx(t));
    }
}

TEST_CASE("kernel keeps <x> and <p> constant in time") {
    const auto rho = gaussian_state(kGrid, 0.1, 0.0, 0.05);
    const auto out = evolve_kernel(rho, {1, 500, 1}, 0.02);
    double x0 = 0, x1 = 0;
    for (int i = 0; i < 256; ++i) {
        x0 += kGrid.coordinate(i) * rho(i, i).real() * 0.02;
        x1 += kGrid.coordinate(i) * out(i, i).real() * 0.02;
    }
    CHECK(x1 == doctest::Approx(x0).epsilon(1e-9));
    const auto pm = apply_momentum_left(out.values(), 0.02, 1.0);
    CHECK(std::abs(pm.diagonal().real().sum() * 0.02) < 1e-9);
}

TEST_CASE("kernel rejects non-positive durations") {
    const auto rho = gaussian_state(kGrid, 0.1);
    CHECK_THROWS_AS(evolve_kernel(rho, {1, 0, 1}, 0.0), ArgumentError);
    CHECK_THROWS_AS(evolve_kernel(rho, {1, 0, 1}, -1.0), ArgumentError);
    CHECK_THROWS_AS(evolve_kernel(rho, {1, -1, 1}, 1.0), ConfigError);
}

TEST_CASE("off-diagonal suppression reaches 1/e at hbar^2 / (D l^2)") {
    // A translation-invariant state only feels the decoherence factor.
    const double s = 0.2, D = 50.0, ell = 0.3;
    Eigen::MatrixXcd m(256, 256);
    for (int j = 0; j < 256; ++j)
        for (int i = 0; i < 256; ++i) {
            int d = ((i - j) % 256 + 256) % 256;
            if (d >= 128) d -= 256;
            const double xi = d * 0.02;
            m(i, j) = std::exp(-xi * xi / (8 * s * s));
        }
    const DensityMatrix rho(kGrid, m);
    const int i = 128 + 15, j = 128;  // separation 0.3
    double lo = 0.01, hi = 1.0;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double ratio = std::abs(evolve_kernel(rho, {1, D, 1}, mid)(i, j) / rho(i, j));
        (ratio > std::exp(-1.0) ? lo : hi) = mid;
    }
    CHECK(0.5 * (lo + hi) == doctest::Approx(1.0 / (D * ell * ell)).epsilon(0.05));
}

TEST_CASE("kernel and stepper agree on the default lattice") {
    const auto rho = gaussian_state(kGrid, 0.1);
    const QBMParams qp{1, 100, 1};
    for (double t : {0.05, 0.1}) {
        const auto a = evolve_kernel(rho, qp, t);
        const auto b = evolve_stepper(rho, qp, std::nullopt, 0.001, static_cast<int>(std::lround(t / 0.001)));
        CHECK(oracle::sup(a.values() - b.values()) < 1e-4);
    }
}

TEST_CASE("stepper with zero steps is the identity") {
    const auto rho = gaussian_state(kGrid, 0.1);
    CHECK(oracle::sup(evolve_stepper(rho, {1, 100, 1}, std::nullopt, 0.001, 0).values() - rho.values()) == 0.0);
}

TEST_CASE("both evolvers match the dense Lindblad exponential on 16 points") {
    const Grid1D g(16, 1.0);
    const auto rho = small_gaussian(g, 1.13);
    SUBCASE("kernel") {
        for (auto [D, t] : {std::pair{0.0, 1.0}, std::pair{1e-3, 0.1}, std::pair{2e-3, 0.05}}) {
            const auto exact = oracle::dense_evolve(rho.values(), 1.0, 1, D, 1, t);
            const auto got = evolve_kernel(rho, {1, D, 1}, t);
            CHECK(oracle::sup(got.values() - exact) < 1e-6);
            if (D > 0) {
                // The decoherence effect itself is far above the tolerance.
                const auto free = oracle::dense_evolve(rho.values(), 1.0, 1, 0, 1, t);
                CHECK(oracle::sup(exact - free) > 100e-6);
            }
        }
    }
    SUBCASE("stepper") {
        const double D = 0.05, t = 0.5, dt = 1e-3;
        const auto exact = oracle::dense_evolve(rho.values(), 1.0, 1, D, 1, t);
        const auto got = evolve_stepper(rho, {1, D, 1}, std::nullopt, dt, 500);
        CHECK(oracle::sup(got.values() - exact) < 1e-6);
    }
}

TEST_CASE("Wigner evolution commutes with the density-matrix kernel") {
    const auto rho = gaussian_state(kGrid, 0.1);
    for (double D : {100.0, 0.0}) {
        const QBMParams qp{1, D, 1};
        const auto a = evolve_wigner(wigner_transform(rho), qp, 0.01);
        const auto b = wigner_transform(evolve_kernel(rho, qp, 0.01));
        CHECK((a.values() - b.values()).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("Wigner evolution at vanishing D is the classical shear") {
    const double sigma = 0.1, t = 0.01;
    const auto w = evolve_wigner(wigner_transform(gaussian_state(kGrid, sigma)), {1, 1e-10, 1}, t);
    double err = 0;
    for (int i = 0; i < 256; ++i)
        for (int k = 0; k < 256; ++k) {
            const double p = w.p_grid().coordinate(k), X = w.x_grid().coordinate(i) - p * t;
            const double exact = std::exp(-X * X / (2 * sigma * sigma) - 2 * sigma * sigma * p * p) / std::numbers::pi;
            err = std::max(err, std::abs(w.values()(i, k) - exact));
        }
    CHECK(err < 1e-6);
}

TEST_CASE("Wigner kernel coefficients and normalization") {
    const QBMParams qp{1, 100, 1};
    const double t = 0.01;
    const auto c = wigner_kernel_coeffs(qp, t);
    CHECK(c.alpha == doctest::Approx(1.0));
    CHECK(c.beta == doctest::Approx(3e4));
    CHECK(c.eps_cross == doctest::Approx(-3e2));
    // Integrate over the final phase-space point.
    double acc = 0;
    const double dp = 0.02, dx = 1e-4;
    for (double p = -10; p <= 10; p += dp)
        for (double X = -0.05; X <= 0.05; X += dx) acc += wigner_kernel(c, qp, t, p, X, 0.0, 0.0) * dp * dx;
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-3));
    CHECK_THROWS_AS(wigner_kernel_coeffs(qp, 0.0), ArgumentError);
}

TEST_CASE("Wigner evolution of zero is zero and rejects bad durations") {
    const WignerFunction zero(kGrid, 1.0, Eigen::MatrixXd::Zero(256, 256));
    CHECK(evolve_wigner(zero, {1, 10, 1}, 0.01).values().cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(evolve_wigner(zero, {1, 10, 1}, 0.0), ArgumentError);
}

TEST_CASE("kernel stays finite for long strong-decoherence steps") {
    // A projected state has weight at the Nyquist separations; the decay there
    // once evaluated to 0 * inf for D t of order 100.
    const auto rho = apply_projection(gaussian_state(kGrid, 0.1), Projector::smeared(1.0, 0.02)).first;
    for (double D : {1e4, 2e4, 1e5}) {
        const auto one = evolve_kernel(rho, {1, D, 1}, 0.01);
        auto ten = rho;
        for (int i = 0; i < 10; ++i) ten = evolve_kernel(ten, {1, D, 1}, 0.001);
        REQUIRE(std::isfinite(one.trace()));
        CHECK(std::abs(one.trace() - rho.trace()) < 1e-9);
        // At 1e5 the diffused momenta outrun the lattice and the split is no longer exact.
        if (D <= 2e4) CHECK(oracle::sup(one.values() - ten.values()) / oracle::sup(ten.values()) < 1e-5);
    }
}

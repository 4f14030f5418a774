#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qzeno/error.hpp"
#include "qzeno/lattice.hpp"

using namespace qzeno;

namespace {
const Grid1D kGrid(256, 0.02);
}

TEST_CASE("grid coordinates and validation") {
    CHECK(kGrid.coordinate(0) == doctest::Approx(-2.56));
    CHECK(kGrid.coordinate(128) == 0.0);
    CHECK(kGrid.coordinate(255) == doctest::Approx(2.54));
    CHECK(kGrid.momentum_grid(1.0).spacing() == doctest::Approx(2 * std::numbers::pi / 5.12));
    CHECK_THROWS_AS(Grid1D(4, 0.1), ConfigError);
    CHECK_THROWS_AS(Grid1D(16, 0.0), ConfigError);
    const auto p = fft_momenta(8, 1.0, 1.0);
    CHECK(p[4] == doctest::Approx(-std::numbers::pi));
    CHECK(p[1] == doctest::Approx(std::numbers::pi / 4));
}

TEST_CASE("Gaussian moments are sigma^2 and hbar^2 / 4 sigma^2") {
    const auto rho = gaussian_state(kGrid, 0.1);
    const auto mo = moments(rho);
    CHECK(mo.norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mo.x2 == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(mo.p2 == doctest::Approx(25.0).epsilon(1e-9));
    CHECK(std::abs(mo.xp_sym) < 1e-12);
    CHECK(finite_difference_p2(rho) == doctest::Approx(25.0).epsilon(2e-2));
}

TEST_CASE("xp_sym of a boosted displaced packet") {
    // A packet with momentum k has <xp+px> = 2 <x><p>.
    const auto rho = gaussian_state(kGrid, 0.1, 10.0, 0.2);
    const auto mo = moments(rho);
    CHECK(mo.xp_sym == doctest::Approx(2 * 0.2 * 10.0).epsilon(1e-9));
    CHECK(mo.p2 == doctest::Approx(25.0 + 100.0).epsilon(1e-9));
}

TEST_CASE("moments of a depleted state throw") {
    const DensityMatrix zero(kGrid, Eigen::MatrixXcd::Zero(256, 256));
    CHECK_THROWS_AS(moments(zero), DepletedStateError);
}

TEST_CASE("Wigner transform of a Gaussian matches the analytic form") {
    const double sigma = 0.1;
    const auto w = wigner_transform(gaussian_state(kGrid, sigma));
    double err = 0;
    for (int i = 0; i < 256; ++i)
        for (int k = 0; k < 256; ++k) {
            const double X = w.x_grid().coordinate(i), p = w.p_grid().coordinate(k);
            const double exact = std::exp(-X * X / (2 * sigma * sigma) - 2 * sigma * sigma * p * p) / std::numbers::pi;
            err = std::max(err, std::abs(w.values()(i, k) - exact));
        }
    CHECK(err < 1e-12);
    const auto [x2, p2] = wigner_second_moments(w);
    CHECK(x2 == doctest::Approx(sigma * sigma).epsilon(1e-9));
    CHECK(p2 == doctest::Approx(25.0).epsilon(1e-6));
    CHECK(w.total() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Wigner marginal reproduces the diagonal") {
    const auto rho = gaussian_state(kGrid, 0.15, 20.0, 0.1);
    const auto w = wigner_transform(rho);
    const auto marg = w.position_marginal();
    double err = 0;
    for (int i = 0; i < 256; ++i) err = std::max(err, std::abs(marg[i] - rho(i, i).real()));
    CHECK(err < 1e-9);
    CHECK(std::abs(w.total() - rho.trace()) < 1e-9);
}

TEST_CASE("Wigner transform is real and exactly invertible") {
    const Grid1D g(64, 0.1);
    const DensityMatrix h(g, oracle::random_hermitian(64, 7));
    CHECK(wigner_imaginary_residual(h) < 1e-10);
    const auto back = inverse_wigner(wigner_transform(h));
    CHECK(oracle::sup(back.values() - h.values()) < 1e-9);

    const auto rho = gaussian_state(kGrid, 0.1);
    CHECK(oracle::sup(inverse_wigner(wigner_transform(rho)).values() - rho.values()) < 1e-9);

    const DensityMatrix zero(g, Eigen::MatrixXcd::Zero(64, 64));
    CHECK(wigner_transform(zero).values().cwiseAbs().maxCoeff() == 0.0);
    CHECK(inverse_wigner(wigner_transform(zero)).values().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Wigner transform rejects lattices not divisible by four") {
    const Grid1D g(18, 0.1);
    const DensityMatrix h(g, oracle::random_hermitian(18, 3));
    CHECK_THROWS_AS(wigner_transform(h), ConfigError);
}

TEST_CASE("diagnostics: Hermiticity and edge decay") {
    const auto rho = gaussian_state(kGrid, 0.1);
    CHECK(rho.hermiticity_defect() < 1e-14);
    CHECK(rho.edge_fraction() < 1e-8);
}

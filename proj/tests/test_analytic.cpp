#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qzeno/analytic_models.hpp"
#include "qzeno/error.hpp"
#include "qzeno/propagators.hpp"
#include "qzeno/timescales.hpp"

using namespace qzeno;

TEST_CASE("spin survival starts at one and matches the x-channel closed form") {
    const SpinModelParams px{1.0, 0.0, LindbladAxis::x};
    CHECK(spin_survival_single(px, 0.0) == 1.0);
    CHECK(spin_survival_single(px, std::numbers::pi / 2) == doctest::Approx(0.0).epsilon(1e-14));
    const SpinModelParams py{1.0, 0.3, LindbladAxis::y};
    CHECK(spin_survival_single(py, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("spin survival small-t series 1 - 2Dt - (w^2 - 4D^2) t^2") {
    for (auto axis : {LindbladAxis::x, LindbladAxis::y}) {
        const SpinModelParams p{1.3, 0.4, axis};
        const double h = 1e-4;
        const double d1 = (spin_survival_single(p, h) - spin_survival_single(p, 0)) / h;
        const double d1c = (-3 * spin_survival_single(p, 0) + 4 * spin_survival_single(p, h) -
                            spin_survival_single(p, 2 * h)) / (2 * h);
        CHECK(d1c == doctest::Approx(-2 * p.D).epsilon(1e-6));
        CHECK(d1 < 0);
        if (axis == LindbladAxis::x) {
            const double d2 = (spin_survival_single(p, 2 * h) - 2 * spin_survival_single(p, h) + 1.0) / (h * h);
            CHECK(d2 / 2 == doctest::Approx(-(p.omega * p.omega - 4 * p.D * p.D)).epsilon(1e-3));
        }
    }
}

TEST_CASE("RK4 Lindblad integration reproduces both closed forms") {
    for (auto axis : {LindbladAxis::x, LindbladAxis::y})
        for (double D : {0.0, 0.5, 1.0, 2.5}) {
            const SpinModelParams p{1.0, D, axis};
            for (double t : {0.1, 0.7}) {
                const auto rho = spin_lindblad_numeric(p, t, 1e-5);
                CHECK(std::abs(rho(0, 0).real() - spin_survival_single(p, t)) < 1e-8);
                CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
            }
        }
}

TEST_CASE("unitary spin evolution keeps trace and purity") {
    const SpinModelParams p{2.0, 0.0, LindbladAxis::y};
    const auto rho = spin_lindblad_numeric(p, 1.0, 1e-5);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
    CHECK(std::abs((rho * rho).trace() - 1.0) < 1e-10);
}

TEST_CASE("overdamped y channel relaxes to one half without oscillating") {
    // Two real decay modes with opposite-sign amplitudes: one shallow undershoot of 1/2, no more.
    const SpinModelParams p{1.0, 5.0, LindbladAxis::y};
    int crossings = 0;
    double prev = 1.0;
    for (double t = 0.01; t < 40; t += 0.01) {
        const double v = spin_survival_single(p, t);
        if ((v - 0.5) * (prev - 0.5) < 0) ++crossings;
        CHECK(v > 0.49);
        prev = v;
    }
    CHECK(crossings == 1);
    CHECK(prev == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(std::abs(spin_lindblad_numeric(p, 0.3, 1e-5)(0, 0).real() - spin_survival_single(p, 0.3)) < 1e-8);
}

TEST_CASE("y channel is continuous across D = omega") {
    for (double t : {0.1, 0.5, 2.0}) {
        const double a = spin_survival_single({1.0, 1.0 - 1e-7, LindbladAxis::y}, t);
        const double b = spin_survival_single({1.0, 1.0, LindbladAxis::y}, t);
        const double c = spin_survival_single({1.0, 1.0 + 1e-7, LindbladAxis::y}, t);
        CHECK(std::abs(a - b) < 1e-6);
        CHECK(std::abs(c - b) < 1e-6);
    }
}

TEST_CASE("spin survival stays in [0, 1]") {
    for (auto axis : {LindbladAxis::x, LindbladAxis::y})
        for (double D : {0.0, 0.2, 1.0, 3.0})
            for (double t = 0; t < 10; t += 0.037) {
                const double v = spin_survival_single({1.5, D, axis}, t);
                CHECK(v >= -1e-14);
                CHECK(v <= 1 + 1e-14);
            }
}

TEST_CASE("Zeno sequence: freezing at D = 0, linear decay otherwise") {
    const double tau = 1.0;
    double prev = 0;
    for (int N : {10, 100, 1000, 10000}) {
        const double v = spin_zeno_sequence({1.0, 0.0, LindbladAxis::x}, tau / N, N);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(prev > 0.999);
    const SpinModelParams noisy{1.0, 0.1, LindbladAxis::x};
    CHECK(spin_zeno_sequence(noisy, tau / 1e5, 100000) == doctest::Approx(std::exp(-0.2 * tau)).epsilon(1e-4));
    const double eps = 1e-3;
    const int N = 200;
    CHECK(spin_zeno_sequence(noisy, eps, N) ==
          doctest::Approx(1 - 2 * 0.1 * N * eps - (1 - 4 * 0.01) * eps * N * eps).epsilon(2e-3));
    CHECK(spin_zeno_sequence(noisy, 0.3, 1) == spin_survival_single(noisy, 0.3));
    CHECK_THROWS_AS(spin_zeno_sequence(noisy, 0.3, 0), ArgumentError);
}

TEST_CASE("Gaussian overlap closed form: limits and monotonicity") {
    const GaussianModelParams g{0.1, 100.0, 1.0, 1.0};
    CHECK(gaussian_overlap(g, 0) == 1.0);
    const double t = 1e-4;
    const double series = 1 - 2 * t / g.t_d() - t * t / (32 * g.t_z() * g.t_z()) + 6 * std::pow(t / g.t_d(), 2);
    CHECK(std::abs(gaussian_overlap(g, t) - series) < 1e-9);
    // Phase-space covariance algebra: sum of initial and evolved covariances.
    for (double s : {0.003, 0.02, 0.3}) {
        const double s2 = 0.01, D = 100;
        const double det = 1 + 4 * D * s2 * s + s * s / (16 * s2 * s2) + D * s * s * s / (3 * s2) +
                           D * D * s * s * s * s / 3;
        CHECK(gaussian_overlap(g, s) == doctest::Approx(1 / std::sqrt(det)).epsilon(1e-13));
    }
    double prev = 1.0;
    for (double s = 0.001; s < 1; s += 0.003) {
        const double v = gaussian_overlap(g, s);
        CHECK(v <= prev);
        prev = v;
    }
    const auto ts = timescales({1, 100, 1}, 1.0, 0.01, 1.0);
    CHECK(g.t_d() * g.t_z() == doctest::Approx(ts.t_loc * ts.t_loc).epsilon(1e-14));
    CHECK(GaussianModelParams{0.1, 0, 1, 1}.t_d() == std::numeric_limits<double>::infinity());
}

TEST_CASE("lattice evolution reproduces the Gaussian overlap closed form") {
    const Grid1D g(256, 0.02);
    const auto rho = gaussian_state(g, 0.1);
    const GaussianModelParams gp{0.1, 100.0, 1.0, 1.0};
    for (double t : {0.005, 0.01, 0.025, 0.05}) {
        const auto out = evolve_kernel(rho, {1, 100, 1}, t);
        // rho0 = |psi><psi| with real psi, so <psi|rho_t|psi> = eta^2 sum psi_i rho_ij psi_j.
        Eigen::VectorXd psi(256);
        for (int i = 0; i < 256; ++i) psi(i) = std::sqrt(rho(i, i).real());
        const std::complex<double> ov = 0.02 * 0.02 * psi.cast<std::complex<double>>().dot(out.values() * psi);
        CHECK(std::abs(ov.real() - gaussian_overlap(gp, t)) < 1e-4);
    }
}

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qzeno/complex_potential.hpp"
#include "qzeno/error.hpp"
#include "qzeno/runner.hpp"

using namespace qzeno;

namespace {
const Grid1D kGrid(256, 0.02);
}

TEST_CASE("V0 = hbar / eps") {
    CHECK(v0_from_eps(0.01) == doctest::Approx(100.0));
    CHECK(v0_from_eps(1.0) == 1.0);
    CHECK(v0_from_eps(0.005) == doctest::Approx(2 * v0_from_eps(0.01)));
    CHECK_THROWS_AS(v0_from_eps(0.0), ArgumentError);
}

TEST_CASE("reflection estimate") {
    const ComplexPotential pot{10.0, 1.0, 0.02};
    CHECK(reflection_estimate(pot, 1.0 / 0.02, 100.0) == doctest::Approx(0.01 * std::exp(-4.0)));
    CHECK(reflection_estimate({10.0, 1.0, 0.0}, 30.0, 100.0) == doctest::Approx(0.01));
    CHECK(reflection_estimate(pot, 0.0, 100.0) == doctest::Approx(0.01));
}

TEST_CASE("zero potential reduces to the plain stepper") {
    const auto rho = gaussian_state(kGrid, 0.1, 5.0);
    const auto a = evolve_with_potential(rho, {0.0, 1.0, 0.02}, {1, 100, 1}, 0.01, 0.001);
    const auto b = evolve_stepper(rho, {1, 100, 1}, std::nullopt, 0.001, 10);
    CHECK(oracle::sup(a.values() - b.values()) < 1e-13);
    CHECK_THROWS_AS(evolve_with_potential(rho, {0.0, 1.0, 0.02}, {1, 100, 1}, 0.0105, 0.001), ArgumentError);
}

TEST_CASE("absorption never increases the norm") {
    auto rho = gaussian_state(kGrid, 0.1, 20.0);
    const ComplexPotential pot{100.0, 1.0, 0.02};
    double prev = rho.trace();
    for (int k = 0; k < 6; ++k) {
        rho = evolve_with_potential(rho, pot, {1, 500, 1}, 0.005, 0.001);
        CHECK(rho.trace() <= prev + 1e-12);
        prev = rho.trace();
    }
    CHECK(prev < 0.95);
}

TEST_CASE("high walls reflect slow packets, low walls absorb fast ones") {
    // Packet launched at the edge with energy k^2/2.
    const auto slow = gaussian_state(kGrid, 0.1, 5.0, 0.3);
    const auto fast = gaussian_state(kGrid, 0.1, 40.0, 0.3);
    const QBMParams free{1, 0, 1};
    const double t = 0.04;
    const auto rs = evolve_with_potential(slow, {1e4, 1.0, 0.0}, free, t, 1e-4);
    const auto rf = evolve_with_potential(fast, {100.0, 1.0, 0.02}, free, t, 1e-4);
    CHECK(rs.trace() > 0.9);
    CHECK(rf.trace() < 0.5);
}

TEST_CASE("projector string and complex potential give the same survival") {
    ExperimentConfig c;
    c.total_time = 0.05;
    for (double D : {0.0, 100.0}) {
        c.qbm.D = D;
        const auto r0 = initial_state(c);
        const auto res = run_sequence(c, r0);
        const ComplexPotential pot{v0_from_eps(c.eps), 1.0, 0.02};
        auto r = r0;
        for (size_t k = 1; k < res.survival.size(); ++k) {
            r = evolve_with_potential(r, pot, c.qbm, c.eps, c.dt);
            CHECK(r.trace() == doctest::Approx(res.survival[k].p).epsilon(0.1));
        }
    }
}

TEST_CASE("quantum correction ratio falls as momentum spread grows") {
    ExperimentConfig c;
    const ComplexPotential pot{100, 1, 0.02};
    double prev_ratio = 1e300, prev_p2 = 0;
    for (double D : {0.0, 4000.0, 20000.0}) {
        c.qbm.D = D;
        const auto r = normalized(evolve_with_potential(initial_state(c), pot, c.qbm, 0.05, 0.001));
        const double p2 = moments(r).p2;
        const double ratio = quantum_term_ratio(wigner_transform(r, 1.0), pot);
        CHECK(ratio < prev_ratio);
        CHECK(p2 > prev_p2);
        // ratio ~ kappa hbar^2 / (a L <p^2>) with kappa of order ten
        const double kappa = ratio * p2 * 0.02;
        CHECK(kappa > 1);
        CHECK(kappa < 30);
        prev_ratio = ratio, prev_p2 = p2;
    }
}

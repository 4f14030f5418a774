#pragma once
// Independent reference implementations used only by the test suites.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qzeno/grid.hpp"
#include "qzeno/lattice.hpp"

namespace oracle {

using cplx = std::complex<double>;

// Brute-force propagator: exponential of the full Lindblad generator acting on
// vec(rho), with kinetic energy diagonal in the unitary DFT basis and the
// decoherence term using the actual coordinate difference x_i - x_j.
inline Eigen::MatrixXcd dense_evolve(const Eigen::MatrixXcd& rho, double eta, double m, double D, double hbar,
                                     double t, const std::vector<double>& V = {}) {
    const int n = static_cast<int>(rho.rows());
    Eigen::MatrixXcd F(n, n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) F(k, j) = std::polar(1.0 / std::sqrt(n), -2.0 * std::numbers::pi * k * j / n);
    const auto p = qzeno::fft_momenta(n, eta, hbar);
    Eigen::VectorXcd e(n);
    for (int k = 0; k < n; ++k) e(k) = p[k] * p[k] / (2.0 * m);
    const Eigen::MatrixXcd T = F.adjoint() * e.asDiagonal() * F;
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(n * n, n * n);
    // vec(A X B) = (B^T kron A) vec(X)
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    cplx val = 0;
                    if (b == d) val += -cplx(0, 1) / hbar * T(a, c);
                    if (a == c) val += cplx(0, 1) / hbar * T(d, b);
                    G(a + n * b, c + n * d) = val;
                }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double r = (i - j) * eta;
            double rate = D * r * r / (hbar * hbar);
            if (!V.empty()) rate += (V[i] + V[j]) / hbar;
            G(i + n * j, i + n * j) -= rate;
        }
    const Eigen::MatrixXcd E = (G * t).exp();
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), n * n);
    Eigen::VectorXcd out = E * v;
    return Eigen::Map<Eigen::MatrixXcd>(out.data(), n, n);
}

// Analytic free-particle Gaussian density matrix (initially real, width sigma).
inline Eigen::MatrixXcd free_gaussian(const qzeno::Grid1D& g, double sigma, double t, double m = 1, double hbar = 1) {
    const int n = g.size();
    const cplx s = sigma * sigma * cplx(1.0, hbar * t / (2.0 * m * sigma * sigma));
    Eigen::VectorXcd psi(n);
    const cplx amp = std::pow(2.0 * std::numbers::pi, -0.25) * std::sqrt(sigma) / std::sqrt(s);
    for (int i = 0; i < n; ++i) {
        const double x = g.coordinate(i);
        psi(i) = amp * std::exp(-x * x / (4.0 * s));
    }
    return psi * psi.adjoint();
}

inline Eigen::MatrixXcd random_hermitian(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXcd a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = cplx(nd(rng), nd(rng));
    return a + a.adjoint();
}

inline double sup(const Eigen::MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace oracle

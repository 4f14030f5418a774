#include "qzeno/complex_potential.hpp"

#include <cmath>
#include <numbers>

#include "qzeno/error.hpp"

namespace qzeno {

double v0_from_eps(double eps, double hbar) {
    if (!(eps > 0)) throw ArgumentError("eps must be positive");
    return hbar / eps;
}

DensityMatrix evolve_with_potential(const DensityMatrix& rho, const ComplexPotential& pot, const QBMParams& params,
                                    double t, double dt) {
    if (!(dt > 0) || t < 0) throw ArgumentError("need t >= 0 and dt > 0");
    const double ratio = t / dt;
    const long steps = std::lround(ratio);
    if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio))
        throw ArgumentError("t must be a whole number of steps dt");
    return evolve_stepper(rho, params, pot, dt, static_cast<int>(steps));
}

double reflection_estimate(const ComplexPotential& pot, double p, double E, double hbar) {
    if (!(E > 0)) throw ArgumentError("energy must be positive");
    const double r = pot.V0 / E;
    return r * r * std::exp(-4.0 * pot.a * pot.a * p * p / (hbar * hbar));
}

double potential_second_derivative(const ComplexPotential& pot, double x) {
    if (pot.a <= 0) return 0.0;  // delta functions at the edges, not representable
    const double a = pot.a;
    const double c = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * a * a * a);
    const double u = x + 0.5 * pot.L, v = x - 0.5 * pot.L;
    const double g2 = -c * (u * std::exp(-u * u / (2 * a * a)) - v * std::exp(-v * v / (2 * a * a)));
    return -pot.V0 * g2;
}

double quantum_term_ratio(const WignerFunction& w, const ComplexPotential& pot) {
    const auto& W = w.values();
    const int n = static_cast<int>(W.rows());
    const int np = static_cast<int>(W.cols());
    const double dp = w.p_grid().spacing();
    const double h2 = w.hbar() * w.hbar();
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
        const double x = w.x_grid().coordinate(i);
        const double V = pot(x);
        const double V2 = potential_second_derivative(pot, x);
        for (int k = 0; k < np; ++k) {
            const double wm = W(i, (k + np - 1) % np), wp = W(i, (k + 1) % np);
            num += std::abs(h2 * V2 * (wp - 2 * W(i, k) + wm) / (dp * dp));
            den += std::abs(V * W(i, k));
        }
    }
    if (den == 0) throw DepletedStateError("no Wigner weight where the potential acts");
    return num / den;
}

}  // namespace qzeno

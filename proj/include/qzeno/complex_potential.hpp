#pragma once

#include "qzeno/lattice.hpp"
#include "qzeno/propagators.hpp"

namespace qzeno {

// Absorber strength equivalent to projections spaced by eps.
double v0_from_eps(double eps, double hbar = 1.0);

// Master equation with the absorbing potential, integrated by the split stepper.
// t must be a whole number of steps dt.
DensityMatrix evolve_with_potential(const DensityMatrix& rho, const ComplexPotential& pot, const QBMParams& params,
                                    double t, double dt);

// Lowest-order reflection off one smeared step, (V0/E)^2 exp(-4 a^2 p^2 / hbar^2).
// Order of magnitude only, prefactors of order one are dropped.
double reflection_estimate(const ComplexPotential& pot, double p, double E, double hbar = 1.0);

double potential_second_derivative(const ComplexPotential& pot, double x);

// Size of the leading quantum correction relative to the absorption term in the
// Wigner picture: sum |hbar^2 V'' d^2W/dp^2| / sum |V W| over phase space.
double quantum_term_ratio(const WignerFunction& w, const ComplexPotential& pot);

}  // namespace qzeno

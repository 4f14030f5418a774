#pragma once

#include <string>

#include "qzeno/propagators.hpp"

namespace qzeno {

// D-dependent fields are +infinity when D = 0.
struct Timescales {
    double t_E = 0;           // hbar m / <p^2>
    double t_loc = 0;         // sqrt(m hbar / D)
    double tau_suppress = 0;  // m hbar / (D eps)
    double lambda_inv = 0;    // (m^2 L^2 / D)^(1/3)
    double p_s = 0;           // (m L D)^(1/3)
    double t_E_final = 0;     // hbar m^(1/3) / (L D)^(2/3)
    double p_c = 0;           // m L / eps
    double a_cutoff = 0;      // hbar / p_c
    double V0 = 0;            // hbar / eps
};

Timescales timescales(const QBMParams& qbm, double L, double eps, double p2_current);

enum class Regime { zeno, classical, trivial_classical };

Regime classify_regime(const Timescales& ts, double eps);
std::string to_string(Regime r);

// Projection spacing on the classical/Zeno boundary t_E^f(D) = eps.
double regime_boundary_eps(const QBMParams& qbm, double L);

}  // namespace qzeno

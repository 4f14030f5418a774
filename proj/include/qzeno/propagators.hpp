#pragma once

#include <optional>

#include "qzeno/lattice.hpp"

namespace qzeno {

struct QBMParams {
    double m = 1.0;
    double D = 0.0;
    double hbar = 1.0;

    void validate() const;
};

// Phase-space kernel N exp(-alpha u^2 - beta w^2 - eps_cross u w), u = p - p_cl, w = X - X_cl.
struct WignerKernelCoeffs {
    double alpha = 0;
    double beta = 0;
    double eps_cross = 0;
    double normalization = 0;
};

WignerKernelCoeffs wigner_kernel_coeffs(const QBMParams& params, double t);
double wigner_kernel(const WignerKernelCoeffs& c, const QBMParams& params, double t, double p, double X, double p0,
                     double X0);

// Exact propagator of the master equation over a fixed duration, with periodic
// boundaries and minimal-image separations. Multipliers are built once.
class KernelPropagator {
public:
    KernelPropagator(const Grid1D& grid, const QBMParams& params, double t);
    DensityMatrix apply(const DensityMatrix& rho) const;
    double duration() const { return t_; }

private:
    Grid1D grid_;
    QBMParams params_;
    double t_;
    Eigen::MatrixXcd shift_;    // (q, k): translation in xi by v t
    Eigen::MatrixXcd damping_;  // (s, k): unitary phase and decoherence factor
};

DensityMatrix evolve_kernel(const DensityMatrix& rho, const QBMParams& params, double t);

// Absorbing potential V0 (1 - g(x)) with g the window profile of half-width L/2
// and edge smearing a (a = 0 gives a sharp step).
struct ComplexPotential {
    double V0 = 0.0;
    double L = 1.0;
    double a = 0.0;

    void validate() const;
    double operator()(double x) const;
};

// Strang splitting: half position factor, exact kinetic step, half position factor.
class SplitStepper {
public:
    SplitStepper(const Grid1D& grid, const QBMParams& params, std::optional<ComplexPotential> potential, double dt);
    DensityMatrix step(const DensityMatrix& rho, int steps = 1) const;
    double dt() const { return dt_; }

private:
    Grid1D grid_;
    QBMParams params_;
    bool absorbing_;
    double dt_;
    Eigen::MatrixXd position_half_;
    Eigen::MatrixXcd kinetic_;
};

DensityMatrix evolve_stepper(const DensityMatrix& rho, const QBMParams& params,
                             const std::optional<ComplexPotential>& potential, double dt, int steps);

WignerFunction evolve_wigner(const WignerFunction& w, const QBMParams& params, double t);

}  // namespace qzeno

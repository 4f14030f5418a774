#pragma once

#include <utility>

#include "qzeno/lattice.hpp"

namespace qzeno {

enum class ProjectorKind { sharp, smeared };

struct Projector {
    double L = 1.0;
    double a = 0.02;
    ProjectorKind kind = ProjectorKind::smeared;

    static Projector sharp(double L) { return {L, 0.0, ProjectorKind::sharp}; }
    static Projector smeared(double L, double a) { return {L, a, ProjectorKind::smeared}; }
    void validate() const;
};

// Window of half-width L/2: indicator for a = 0, error-function edges of width a otherwise.
double window_profile(double L, double a, double x);
double window_function(const Projector& proj, double x);

struct ProjectionReport {
    double norm_before = 0;
    double norm_after = 0;
    double p2_after = 0;
    double p2_red = 0;
    double delta_term = 0;
    double sigma_term = 0;
    // Unit-trace diagonal density of the incoming state at +L/2 and -L/2.
    double boundary_density_upper = 0;
    double boundary_density_lower = 0;
    // hbar^2 (rho(L/2) + rho(-L/2)) / (2 sqrt(pi) a), renormalized like sigma_term; NaN when sharp.
    double sigma_estimate = 0;

    double boundary_density() const { return 0.5 * (boundary_density_upper + boundary_density_lower); }
};

// Projected state (not renormalized) and the renormalized p^2 decomposition.
std::pair<DensityMatrix, ProjectionReport> apply_projection(const DensityMatrix& rho, const Projector& proj,
                                                            double hbar = 1.0);

WignerFunction project_wigner(const WignerFunction& w, const Projector& proj);

// Diagonal density at x by linear interpolation between straddling lattice points.
double interpolate_diagonal(const DensityMatrix& rho, double x);

struct CutoffScales {
    double p_c = 0;        // m L / eps
    double a = 0;          // hbar / p_c
    double lattice_p = 0;  // pi hbar / eta
};

CutoffScales momentum_cutoff(double m, double L, double eps, double hbar, double eta);

}  // namespace qzeno

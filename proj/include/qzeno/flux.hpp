#pragma once

#include <vector>

#include "qzeno/lattice.hpp"
#include "qzeno/runner.hpp"

namespace qzeno {

// J(x) = (hbar / 2mi) (d_x - d_y) rho(x, y) at x = y, spectral derivatives.
std::vector<double> current(const DensityMatrix& rho, double m = 1.0, double hbar = 1.0);

struct VelocitySample {
    double t = 0;
    std::vector<double> v;
    std::vector<char> valid;  // density above floor
};

inline constexpr double kDensityFloor = 1e-10;

// v = J / rho(x, x); points below kDensityFloor * max density are masked.
VelocitySample velocity(const DensityMatrix& rho, double m = 1.0, double hbar = 1.0);

// Snapshots of v on the lattice. Projection times appear twice, first with the
// field just before the projection and then with the field just after it.
struct VelocityField {
    Grid1D x_grid;
    std::vector<VelocitySample> samples;
};

// Relative residual |d_t rho(x,x) + d_x J| / |d_x J| at rho, with the time
// derivative from centred exact evolution over +-h.
double continuity_residual(const DensityMatrix& rho, const QBMParams& params, double h = 1e-5);

struct FluxPoint {
    double t = 0;
    double x = 0;
};

struct FluxLineSet {
    std::vector<double> seeds;
    std::vector<std::vector<FluxPoint>> trajectories;
    std::vector<char> terminated;
    // Largest drift of each line's density quantile between projections
    // (re-baselined after every projection).
    std::vector<double> quantile_drift;
    // Largest drift over all lines, and whether any pair of lines swapped order.
    double max_quantile_drift = 0;
    bool crossed = false;
    std::vector<double> projection_times;
};

struct FluxOptions {
    int n_lines = 9;
    int substeps = 4;  // RK4 steps per field snapshot interval
};

// Seeds at the k/(n+1) quantiles of the initial density, integrated through the
// piecewise evolution and projection sequence of config.
FluxLineSet trace_flux_lines(const ExperimentConfig& config, const FluxOptions& opts = {});

// Fraction of density to the left of x (linear interpolation of the lattice CDF).
double density_quantile(const DensityMatrix& rho, double x);

struct Recondensation {
    bool detected = false;
    int turning_points = 0;      // outward maxima of |x|
    double max_spread_time = 0;  // first outward maximum
    double recondense_time = 0;  // first inward minimum after it (0 if none yet)
    double cycle = 0;            // mean spacing of outward maxima (0 if fewer than two)
};

// Turning points of |x(t)| on one line, ignoring swings below min_amplitude.
Recondensation recondensation(const std::vector<FluxPoint>& line, double min_amplitude);

}  // namespace qzeno

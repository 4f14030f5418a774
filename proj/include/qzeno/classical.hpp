#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qzeno/grid.hpp"
#include "qzeno/propagators.hpp"
#include "qzeno/runner.hpp"

namespace qzeno {

// Classical phase-space density w(p, x); rows index p, columns index x.
class PhaseSpaceDistribution {
public:
    PhaseSpaceDistribution(Grid1D x_grid, Grid1D p_grid, Eigen::MatrixXd values, double time = 0.0);

    const Grid1D& x_grid() const { return x_grid_; }
    const Grid1D& p_grid() const { return p_grid_; }
    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::MatrixXd& values() { return values_; }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    double mass() const;
    // Moments about the origin, normalized by the mass.
    Moments moments() const;
    std::vector<double> position_marginal() const;

private:
    Grid1D x_grid_;
    Grid1D p_grid_;
    Eigen::MatrixXd values_;
    double time_;
};

// x lattice with cells of width L / cells_inside spanning the region plus margin
// cells either side, p lattice symmetric over [-p_max, p_max].
PhaseSpaceDistribution make_phase_space(double L, int cells_inside, double p_max, int p_points, int margin = 2);

// Continuous absorber zeroes w outside |x| > L/2 after every internal step; a
// gate (gate_eps > 0) does it only at multiples of gate_eps from the start.
struct Absorber {
    double L = 1.0;
    double gate_eps = 0.0;
};

// dw/dt = -(p/m) dw/dx + D d^2w/dp^2: van Leer limited upwind advection
// (periodic in x without an absorber, outflow with one), centred diffusion with
// zero flux at the p ends, SSP-RK2 in time.
PhaseSpaceDistribution evolve_classical(const PhaseSpaceDistribution& w, const QBMParams& params, double t,
                                        const std::optional<Absorber>& absorber);

struct SteadyMode {
    double lambda = 0;  // decay rate in units of (D / m^2 L^2)^(1/3)
    PhaseSpaceDistribution shape;  // dimensional, unit mass
    double x2 = 0;      // <x^2> / L^2
    double p2 = 0;      // <p^2> / p_s^2
    double xp2 = 0;     // 2 <x p> / (L p_s)
    double t_converged = 0;  // scaled time
};

enum class ClassicalStart { uniform, gaussian, cosine };

struct SteadyModeOptions {
    int cells_inside = 200;
    double p_max = 6.0;
    int p_points = 241;
    ClassicalStart start = ClassicalStart::uniform;
    double gate_eps = 0.0;  // scaled time between gates; 0 for the continuous absorber
    double tolerance = 1e-6;
    double max_time = 60.0;
};

// Lattice, start shape and tolerances are set in units x/L, p/p_s, t (D/m^2L^2)^(1/3),
// where the equation has no parameters; the solve itself runs in the given units.
SteadyMode find_steady_mode(const SteadyModeOptions& opts = {}, const QBMParams& params = {1.0, 1.0, 1.0},
                            double L = 1.0);

struct DimensionalMoments {
    double x2 = 0;
    double p2 = 0;
    double xp2 = 0;
    double lambda = 0;
};
DimensionalMoments rescale(const SteadyMode& mode, const QBMParams& params, double L);

enum class LangevinStart { gaussian, uniform };

struct LangevinOptions {
    int n_particles = 20000;
    double t = 1.0;
    double dt = 1e-5;
    double sample_every = 1e-3;
    std::uint64_t seed = 1;
    LangevinStart start = LangevinStart::gaussian;
    double sigma_x = 0.1;  // gaussian start
    double sigma_p = 5.0;
};

struct LangevinResult {
    std::vector<SurvivalPoint> survival;
    int survivors = 0;
    // Survivor moments about the origin with standard errors of the mean.
    double x2 = 0, p2 = 0, xp2 = 0;
    double x2_err = 0, p2_err = 0, xp2_err = 0;
};

// Euler-Maruyama for dx = p/m dt, dp = sqrt(2D) dW, absorbed when |x| > L/2.
// Each particle draws from its own generator seeded from (seed, index).
LangevinResult langevin_oracle(const QBMParams& params, double L, const LangevinOptions& opts);

}  // namespace qzeno

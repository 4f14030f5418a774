#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qzeno/projectors.hpp"
#include "qzeno/propagators.hpp"

namespace qzeno {

enum class InitialKind { gaussian, prepared_steady_state };

struct ExperimentConfig {
    QBMParams qbm;
    Projector proj = Projector::smeared(1.0, 0.02);
    int n = 256;
    double eta = 0.02;
    double eps = 0.01;
    double total_time = 0.2;
    double dt = 0.001;
    InitialKind initial = InitialKind::gaussian;
    double sigma = 0.1;
    double env_switch_on_time = 0.0;
    std::uint64_t seed = 0;
    int prep_max_cycles = 20000;
    double prep_tolerance = 1e-4;
    // Record moments every dt between projections (otherwise only at projections).
    bool record_substeps = true;
    // Stop the sequence once survival falls below this value (0 never stops).
    double stop_survival = 0.0;

    Grid1D grid() const { return Grid1D(n, eta); }
    int steps_per_interval() const;
    int projection_count() const;
    void validate() const;
};

// One record per time; at projection times the moments are those of the
// renormalized projected state, p2_pre is the value just before projecting,
// and the decomposition fields are filled (NaN elsewhere).
struct MomentRecord {
    double t = 0;
    bool projected = false;
    double norm = 0;
    double x2 = 0;
    double p2 = 0;
    double xp_sym = 0;
    double p2_pre = 0;
    double p2_red = 0;
    double delta_term = 0;
    double sigma_term = 0;
    double boundary_density = 0;
};

class MomentSeries {
public:
    void push(const MomentRecord& r);
    const std::vector<MomentRecord>& records() const { return records_; }
    std::vector<MomentRecord> projections() const;
    bool empty() const { return records_.empty(); }

private:
    std::vector<MomentRecord> records_;
};

struct SurvivalPoint {
    double t = 0;
    double p = 0;
};

struct RunResult {
    MomentSeries moments;
    std::vector<SurvivalPoint> survival;
    std::optional<DensityMatrix> final_state;
    bool depleted = false;
};

RunResult run_sequence(const ExperimentConfig& config);
RunResult run_sequence(const ExperimentConfig& config, const DensityMatrix& initial);

struct SteadyState {
    DensityMatrix state;
    int cycles = 0;
    double p2 = 0;
    std::vector<double> p2_history;
};

// Projection-evolution cycles with the environment off until the renormalized
// p^2 changes by less than prep_tolerance between cycles.
SteadyState prepare_steady_state(const ExperimentConfig& config);
SteadyState prepare_steady_state(const ExperimentConfig& config, const DensityMatrix& start);

DensityMatrix initial_state(const ExperimentConfig& config);

// First crossing of p = 0.5 by linear interpolation; nullopt when never crossed.
std::optional<double> half_life(const std::vector<SurvivalPoint>& survival);

}  // namespace qzeno

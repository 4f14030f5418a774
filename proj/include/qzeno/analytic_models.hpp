#pragma once

#include <Eigen/Dense>

namespace qzeno {

enum class LindbladAxis { x, y };

// Two-level system, H = omega sigma_x, Lindblad operator sqrt(D) sigma_axis,
// projections onto spin up.
struct SpinModelParams {
    double omega = 1.0;
    double D = 0.0;
    LindbladAxis axis = LindbladAxis::x;

    void validate() const;
};

double spin_survival_single(const SpinModelParams& params, double t);
double spin_zeno_sequence(const SpinModelParams& params, double eps, int N);
// RK4 on the 2x2 master equation starting from spin up.
Eigen::Matrix2cd spin_lindblad_numeric(const SpinModelParams& params, double t, double dt);

// Point particle repeatedly projected onto the Gaussian it started in.
struct GaussianModelParams {
    double sigma = 0.1;
    double D = 0.0;
    double m = 1.0;
    double hbar = 1.0;

    void validate() const;
    double t_z() const { return m * sigma * sigma / hbar; }
    double t_d() const;  // infinite when D = 0
};

double gaussian_overlap(const GaussianModelParams& params, double t);

}  // namespace qzeno

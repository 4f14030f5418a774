#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qzeno/grid.hpp"

namespace qzeno {

using cplx = std::complex<double>;

// rho(x_i, y_j) stored as values()(i, j). The operator trace is eta * sum_i rho(i, i).
class DensityMatrix {
public:
    DensityMatrix(Grid1D grid, Eigen::MatrixXcd values, double time = 0.0);

    const Grid1D& grid() const { return grid_; }
    const Eigen::MatrixXcd& values() const { return values_; }
    double time() const { return time_; }
    int size() const { return grid_.size(); }

    cplx operator()(int i, int j) const { return values_(i, j); }
    double trace() const;
    std::vector<double> diagonal() const;
    // Max |rho - rho^dagger| relative to max |rho|.
    double hermiticity_defect() const;
    // Largest |rho| on the outermost lattice rows and columns relative to max |rho|.
    double edge_fraction() const;

private:
    Grid1D grid_;
    Eigen::MatrixXcd values_;
    double time_;
};

// W(p_k, X_i) stored as values()(i, k) with p_k = (k - n/2) * dp.
class WignerFunction {
public:
    WignerFunction(Grid1D x_grid, double hbar, Eigen::MatrixXd values, double time = 0.0);

    const Grid1D& x_grid() const { return x_grid_; }
    const Grid1D& p_grid() const { return p_grid_; }
    double hbar() const { return hbar_; }
    const Eigen::MatrixXd& values() const { return values_; }
    double time() const { return time_; }

    double total() const;
    std::vector<double> position_marginal() const;
    std::vector<double> momentum_marginal() const;

private:
    Grid1D x_grid_;
    Grid1D p_grid_;
    double hbar_;
    Eigen::MatrixXd values_;
    double time_;
};

struct Moments {
    double norm = 0;
    double x2 = 0;
    double p2 = 0;
    double xp_sym = 0;
};

// Exact lattice Wigner transform. Requires n divisible by 4.
WignerFunction wigner_transform(const DensityMatrix& rho, double hbar = 1.0);
DensityMatrix inverse_wigner(const WignerFunction& w);
// Largest imaginary part the transform produced before it was discarded.
double wigner_imaginary_residual(const DensityMatrix& rho, double hbar = 1.0);

Moments moments(const DensityMatrix& rho, double hbar = 1.0);
// Unnormalized eta * Tr(P^2 rho) with P the spectral momentum operator.
double spectral_p2_trace(const Eigen::MatrixXcd& m, double eta, double hbar);
// Finite-difference alternative: hbar^2 d^2 rho / dx dy on the diagonal, normalized.
double finite_difference_p2(const DensityMatrix& rho, double hbar = 1.0);
// Wigner second moments {x2, p2} normalized by the Wigner total.
std::pair<double, double> wigner_second_moments(const WignerFunction& w);

// P applied from the left: columns transformed to momentum, scaled, returned.
Eigen::MatrixXcd apply_momentum_left(const Eigen::MatrixXcd& m, double eta, double hbar);

// Pure Gaussian rho(x,y) = exp(-(x^2+y^2)/(4 sigma^2)) / sqrt(2 pi sigma^2), times exp(i k (x - y)).
DensityMatrix gaussian_state(const Grid1D& grid, double sigma, double boost_k = 0.0, double centre = 0.0);
DensityMatrix pure_state(const Grid1D& grid, const Eigen::VectorXcd& psi);
DensityMatrix normalized(const DensityMatrix& rho);

}  // namespace qzeno

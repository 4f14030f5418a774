#include "qzeno/grid.hpp"

#include <cmath>
#include <numbers>

#include "qzeno/error.hpp"

namespace qzeno {

Grid1D::Grid1D(int n_points, double spacing) : n_(n_points), spacing_(spacing) {
    if (n_points < 8) throw ConfigError("lattice.n must be at least 8");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ConfigError("lattice.eta must be positive");
}

std::vector<double> Grid1D::coordinates() const {
    std::vector<double> x(n_);
    for (int i = 0; i < n_; ++i) x[i] = coordinate(i);
    return x;
}

Grid1D Grid1D::momentum_grid(double hbar) const {
    return Grid1D(n_, 2.0 * std::numbers::pi * hbar / (n_ * spacing_));
}

std::vector<double> fft_momenta(int n, double spacing, double hbar) {
    std::vector<double> p(n);
    const double dp = 2.0 * std::numbers::pi * hbar / (n * spacing);
    for (int k = 0; k < n; ++k) p[k] = fft_index(k, n) * dp;
    return p;
}

}  // namespace qzeno

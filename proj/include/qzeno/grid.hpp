#pragma once

#include <vector>

namespace qzeno {

// Origin-centred uniform lattice: x_i = (i - n/2) * spacing.
class Grid1D {
public:
    Grid1D(int n_points, double spacing);

    int size() const { return n_; }
    double spacing() const { return spacing_; }
    double coordinate(int i) const { return (i - n_ / 2) * spacing_; }
    double lower() const { return coordinate(0); }
    double extent() const { return n_ * spacing_; }
    std::vector<double> coordinates() const;

    // Conjugate momentum lattice with spacing 2*pi*hbar/(n*spacing).
    Grid1D momentum_grid(double hbar) const;

    bool operator==(const Grid1D& o) const { return n_ == o.n_ && spacing_ == o.spacing_; }

private:
    int n_;
    double spacing_;
};

// Momentum of each FFT bin (bin n/2 is assigned -n/2).
std::vector<double> fft_momenta(int n, double spacing, double hbar);

// Signed FFT index in [-n/2, n/2).
inline int fft_index(int k, int n) { return k < n / 2 ? k : k - n; }

}  // namespace qzeno

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qzeno::fft {

using cplx = std::complex<double>;

// Unnormalized in-place DFTs. sign = -1 is forward, +1 is backward.
// Plans are cached process-wide; execution is thread-safe.
void columns(Eigen::MatrixXcd& a, int sign);
void rows(Eigen::MatrixXcd& a, int sign);
void vector(cplx* data, int n, int sign);
inline void vector(std::vector<cplx>& v, int sign) { vector(v.data(), static_cast<int>(v.size()), sign); }

// 2n x 2n band-limited interpolation of a periodic n x n array; the Nyquist
// bin is split evenly between +n/2 and -n/2 so real data stays real.
Eigen::MatrixXcd upsample2(const Eigen::MatrixXcd& a);

}  // namespace qzeno::fft

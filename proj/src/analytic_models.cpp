#include "qzeno/analytic_models.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "qzeno/error.hpp"

namespace qzeno {

void SpinModelParams::validate() const {
    if (!(omega > 0)) throw ArgumentError("spin model: omega must be positive");
    if (!(D >= 0)) throw ArgumentError("spin model: D must be non-negative");
}

namespace {

// s_z(t) for the sigma_y channel. Solves s_z'' + 4D s_z' + 4 omega^2 s_z = 0
// with s_z(0) = 1, s_z'(0) = -4D.
double sz_axis_y(double omega, double D, double t) {
    const double decay = std::exp(-2.0 * D * t);
    const double disc = omega * omega - D * D;
    const double scale = std::max(omega * omega, D * D);
    if (std::abs(disc) < 1e-12 * scale) return decay * (1.0 - 2.0 * D * t);
    if (disc > 0) {
        const double r = std::sqrt(disc);
        return decay * (std::cos(2.0 * r * t) - (D / r) * std::sin(2.0 * r * t));
    }
    const double r = std::sqrt(-disc);
    return decay * (std::cosh(2.0 * r * t) - (D / r) * std::sinh(2.0 * r * t));
}

}  // namespace

double spin_survival_single(const SpinModelParams& params, double t) {
    params.validate();
    if (t < 0) throw ArgumentError("spin model: t must be non-negative");
    const double sz = params.axis == LindbladAxis::x
                          ? std::exp(-4.0 * params.D * t) * std::cos(2.0 * params.omega * t)
                          : sz_axis_y(params.omega, params.D, t);
    return 0.5 * (1.0 + sz);
}

double spin_zeno_sequence(const SpinModelParams& params, double eps, int N) {
    if (N < 1) throw ArgumentError("spin model: N must be at least 1");
    if (!(eps > 0)) throw ArgumentError("spin model: eps must be positive");
    return std::pow(spin_survival_single(params, eps), N);
}

Eigen::Matrix2cd spin_lindblad_numeric(const SpinModelParams& params, double t, double dt) {
    params.validate();
    if (t < 0 || !(dt > 0)) throw ArgumentError("spin model: need t >= 0 and dt > 0");
    using M = Eigen::Matrix2cd;
    const std::complex<double> I(0, 1);
    M sx, sy;
    sx << 0, 1, 1, 0;
    sy << 0, -I, I, 0;
    const M H = params.omega * sx;
    const M Lop = std::sqrt(params.D) * (params.axis == LindbladAxis::x ? sx : sy);
    auto rhs = [&](const M& r) -> M {
        const M inner = Lop * r - r * Lop;
        return -I * (H * r - r * H) - (Lop * inner - inner * Lop);
    };
    M rho = M::Zero();
    rho(0, 0) = 1.0;
    const long steps = std::max(1L, std::lround(std::ceil(t / dt - 1e-9)));
    const double h = t / static_cast<double>(steps);
    if (t == 0) return rho;
    for (long i = 0; i < steps; ++i) {
        const M k1 = rhs(rho);
        const M k2 = rhs(rho + 0.5 * h * k1);
        const M k3 = rhs(rho + 0.5 * h * k2);
        const M k4 = rhs(rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

void GaussianModelParams::validate() const {
    if (!(sigma > 0)) throw ArgumentError("gaussian model: sigma must be positive");
    if (!(D >= 0)) throw ArgumentError("gaussian model: D must be non-negative");
    if (!(m > 0) || !(hbar > 0)) throw ArgumentError("gaussian model: m and hbar must be positive");
}

double GaussianModelParams::t_d() const {
    if (D == 0) return std::numeric_limits<double>::infinity();
    return hbar * hbar / (D * sigma * sigma);
}

double gaussian_overlap(const GaussianModelParams& params, double t) {
    params.validate();
    if (t < 0) throw ArgumentError("gaussian model: t must be non-negative");
    const double tz = params.t_z();
    const double rd = params.D * params.sigma * params.sigma / (params.hbar * params.hbar);  // 1/t_d
    // Overlap of two Gaussian Wigner functions, 2 pi hbar / sqrt(det(S0 + St)) with
    // St the free shear plus diffusion of S0; the determinant factors as below.
    const double spread = 1.0 + t * t / (16.0 * tz * tz) * (1.0 + 4.0 * t * rd / 3.0);
    return 1.0 / std::sqrt((1.0 + 4.0 * t * rd) * spread);
}

}  // namespace qzeno

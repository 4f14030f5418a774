#include "qzeno/propagators.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <string>

#include "qzeno/error.hpp"
#include "qzeno/fft.hpp"
#include "qzeno/projectors.hpp"

namespace qzeno {

namespace {

constexpr double kPi = std::numbers::pi;

int wrap(int i, int n) { return ((i % n) + n) % n; }

// Exponential with a cross term whose sign is ambiguous at a Nyquist bin:
// averaging both signs keeps the result real-symmetric.
double decay_with_cross(double quadratic, double cross, bool ambiguous) {
    // quadratic >= |cross|, so the split form cannot overflow where exp * cosh gives 0 * inf.
    return ambiguous ? 0.5 * (std::exp(-quadratic + cross) + std::exp(-quadratic - cross))
                     : std::exp(-quadratic - cross);
}

}  // namespace

void QBMParams::validate() const {
    if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("qbm.m must be positive");
    if (!(D >= 0.0) || !std::isfinite(D)) throw ConfigError("qbm.D must be non-negative");
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ConfigError("qbm.hbar must be positive");
}

WignerKernelCoeffs wigner_kernel_coeffs(const QBMParams& params, double t) {
    if (!(t > 0.0)) throw ArgumentError("kernel coefficients need t > 0");
    if (!(params.D > 0.0)) throw ArgumentError("kernel coefficients need D > 0");
    const double D = params.D, m = params.m;
    WignerKernelCoeffs c;
    c.alpha = 1.0 / (D * t);
    c.beta = 3.0 * m * m / (D * t * t * t);
    c.eps_cross = -3.0 * m / (D * t * t);
    c.normalization = std::sqrt(4.0 * c.alpha * c.beta - c.eps_cross * c.eps_cross) / (2.0 * kPi);
    return c;
}

double wigner_kernel(const WignerKernelCoeffs& c, const QBMParams& params, double t, double p, double X, double p0,
                     double X0) {
    const double u = p - p0;
    const double w = X - X0 - p0 * t / params.m;
    return c.normalization * std::exp(-c.alpha * u * u - c.beta * w * w - c.eps_cross * u * w);
}

// The state is resampled on a grid of spacing eta/2 before it is sheared into
// (y, xi) coordinates, so the sheared y-frequencies never wrap.
KernelPropagator::KernelPropagator(const Grid1D& grid, const QBMParams& params, double t)
    : grid_(grid), params_(params), t_(t) {
    params.validate();
    if (!(t > 0.0) || !std::isfinite(t)) throw ArgumentError("evolution time must be positive");
    const int n = grid.size();
    const int N = 2 * n;
    const double eta = grid.spacing();
    const double hb = params.hbar, m = params.m, D = params.D;
    const auto k_fine = fft_momenta(N, eta / 2.0, 1.0);
    const auto q = fft_momenta(n, eta, 1.0);

    shift_.resize(n, N);
    damping_.resize(n, N);
    for (int kk = 0; kk < N; ++kk) {
        const double k = k_fine[kk];
        const double v = hb * k / m;
        const bool k_nyq = kk == N / 2;
        for (int qq = 0; qq < n; ++qq) {
            const double arg = q[qq] * v * t;
            shift_(qq, kk) = (k_nyq || qq == n / 2) ? cplx(std::cos(arg), 0.0) : std::polar(1.0, -arg);
        }
        const cplx phase = std::polar(1.0, hb * k * k * t / (2.0 * m));
        for (int s = 0; s < n; ++s) {
            const double xi = fft_index(s, n) * eta;
            const double quad = (D / (hb * hb)) * (xi * xi * t + v * v * t * t * t / 3.0);
            const double cross = -(D / (hb * hb)) * xi * v * t * t;
            damping_(s, kk) = phase * decay_with_cross(quad, cross, k_nyq || s == n / 2);
        }
    }
}

DensityMatrix KernelPropagator::apply(const DensityMatrix& rho) const {
    if (!(rho.grid() == grid_)) throw ConfigError("state grid does not match the propagator grid");
    const int n = grid_.size();
    const int N = 2 * n;
    const Eigen::MatrixXcd up = fft::upsample2(rho.values());

    Eigen::MatrixXcd b(n, N);
    for (int jj = 0; jj < N; ++jj)
        for (int s = 0; s < n; ++s) b(s, jj) = up(wrap(jj + 2 * fft_index(s, n), N), jj);

    fft::rows(b, FFTW_FORWARD);
    fft::columns(b, FFTW_FORWARD);
    b.array() *= shift_.array();
    fft::columns(b, FFTW_BACKWARD);
    b.array() *= damping_.array();
    fft::rows(b, FFTW_BACKWARD);
    b /= static_cast<double>(n) * N;

    Eigen::MatrixXcd out(n, n);
    for (int j = 0; j < n; ++j)
        for (int s = 0; s < n; ++s) out(wrap(j + fft_index(s, n), n), j) = b(s, 2 * j);
    // Content near the lattice Nyquist momentum leaves a ~1e-7 anti-Hermitian residue;
    // the exact evolution is Hermitian, so keeping the Hermitian part only removes error.
    const Eigen::MatrixXcd herm = 0.5 * (out + out.adjoint());
    return DensityMatrix(grid_, herm, rho.time() + t_);
}

DensityMatrix evolve_kernel(const DensityMatrix& rho, const QBMParams& params, double t) {
    return KernelPropagator(rho.grid(), params, t).apply(rho);
}

void ComplexPotential::validate() const {
    if (!(V0 >= 0.0) || !std::isfinite(V0)) throw ConfigError("potential V0 must be non-negative");
    if (!(L > 0.0)) throw ConfigError("potential L must be positive");
    if (!(a >= 0.0)) throw ConfigError("potential smearing must be non-negative");
}

double ComplexPotential::operator()(double x) const { return V0 * (1.0 - window_profile(L, a, x)); }

SplitStepper::SplitStepper(const Grid1D& grid, const QBMParams& params, std::optional<ComplexPotential> potential,
                           double dt)
    : grid_(grid), params_(params), absorbing_(potential && potential->V0 > 0.0), dt_(dt) {
    params.validate();
    if (!(dt > 0.0)) throw ArgumentError("time step must be positive");
    if (potential) potential->validate();
    const int n = grid.size();
    const double hb = params.hbar;
    std::vector<double> V(n, 0.0);
    if (potential)
        for (int i = 0; i < n; ++i) V[i] = (*potential)(grid.coordinate(i));
    position_half_.resize(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double r = grid.coordinate(i) - grid.coordinate(j);
            const double rate = (V[i] + V[j]) / hb + params.D * r * r / (hb * hb);
            position_half_(i, j) = std::exp(-0.5 * dt * rate);
        }
    const auto p = fft_momenta(n, grid.spacing(), hb);
    kinetic_.resize(n, n);
    const double norm = 1.0 / (static_cast<double>(n) * n);
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            kinetic_(k, l) = std::polar(norm, -(p[k] * p[k] - p[l] * p[l]) * dt / (2.0 * params.m * hb));
}

DensityMatrix SplitStepper::step(const DensityMatrix& rho, int steps) const {
    if (steps < 0) throw ArgumentError("step count must be non-negative");
    if (!(rho.grid() == grid_)) throw ConfigError("state grid does not match the stepper grid");
    Eigen::MatrixXcd m = rho.values();
    const double start = rho.trace();
    for (int s = 0; s < steps; ++s) {
        m.array() *= position_half_.array();
        fft::columns(m, FFTW_FORWARD);
        fft::rows(m, FFTW_BACKWARD);
        m.array() *= kinetic_.array();
        fft::columns(m, FFTW_BACKWARD);
        fft::rows(m, FFTW_FORWARD);
        m.array() *= position_half_.array();
    }
    DensityMatrix out(grid_, std::move(m), rho.time() + steps * dt_);
    const double end = out.trace();
    if (!std::isfinite(end)) throw NumericalError("stepper produced non-finite values");
    if (!absorbing_ && start > 0.0 && end > start * (1.0 + 1e-3))
        throw NumericalError("stepper norm grew by more than 1e-3: " + std::to_string(end / start - 1.0));
    return out;
}

DensityMatrix evolve_stepper(const DensityMatrix& rho, const QBMParams& params,
                             const std::optional<ComplexPotential>& potential, double dt, int steps) {
    if (steps == 0) return rho;
    return SplitStepper(rho.grid(), params, potential, dt).step(rho, steps);
}

// Fourier over X turns the classical shear into a phase; the momentum
// diffusion is a Gaussian convolution in p, applied as a multiplier in xi.
WignerFunction evolve_wigner(const WignerFunction& w, const QBMParams& params, double t) {
    params.validate();
    if (!(t > 0.0) || !std::isfinite(t)) throw ArgumentError("evolution time must be positive");
    const int n = w.x_grid().size();
    const double eta = w.x_grid().spacing();
    const double hb = params.hbar, m = params.m;
    const double Dt = params.D < 1e-8 ? 0.0 : params.D * t;
    const auto kx = fft_momenta(n, eta, 1.0);

    Eigen::MatrixXcd a = w.values().cast<cplx>();
    fft::columns(a, FFTW_FORWARD);
    if (Dt > 0.0) {
        fft::rows(a, FFTW_FORWARD);
        for (int s = 0; s < n; ++s) {
            const double xi = fft_index(s, n) * eta / hb;
            for (int kk = 0; kk < n; ++kk) {
                const double beta = kx[kk] * t / (2.0 * m);
                a(kk, s) *= decay_with_cross(Dt * (xi * xi + beta * beta), -2.0 * Dt * xi * beta,
                                             kk == n / 2 || s == n / 2);
            }
        }
        fft::rows(a, FFTW_BACKWARD);
        a /= static_cast<double>(n);
    }
    for (int kc = 0; kc < n; ++kc) {
        const double p = w.p_grid().coordinate(kc);
        for (int kk = 0; kk < n; ++kk) {
            const double k = kx[kk];
            const double arg = k * p * t / m;
            const double decay = std::exp(-k * k * params.D * t * t * t / (12.0 * m * m));
            a(kk, kc) *= kk == n / 2 ? cplx(decay * std::cos(arg), 0.0) : std::polar(decay, -arg);
        }
    }
    fft::columns(a, FFTW_BACKWARD);
    Eigen::MatrixXd out = a.real() / static_cast<double>(n);
    return WignerFunction(w.x_grid(), w.hbar(), std::move(out), w.time() + t);
}

}  // namespace qzeno

#include "qzeno/lattice.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

#include "qzeno/error.hpp"
#include "qzeno/fft.hpp"

namespace qzeno {

namespace {

constexpr double kPi = std::numbers::pi;

int wrap(int i, int n) { return ((i % n) + n) % n; }

// Resamples g, given at half-integer points j + 1/2, onto the integer points.
void half_shift(std::vector<cplx>& g, bool inverse) {
    const int n = static_cast<int>(g.size());
    fft::vector(g, FFTW_FORWARD);
    for (int k = 0; k < n; ++k) {
        if (k == n / 2) continue;
        const double phase = (inverse ? 1.0 : -1.0) * kPi * fft_index(k, n) / n;
        g[k] *= std::polar(1.0 / n, phase);
    }
    g[n / 2] /= n;
    fft::vector(g, FFTW_BACKWARD);
}

// c(i, s): rho sampled along the anti-diagonal through X_i with separation xi = d*eta.
Eigen::MatrixXcd rotate(const Eigen::MatrixXcd& m) {
    const int n = static_cast<int>(m.rows());
    Eigen::MatrixXcd c(n, n);
    std::vector<cplx> g(n);
    for (int s = 0; s < n; ++s) {
        const int d = fft_index(s, n);
        if (d % 2 == 0) {
            for (int i = 0; i < n; ++i) c(i, s) = m(wrap(i + d / 2, n), wrap(i - d / 2, n));
        } else {
            for (int j = 0; j < n; ++j) g[j] = m(wrap(j + (d + 1) / 2, n), wrap(j - (d - 1) / 2, n));
            half_shift(g, false);
            for (int i = 0; i < n; ++i) c(i, s) = g[i];
        }
    }
    // The xi = -n*eta/2 column pairs X_i with X_{i+n/2} as complex conjugates;
    // store it in Hartley form so the transform over xi stays real.
    const int s = n / 2;
    for (int i = 0; i < n; ++i) c(i, s) = c(i, s).real() + c(i, s).imag();
    return c;
}

Eigen::MatrixXcd unrotate(Eigen::MatrixXcd c) {
    const int n = static_cast<int>(c.rows());
    {
        const int s = n / 2;
        std::vector<double> r(n);
        for (int i = 0; i < n; ++i) r[i] = c(i, s).real();
        for (int i = 0; i < n; ++i) {
            const double partner = r[wrap(i + n / 2, n)];
            c(i, s) = cplx(0.5 * (r[i] + partner), 0.5 * (r[i] - partner));
        }
    }
    Eigen::MatrixXcd m(n, n);
    std::vector<cplx> g(n);
    for (int s = 0; s < n; ++s) {
        const int d = fft_index(s, n);
        if (d % 2 == 0) {
            for (int i = 0; i < n; ++i) m(wrap(i + d / 2, n), wrap(i - d / 2, n)) = c(i, s);
        } else {
            for (int i = 0; i < n; ++i) g[i] = c(i, s);
            half_shift(g, true);
            for (int j = 0; j < n; ++j) m(wrap(j + (d + 1) / 2, n), wrap(j - (d - 1) / 2, n)) = g[j];
        }
    }
    return m;
}

void require_wigner_size(int n) {
    if (n % 4 != 0) throw ConfigError("lattice.n must be divisible by 4 for the Wigner transform");
}

Eigen::MatrixXcd wigner_complex(const DensityMatrix& rho, double hbar) {
    const int n = rho.size();
    require_wigner_size(n);
    Eigen::MatrixXcd c = rotate(rho.values());
    fft::rows(c, FFTW_FORWARD);
    c *= rho.grid().spacing() / (2.0 * kPi * hbar);
    return c;
}

}  // namespace

DensityMatrix::DensityMatrix(Grid1D grid, Eigen::MatrixXcd values, double time)
    : grid_(grid), values_(std::move(values)), time_(time) {
    if (values_.rows() != grid_.size() || values_.cols() != grid_.size())
        throw ConfigError("density matrix shape does not match its grid");
}

double DensityMatrix::trace() const { return grid_.spacing() * values_.diagonal().real().sum(); }

std::vector<double> DensityMatrix::diagonal() const {
    std::vector<double> d(size());
    for (int i = 0; i < size(); ++i) d[i] = values_(i, i).real();
    return d;
}

double DensityMatrix::hermiticity_defect() const {
    const double scale = values_.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (values_ - values_.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double DensityMatrix::edge_fraction() const {
    const double scale = values_.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    const int n = size();
    const double edge = std::max({values_.row(0).cwiseAbs().maxCoeff(), values_.row(n - 1).cwiseAbs().maxCoeff(),
                                  values_.col(0).cwiseAbs().maxCoeff(), values_.col(n - 1).cwiseAbs().maxCoeff()});
    return edge / scale;
}

WignerFunction::WignerFunction(Grid1D x_grid, double hbar, Eigen::MatrixXd values, double time)
    : x_grid_(x_grid), p_grid_(x_grid.momentum_grid(hbar)), hbar_(hbar), values_(std::move(values)), time_(time) {
    if (values_.rows() != x_grid_.size() || values_.cols() != x_grid_.size())
        throw ConfigError("Wigner function shape does not match its grid");
}

double WignerFunction::total() const { return values_.sum() * x_grid_.spacing() * p_grid_.spacing(); }

std::vector<double> WignerFunction::position_marginal() const {
    std::vector<double> out(x_grid_.size());
    for (int i = 0; i < x_grid_.size(); ++i) out[i] = values_.row(i).sum() * p_grid_.spacing();
    return out;
}

std::vector<double> WignerFunction::momentum_marginal() const {
    std::vector<double> out(p_grid_.size());
    for (int k = 0; k < p_grid_.size(); ++k) out[k] = values_.col(k).sum() * x_grid_.spacing();
    return out;
}

WignerFunction wigner_transform(const DensityMatrix& rho, double hbar) {
    const Eigen::MatrixXcd c = wigner_complex(rho, hbar);
    const int n = rho.size();
    Eigen::MatrixXd w(n, n);
    for (int kf = 0; kf < n; ++kf) w.col(wrap(kf + n / 2, n)) = c.col(kf).real();
    return WignerFunction(rho.grid(), hbar, std::move(w), rho.time());
}

double wigner_imaginary_residual(const DensityMatrix& rho, double hbar) {
    return wigner_complex(rho, hbar).imag().cwiseAbs().maxCoeff();
}

DensityMatrix inverse_wigner(const WignerFunction& w) {
    const int n = w.x_grid().size();
    require_wigner_size(n);
    Eigen::MatrixXcd c(n, n);
    for (int kf = 0; kf < n; ++kf) c.col(kf) = w.values().col(wrap(kf + n / 2, n)).cast<cplx>();
    fft::rows(c, FFTW_BACKWARD);
    c *= 2.0 * kPi * w.hbar() / (w.x_grid().spacing() * n);
    return DensityMatrix(w.x_grid(), unrotate(std::move(c)), w.time());
}

Eigen::MatrixXcd apply_momentum_left(const Eigen::MatrixXcd& m, double eta, double hbar) {
    const int n = static_cast<int>(m.rows());
    const auto p = fft_momenta(n, eta, hbar);
    Eigen::MatrixXcd z = m;
    fft::columns(z, FFTW_FORWARD);
    for (int k = 0; k < n; ++k) z.row(k) *= p[k] / n;
    fft::columns(z, FFTW_BACKWARD);
    return z;
}

double spectral_p2_trace(const Eigen::MatrixXcd& m, double eta, double hbar) {
    const int n = static_cast<int>(m.rows());
    const auto p = fft_momenta(n, eta, hbar);
    Eigen::MatrixXcd z = m;
    fft::columns(z, FFTW_FORWARD);
    fft::rows(z, FFTW_BACKWARD);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += p[k] * p[k] * z(k, k).real();
    return eta * acc / n;
}

Moments moments(const DensityMatrix& rho, double hbar) {
    const double eta = rho.grid().spacing();
    Moments out;
    out.norm = rho.trace();
    if (!(out.norm >= 1e-12)) throw DepletedStateError("moments of a depleted state (trace below 1e-12)");
    double x2 = 0.0;
    for (int i = 0; i < rho.size(); ++i) {
        const double x = rho.grid().coordinate(i);
        x2 += x * x * rho(i, i).real();
    }
    out.x2 = eta * x2 / out.norm;
    out.p2 = spectral_p2_trace(rho.values(), eta, hbar) / out.norm;
    const Eigen::MatrixXcd pm = apply_momentum_left(rho.values(), eta, hbar);
    double xp = 0.0;
    for (int i = 0; i < rho.size(); ++i) xp += rho.grid().coordinate(i) * pm(i, i).real();
    out.xp_sym = 2.0 * eta * xp / out.norm;
    return out;
}

double finite_difference_p2(const DensityMatrix& rho, double hbar) {
    const int n = rho.size();
    const double eta = rho.grid().spacing();
    double acc = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const cplx mixed = rho(i + 1, i + 1) - rho(i + 1, i - 1) - rho(i - 1, i + 1) + rho(i - 1, i - 1);
        acc += mixed.real() / (4.0 * eta * eta);
    }
    return hbar * hbar * eta * acc / rho.trace();
}

std::pair<double, double> wigner_second_moments(const WignerFunction& w) {
    const int n = w.x_grid().size();
    double tot = 0, x2 = 0, p2 = 0;
    for (int k = 0; k < n; ++k) {
        const double p = w.p_grid().coordinate(k);
        for (int i = 0; i < n; ++i) {
            const double x = w.x_grid().coordinate(i);
            const double v = w.values()(i, k);
            tot += v;
            x2 += x * x * v;
            p2 += p * p * v;
        }
    }
    return {x2 / tot, p2 / tot};
}

DensityMatrix gaussian_state(const Grid1D& grid, double sigma, double boost_k, double centre) {
    if (!(sigma > 0.0)) throw ConfigError("init.sigma must be positive");
    const int n = grid.size();
    Eigen::VectorXcd psi(n);
    const double amp = std::pow(2.0 * kPi * sigma * sigma, -0.25);
    for (int i = 0; i < n; ++i) {
        const double x = grid.coordinate(i);
        psi(i) = std::polar(amp * std::exp(-(x - centre) * (x - centre) / (4.0 * sigma * sigma)), boost_k * x);
    }
    return pure_state(grid, psi);
}

DensityMatrix pure_state(const Grid1D& grid, const Eigen::VectorXcd& psi) {
    return DensityMatrix(grid, psi * psi.adjoint());
}

DensityMatrix normalized(const DensityMatrix& rho) {
    const double tr = rho.trace();
    if (!(tr >= 1e-12)) throw DepletedStateError("cannot renormalize a depleted state");
    return DensityMatrix(rho.grid(), rho.values() / tr, rho.time());
}

}  // namespace qzeno

#include "qzeno/projectors.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qzeno/error.hpp"
#include "qzeno/fft.hpp"

namespace qzeno {

namespace {

constexpr double kPi = std::numbers::pi;

int wrap(int i, int n) { return ((i % n) + n) % n; }

// 16-point Gauss-Legendre nodes and weights on [-1, 1] (positive half).
constexpr std::array<double, 8> kGLx = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                        0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                        0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGLw = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                        0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                        0.0622535239386479, 0.0271524594117541};

template <class F>
double gauss_legendre(F&& f, double lo, double hi, int panels) {
    double acc = 0.0;
    const double h = (hi - lo) / panels;
    for (int k = 0; k < panels; ++k) {
        const double c = lo + (k + 0.5) * h;
        const double r = 0.5 * h;
        for (int j = 0; j < 8; ++j) acc += kGLw[j] * r * (f(c - r * kGLx[j]) + f(c + r * kGLx[j]));
    }
    return acc;
}

Eigen::MatrixXcd scale_rows(Eigen::MatrixXcd z, const std::vector<double>& g) {
    for (int i = 0; i < static_cast<int>(g.size()); ++i) z.row(i) *= g[i];
    return z;
}

double left_trace(const Eigen::MatrixXcd& z, double eta) { return eta * z.diagonal().real().sum(); }

// Smeared kernel in p at fixed X: the X-bar integral of the Gaussian edge
// profile times sin((L - 2|X-bar|) u / hbar) / (pi u), with exp(-a^2 u^2 / hbar^2).
double smeared_kernel(double X, double u, double L, double a, double hbar) {
    const double damp = std::exp(-a * a * u * u / (hbar * hbar));
    if (damp < 1e-18) return 0.0;
    auto f = [&](double xb) {
        const double ell = L - 2.0 * std::abs(xb);
        const double s = std::abs(u) < 1e-14 ? ell / hbar : std::sin(ell * u / hbar) / u;
        return std::exp(-(X - xb) * (X - xb) / (a * a)) * s;
    };
    const double reach = 9.0 * a;
    double total = 0.0;
    const std::array<std::pair<double, double>, 2> halves{{{-0.5 * L, 0.0}, {0.0, 0.5 * L}}};
    for (auto [lo, hi] : halves) {
        lo = std::max(lo, X - reach);
        hi = std::min(hi, X + reach);
        if (hi <= lo) continue;
        // Resolve both the Gaussian (width a) and the oscillation 2u/hbar.
        const double scale = std::min(a, hbar / (2.0 * std::abs(u) + 1e-300));
        const int panels = std::max(2, static_cast<int>(std::ceil((hi - lo) / (1.5 * scale))));
        total += gauss_legendre(f, lo, hi, panels);
    }
    return damp * total / (kPi * std::sqrt(kPi) * a);
}

}  // namespace

void Projector::validate() const {
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("proj.L must be positive");
    if (kind == ProjectorKind::smeared) {
        if (!(a > 0.0)) throw ConfigError("proj.a must be positive for a smeared projector");
        if (!(a < L / 4.0)) throw ConfigError("proj.a must be smaller than proj.L / 4");
    } else if (a != 0.0) {
        throw ConfigError("proj.a must be 0 for a sharp projector");
    }
}

double window_profile(double L, double a, double x) {
    if (a <= 0.0) return std::abs(x) <= 0.5 * L * (1.0 + 1e-12) ? 1.0 : 0.0;
    const double s = std::sqrt(2.0) * a;
    return 0.5 * (std::erf((x + 0.5 * L) / s) - std::erf((x - 0.5 * L) / s));
}

double window_function(const Projector& proj, double x) {
    return window_profile(proj.L, proj.kind == ProjectorKind::sharp ? 0.0 : proj.a, x);
}

double interpolate_diagonal(const DensityMatrix& rho, double x) {
    const auto& g = rho.grid();
    const double u = (x - g.lower()) / g.spacing();
    const int i = static_cast<int>(std::floor(u));
    if (i < 0 || i + 1 >= g.size()) return 0.0;
    const double f = u - i;
    return (1.0 - f) * rho(i, i).real() + f * rho(i + 1, i + 1).real();
}

// With G = diag(g) and P the spectral momentum operator, the projected p^2 obeys
// Tr(P^2 G rho G) = Tr(P G^2 P rho) + [2 Re Tr(P G P G rho) - 2 Tr(P G^2 P rho)]
//                 + [Tr(P G^2 P rho) + Tr(P^2 G rho G) - 2 Re Tr(P G P G rho)],
// the first two brackets vanishing with the commutator [P, G].
std::pair<DensityMatrix, ProjectionReport> apply_projection(const DensityMatrix& rho, const Projector& proj,
                                                            double hbar) {
    proj.validate();
    const auto& grid = rho.grid();
    const int n = grid.size();
    const double eta = grid.spacing();
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = window_function(proj, grid.coordinate(i));

    Eigen::MatrixXcd projected = rho.values();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) projected(i, j) *= g[i] * g[j];
    DensityMatrix out(grid, std::move(projected), rho.time());

    ProjectionReport rep;
    rep.norm_before = rho.trace();
    rep.norm_after = out.trace();
    if (!(rep.norm_after >= 1e-12)) throw DepletedStateError("state depleted by projection (trace below 1e-12)");

    std::vector<double> g2(n);
    for (int i = 0; i < n; ++i) g2[i] = g[i] * g[i];
    const Eigen::MatrixXcd pm = apply_momentum_left(rho.values(), eta, hbar);
    const double R = left_trace(apply_momentum_left(scale_rows(pm, g2), eta, hbar), eta);
    Eigen::MatrixXcd z = scale_rows(rho.values(), g);
    z = scale_rows(apply_momentum_left(z, eta, hbar), g);
    const double T1 = left_trace(apply_momentum_left(z, eta, hbar), eta);
    const double Q = spectral_p2_trace(out.values(), eta, hbar);

    const double na = rep.norm_after;
    rep.p2_after = Q / na;
    rep.p2_red = R / na;
    rep.delta_term = (2.0 * T1 - 2.0 * R) / na;
    rep.sigma_term = (R + Q - 2.0 * T1) / na;

    if (rep.norm_before > 0.0) {
        rep.boundary_density_upper = interpolate_diagonal(rho, 0.5 * proj.L) / rep.norm_before;
        rep.boundary_density_lower = interpolate_diagonal(rho, -0.5 * proj.L) / rep.norm_before;
    }
    if (proj.kind == ProjectorKind::smeared) {
        rep.sigma_estimate = hbar * hbar * (rep.boundary_density_upper + rep.boundary_density_lower) *
                             rep.norm_before / (2.0 * std::sqrt(kPi) * proj.a * na);
    } else {
        rep.sigma_estimate = std::numeric_limits<double>::quiet_NaN();
    }
    return {std::move(out), rep};
}

WignerFunction project_wigner(const WignerFunction& w, const Projector& proj) {
    proj.validate();
    const auto& xg = w.x_grid();
    const int n = xg.size();
    const double eta = xg.spacing();
    const double dp = w.p_grid().spacing();
    const double hb = w.hbar();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);

    if (proj.kind == ProjectorKind::sharp) {
        // Discrete Dirichlet kernel: back to xi, multiply by the window at X +- xi/2, forward.
        std::vector<cplx> row(n);
        for (int i = 0; i < n; ++i) {
            const double X = xg.coordinate(i);
            for (int kc = 0; kc < n; ++kc) row[wrap(kc - n / 2, n)] = w.values()(i, kc);
            fft::vector(row, FFTW_BACKWARD);
            for (int s = 0; s < n; ++s) {
                const double half = 0.5 * fft_index(s, n) * eta;
                row[s] *= window_function(proj, X + half) * window_function(proj, X - half) / n;
            }
            fft::vector(row, FFTW_FORWARD);
            for (int kc = 0; kc < n; ++kc) out(i, kc) = row[wrap(kc - n / 2, n)].real();
        }
        return WignerFunction(xg, hb, std::move(out), w.time());
    }

    // Smeared: circular convolution in p with the periodized smeared kernel.
    const double period = n * dp;
    std::vector<double> kernel(n);
    for (int i = 0; i < n; ++i) {
        const double X = xg.coordinate(i);
        if (w.values().row(i).cwiseAbs().maxCoeff() == 0.0) continue;
        for (int mm = 0; mm <= n / 2; ++mm) {
            double acc = 0.0;
            for (int img = -2; img <= 2; ++img) acc += smeared_kernel(X, mm * dp + img * period, proj.L, proj.a, hb);
            kernel[mm] = acc;
            kernel[wrap(-mm, n)] = acc;
        }
        for (int k = 0; k < n; ++k) {
            double acc = 0.0;
            for (int k0 = 0; k0 < n; ++k0) acc += kernel[wrap(k - k0, n)] * w.values()(i, k0);
            out(i, k) = acc * dp;
        }
    }
    return WignerFunction(xg, hb, std::move(out), w.time());
}

CutoffScales momentum_cutoff(double m, double L, double eps, double hbar, double eta) {
    if (!(eps > 0.0)) throw ConfigError("run.eps must be positive");
    CutoffScales c;
    c.p_c = m * L / eps;
    c.a = hbar / c.p_c;
    c.lattice_p = kPi * hbar / eta;
    return c;
}

}  // namespace qzeno

#include "qzeno/flux.hpp"

#include <algorithm>
#include <cmath>

#include "qzeno/error.hpp"
#include <fftw3.h>

#include "qzeno/fft.hpp"

namespace qzeno {

std::vector<double> current(const DensityMatrix& rho, double m, double hbar) {
    // (hbar/2mi)(d_x - d_y) rho |_{x=y} = Re (P rho)(x, x) / m for Hermitian rho
    const auto pm = apply_momentum_left(rho.values(), rho.grid().spacing(), hbar);
    std::vector<double> J(rho.size());
    for (int i = 0; i < rho.size(); ++i) J[i] = pm(i, i).real() / m;
    return J;
}

VelocitySample velocity(const DensityMatrix& rho, double m, double hbar) {
    const auto J = current(rho, m, hbar);
    const int n = rho.size();
    VelocitySample s;
    s.t = rho.time();
    s.v.assign(n, 0.0);
    s.valid.assign(n, 0);
    double peak = 0;
    for (int i = 0; i < n; ++i) peak = std::max(peak, rho(i, i).real());
    for (int i = 0; i < n; ++i) {
        const double d = rho(i, i).real();
        if (d > kDensityFloor * peak) {
            s.v[i] = J[i] / d;
            s.valid[i] = 1;
        }
    }
    return s;
}

namespace {

std::vector<double> spectral_derivative(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<fft::cplx> z(f.begin(), f.end());
    fft::vector(z, FFTW_FORWARD);
    const auto p = fft_momenta(n, h, 1.0);
    for (int k = 0; k < n; ++k) z[k] *= (k == n / 2 ? 0.0 : 1.0) * fft::cplx(0, p[k]) / static_cast<double>(n);
    fft::vector(z, FFTW_BACKWARD);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = z[i].real();
    return out;
}

}  // namespace

double continuity_residual(const DensityMatrix& rho, const QBMParams& params, double h) {
    if (!(h > 0)) throw ArgumentError("continuity step must be positive");
    const KernelPropagator step(rho.grid(), params, h);
    const auto mid = step.apply(rho);
    const auto end = step.apply(mid);
    // The current carries difference wavenumbers up to twice the lattice Nyquist, which alias on
    // the lattice; differentiate it on the 2x interpolated state and sample the lattice points.
    const auto up = fft::upsample2(mid.values());
    const auto pm = apply_momentum_left(up, rho.grid().spacing() / 2, params.hbar);
    std::vector<double> J(up.rows());
    for (Eigen::Index i = 0; i < up.rows(); ++i) J[i] = pm(i, i).real() / params.m;
    const auto dJ = spectral_derivative(J, rho.grid().spacing() / 2);
    double num = 0, den = 0;
    for (int i = 0; i < rho.size(); ++i) {
        const double dt = (end(i, i).real() - rho(i, i).real()) / (2 * h);
        num += (dt + dJ[2 * i]) * (dt + dJ[2 * i]);
        den += dJ[2 * i] * dJ[2 * i];
    }
    if (den == 0) return std::sqrt(num);
    return std::sqrt(num / den);
}

double density_quantile(const DensityMatrix& rho, double x) {
    const auto& g = rho.grid();
    const double u = (x - g.lower()) / g.spacing();
    double total = 0;
    for (int i = 0; i < rho.size(); ++i) total += rho(i, i).real();
    if (!(total > 0)) throw DepletedStateError("quantile of an empty state");
    // lattice point i carries mass over [i - 1/2, i + 1/2]
    double acc = 0;
    for (int i = 0; i < rho.size(); ++i) {
        const double d = rho(i, i).real();
        if (u >= i + 0.5) {
            acc += d;
        } else {
            if (u > i - 0.5) acc += d * (u - (i - 0.5));
            break;
        }
    }
    return acc / total;
}

namespace {

// Velocity at x, or false when no unmasked lattice value lies within two cells.
bool velocity_at(const VelocitySample& s, const Grid1D& g, double x, double& v) {
    const double u = (x - g.lower()) / g.spacing();
    const int i = static_cast<int>(std::floor(u));
    if (i < 0 || i + 1 >= g.size()) return false;
    if (s.valid[i] && s.valid[i + 1]) {
        const double f = u - i;
        v = (1 - f) * s.v[i] + f * s.v[i + 1];
        return true;
    }
    const int near = u - i < 0.5 ? i : i + 1;
    for (int d = 0; d <= 2; ++d)
        for (int j : {near - d, near + d})
            if (j >= 0 && j < g.size() && s.valid[j]) {
                v = s.v[j];
                return true;
            }
    return false;
}

struct Interval {
    const VelocitySample* a;
    const VelocitySample* b;
    const Grid1D* g;
    bool at(double t, double x, double& v) const {
        double va, vb;
        if (!velocity_at(*a, *g, x, va) || !velocity_at(*b, *g, x, vb)) return false;
        const double f = b->t > a->t ? (t - a->t) / (b->t - a->t) : 0.0;
        v = (1 - f) * va + f * vb;
        return true;
    }
};

std::vector<double> seed_positions(const DensityMatrix& rho, int n_lines) {
    std::vector<double> seeds;
    const auto& g = rho.grid();
    for (int k = 1; k <= n_lines; ++k) {
        const double target = static_cast<double>(k) / (n_lines + 1);
        double lo = g.lower(), hi = g.coordinate(g.size() - 1);
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (density_quantile(rho, mid) < target ? lo : hi) = mid;
        }
        seeds.push_back(0.5 * (lo + hi));
    }
    return seeds;
}

}  // namespace

FluxLineSet trace_flux_lines(const ExperimentConfig& config, const FluxOptions& opts) {
    config.validate();
    if (opts.n_lines < 2) throw ArgumentError("need at least two flux lines");
    if (opts.substeps < 1) throw ArgumentError("need at least one substep");
    const Grid1D grid = config.grid();
    const double hbar = config.qbm.hbar, m = config.qbm.m;
    DensityMatrix rho = normalized(initial_state(config));

    QBMParams off = config.qbm;
    off.D = 0.0;
    const KernelPropagator on_step(grid, config.qbm, config.dt);
    const KernelPropagator off_step(grid, off, config.dt);

    FluxLineSet out;
    out.seeds = seed_positions(rho, opts.n_lines);
    const int L = opts.n_lines;
    out.trajectories.resize(L);
    out.terminated.assign(L, 0);
    out.quantile_drift.assign(L, 0.0);
    std::vector<double> x = out.seeds, baseline(L);
    for (int k = 0; k < L; ++k) {
        out.trajectories[k].push_back({0.0, x[k]});
        baseline[k] = density_quantile(rho, x[k]);
    }

    const int per = config.steps_per_interval();
    const long total = std::lround(config.total_time / config.dt);
    VelocitySample cur = velocity(rho, m, hbar);
    cur.t = 0.0;
    for (long s = 1; s <= total; ++s) {
        const double t0 = (s - 1) * config.dt, t1 = s * config.dt;
        const bool env = config.qbm.D > 0 && t0 >= config.env_switch_on_time - 1e-12;
        rho = (env ? on_step : off_step).apply(rho);
        VelocitySample next = velocity(rho, m, hbar);
        next.t = t1;
        const Interval field{&cur, &next, &grid};
        const double h = config.dt / opts.substeps;
        for (int k = 0; k < L; ++k) {
            if (out.terminated[k]) continue;
            double xk = x[k], t = t0;
            bool ok = true;
            for (int q = 0; q < opts.substeps && ok; ++q, t += h) {
                double k1, k2, k3, k4;
                ok = field.at(t, xk, k1) && field.at(t + h / 2, xk + h / 2 * k1, k2) &&
                     field.at(t + h / 2, xk + h / 2 * k2, k3) && field.at(t + h, xk + h * k3, k4);
                if (ok) xk += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
            }
            if (!ok) {
                out.terminated[k] = 1;
                continue;
            }
            x[k] = xk;
            out.trajectories[k].push_back({t1, xk});
            out.quantile_drift[k] = std::max(out.quantile_drift[k], std::abs(density_quantile(rho, xk) - baseline[k]));
        }
        for (int k = 0; k + 1 < L; ++k)
            if (!out.terminated[k] && !out.terminated[k + 1] && x[k] > x[k + 1]) out.crossed = true;

        if (s % per == 0) {
            auto [proj, rep] = apply_projection(rho, config.proj, hbar);
            if (!(rep.norm_after > 1e-12)) break;
            rho = DensityMatrix(grid, proj.values() / rep.norm_after, t1);
            out.projection_times.push_back(t1);
            // A real window multiplies J and rho(x,x) by the same g^2, so v is unchanged;
            // differentiating the projected state instead would alias the narrow edge.
            {
                double peak = 0;
                for (int i = 0; i < rho.size(); ++i) peak = std::max(peak, rho(i, i).real());
                for (int i = 0; i < rho.size(); ++i)
                    if (rho(i, i).real() <= kDensityFloor * peak) next.valid[i] = 0;
            }
            for (int k = 0; k < L; ++k)
                if (!out.terminated[k]) baseline[k] = density_quantile(rho, x[k]);
        }
        cur = std::move(next);
    }
    for (double d : out.quantile_drift) out.max_quantile_drift = std::max(out.max_quantile_drift, d);
    return out;
}

Recondensation recondensation(const std::vector<FluxPoint>& line, double min_amplitude) {
    Recondensation r;
    std::vector<double> maxima, minima;
    // Alternate between outward and inward runs of |x|, counting only swings above min_amplitude.
    double hi = line.empty() ? 0.0 : std::abs(line.front().x), lo = hi, t_hi = 0, t_lo = 0;
    bool outward = true;
    for (const auto& p : line) {
        const double a = std::abs(p.x);
        if (outward) {
            if (a > hi) hi = a, t_hi = p.t;
            else if (hi - a > min_amplitude) {
                maxima.push_back(t_hi);
                outward = false;
                lo = a, t_lo = p.t;
            }
        } else {
            if (a < lo) lo = a, t_lo = p.t;
            else if (a - lo > min_amplitude) {
                minima.push_back(t_lo);
                outward = true;
                hi = a, t_hi = p.t;
            }
        }
    }
    r.turning_points = static_cast<int>(maxima.size());
    r.detected = !maxima.empty();
    if (!maxima.empty()) r.max_spread_time = maxima.front();
    if (!minima.empty()) r.recondense_time = minima.front();
    if (maxima.size() >= 2) r.cycle = (maxima.back() - maxima.front()) / (maxima.size() - 1);
    return r;
}

}  // namespace qzeno

#include "qzeno/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qzeno/error.hpp"

namespace qzeno {

PhaseSpaceDistribution::PhaseSpaceDistribution(Grid1D x_grid, Grid1D p_grid, Eigen::MatrixXd values, double time)
    : x_grid_(x_grid), p_grid_(p_grid), values_(std::move(values)), time_(time) {
    if (values_.rows() != p_grid_.size() || values_.cols() != x_grid_.size())
        throw ArgumentError("phase-space values do not match the grids");
}

double PhaseSpaceDistribution::mass() const { return values_.sum() * x_grid_.spacing() * p_grid_.spacing(); }

Moments PhaseSpaceDistribution::moments() const {
    Moments m;
    double s = 0, x2 = 0, p2 = 0, xp = 0;
    for (int i = 0; i < values_.cols(); ++i) {
        const double x = x_grid_.coordinate(i);
        for (int j = 0; j < values_.rows(); ++j) {
            const double p = p_grid_.coordinate(j);
            const double w = values_(j, i);
            s += w;
            x2 += w * x * x;
            p2 += w * p * p;
            xp += w * x * p;
        }
    }
    if (!(s > 0)) throw DepletedStateError("phase-space distribution has no mass");
    m.norm = s * x_grid_.spacing() * p_grid_.spacing();
    m.x2 = x2 / s;
    m.p2 = p2 / s;
    m.xp_sym = xp / s;
    return m;
}

std::vector<double> PhaseSpaceDistribution::position_marginal() const {
    std::vector<double> out(values_.cols());
    for (int i = 0; i < values_.cols(); ++i) out[i] = values_.col(i).sum() * p_grid_.spacing();
    return out;
}

PhaseSpaceDistribution make_phase_space(double L, int cells_inside, double p_max, int p_points, int margin) {
    if (!(L > 0) || cells_inside < 4 || cells_inside % 2 != 0)
        throw ArgumentError("need L > 0 and an even cell count of at least 4");
    if (!(p_max > 0) || p_points < 9 || p_points % 2 == 0) throw ArgumentError("need p_max > 0 and an odd p count");
    if (margin < 2) throw ArgumentError("need a margin of at least 2 cells");
    const int nx = cells_inside + 2 * margin;
    const Grid1D xg(nx, L / cells_inside);
    const Grid1D pg(p_points, p_max / (p_points / 2));
    return {xg, pg, Eigen::MatrixXd::Zero(p_points, nx)};
}

namespace {

inline double van_leer(double a, double b) { return a * b > 0 ? 2.0 * a * b / (a + b) : 0.0; }

// Time derivative of w, stored transposed (column j is the x profile at p_j).
void rhs(const Eigen::MatrixXd& w, const std::vector<double>& v, double hx, double diff, bool periodic,
         Eigen::MatrixXd& out) {
    const int nx = static_cast<int>(w.rows());
    const int np = static_cast<int>(w.cols());
    std::vector<double> ext(nx + 4), flux(nx + 1);
    for (int j = 0; j < np; ++j) {
        const double* c = w.col(j).data();
        // two ghosts each side: periodic, or empty so outflow leaves the lattice
        if (periodic) ext[0] = c[nx - 2], ext[1] = c[nx - 1], ext[nx + 2] = c[0], ext[nx + 3] = c[1];
        else ext[0] = ext[1] = ext[nx + 2] = ext[nx + 3] = 0.0;
        std::copy(c, c + nx, ext.begin() + 2);
        const double vj = v[j];
        // flux[i] crosses the interface between cells i-1 and i
        for (int i = 0; i <= nx; ++i) {
            const int e = i + 1;  // ext index of cell i-1
            if (vj >= 0)
                flux[i] = vj * (ext[e] + 0.5 * van_leer(ext[e] - ext[e - 1], ext[e + 1] - ext[e]));
            else
                flux[i] = vj * (ext[e + 1] - 0.5 * van_leer(ext[e + 1] - ext[e], ext[e + 2] - ext[e + 1]));
        }
        double* o = out.col(j).data();
        for (int i = 0; i < nx; ++i) o[i] = -(flux[i + 1] - flux[i]) / hx;
    }
    if (diff == 0) return;
    for (int j = 0; j < np; ++j) {
        if (j + 1 < np) out.col(j) += diff * (w.col(j + 1) - w.col(j));
        if (j > 0) out.col(j) -= diff * (w.col(j) - w.col(j - 1));
    }
}

void absorb(Eigen::MatrixXd& w, const Grid1D& xg, double L) {
    for (int i = 0; i < xg.size(); ++i)
        if (std::abs(xg.coordinate(i)) > 0.5 * L * (1.0 + 1e-12)) w.row(i).setZero();
}

}  // namespace

PhaseSpaceDistribution evolve_classical(const PhaseSpaceDistribution& w, const QBMParams& params, double t,
                                        const std::optional<Absorber>& absorber) {
    params.validate();
    if (t < 0) throw ArgumentError("duration must be non-negative");
    const Grid1D& xg = w.x_grid();
    const Grid1D& pg = w.p_grid();
    const double hx = xg.spacing(), hp = pg.spacing();
    std::vector<double> v(pg.size());
    double vmax = 0;
    for (int j = 0; j < pg.size(); ++j) {
        v[j] = pg.coordinate(j) / params.m;
        vmax = std::max(vmax, std::abs(v[j]));
    }
    double dt_max = 0.45 * hx / vmax;
    if (params.D > 0) dt_max = std::min(dt_max, 0.45 * hp * hp / params.D);

    // Split the run into segments ending at gate times so every gate lands on a step boundary.
    std::vector<double> stops;
    if (absorber && absorber->gate_eps > 0) {
        for (double g = absorber->gate_eps; g < t * (1 - 1e-12); g += absorber->gate_eps) stops.push_back(g);
    }
    stops.push_back(t);

    Eigen::MatrixXd cur = w.values().transpose(), k(cur.rows(), cur.cols()), stage(cur.rows(), cur.cols());
    const bool continuous = absorber && absorber->gate_eps <= 0;
    const double diff = params.D / (hp * hp);
    const double m0 = cur.sum();
    double done = 0;
    for (double stop : stops) {
        const double span = stop - done;
        const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt_max - 1e-9)));
        const double dt = span / static_cast<double>(steps);
        for (long s = 0; s < steps && span > 0; ++s) {
            rhs(cur, v, hx, diff, !absorber, k);
            stage = cur + dt * k;
            rhs(stage, v, hx, diff, !absorber, k);
            cur = 0.5 * (cur + stage + dt * k);
            if (continuous) absorb(cur, xg, absorber->L);
        }
        if (absorber && !continuous) absorb(cur, xg, absorber->L);
        done = stop;
    }
    const double m1 = cur.sum();
    if (!std::isfinite(m1) || m1 < -1e-12 * std::abs(m0)) throw NumericalError("classical solver lost positivity");
    return {xg, pg, cur.transpose(), w.time() + t};
}

namespace {

double shape_change(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a / a.sum() - b / b.sum()).cwiseAbs().sum();
}

}  // namespace

SteadyMode find_steady_mode(const SteadyModeOptions& opts, const QBMParams& params, double L) {
    params.validate();
    if (!(params.D > 0) || !(L > 0)) throw ArgumentError("steady mode needs D > 0 and L > 0");
    const double ps = std::cbrt(params.m * L * params.D);
    const double rate = std::cbrt(params.D / (params.m * params.m * L * L));
    // Between gates the fastest particle must stay on the lattice to be able to come back.
    const int margin = 2 + static_cast<int>(std::ceil(opts.p_max * opts.gate_eps * opts.cells_inside));
    auto w = make_phase_space(L, opts.cells_inside, opts.p_max * ps, opts.p_points, margin);
    const auto& xg = w.x_grid();
    const auto& pg = w.p_grid();
    for (int i = 0; i < xg.size(); ++i) {
        const double x = xg.coordinate(i) / L;
        if (std::abs(x) > 0.5 * (1 + 1e-12)) continue;
        for (int j = 0; j < pg.size(); ++j) {
            const double p = pg.coordinate(j) / ps;
            switch (opts.start) {
                case ClassicalStart::uniform: w.values()(j, i) = std::abs(p) <= 1.0 ? 1.0 : 0.0; break;
                case ClassicalStart::gaussian:
                    w.values()(j, i) = std::exp(-x * x / (2 * 0.01) - p * p / 2);
                    break;
                case ClassicalStart::cosine:
                    w.values()(j, i) = std::cos(std::numbers::pi * x) * std::exp(-p * p / 2);
                    break;
            }
        }
    }
    w.values() /= w.mass();

    const std::optional<Absorber> absorber = Absorber{L, opts.gate_eps / rate};
    // Chunks are whole numbers of gates so the decay estimate sees a full period.
    double chunk = 0.25;
    if (opts.gate_eps > 0) chunk = std::max(1.0, std::round(0.25 / opts.gate_eps)) * opts.gate_eps;
    double lambda = 0, t = 0;
    while (t < opts.max_time) {
        const auto next = evolve_classical(w, params, chunk / rate, absorber);
        const double mass = next.mass();
        if (!(mass > 0)) throw ConvergenceError("steady-mode search lost all mass");
        lambda = -std::log(mass / w.mass()) / chunk;
        const double change = shape_change(next.values(), w.values()) / chunk;
        t += chunk;
        w = PhaseSpaceDistribution(next.x_grid(), next.p_grid(), next.values() / mass, t / rate);
        if (change < opts.tolerance) {
            const auto mo = w.moments();
            return {lambda, w, mo.x2 / (L * L), mo.p2 / (ps * ps), 2 * mo.xp_sym / (L * ps), t};
        }
    }
    throw ConvergenceError("steady mode not reached by scaled time " + std::to_string(opts.max_time));
}

DimensionalMoments rescale(const SteadyMode& mode, const QBMParams& params, double L) {
    const double ps = std::cbrt(params.m * L * params.D);
    const double rate = std::cbrt(params.D / (params.m * params.m * L * L));
    return {mode.x2 * L * L, mode.p2 * ps * ps, mode.xp2 * L * ps, mode.lambda * rate};
}

LangevinResult langevin_oracle(const QBMParams& params, double L, const LangevinOptions& opts) {
    params.validate();
    if (opts.n_particles < 1 || !(opts.dt > 0) || opts.t < 0 || !(opts.sample_every > 0))
        throw ArgumentError("langevin: need particles, dt > 0, t >= 0, sample_every > 0");
    const long steps = std::lround(opts.t / opts.dt);
    const long every = std::max(1L, std::lround(opts.sample_every / opts.dt));
    const long samples = steps / every;
    std::vector<long> alive(samples + 1, 0);
    const double kick = std::sqrt(2.0 * params.D * opts.dt);
    const double half = 0.5 * L;
    double sx2 = 0, sp2 = 0, sxp = 0, qx2 = 0, qp2 = 0, qxp = 0;
    int survivors = 0;
    for (int n = 0; n < opts.n_particles; ++n) {
        std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                          static_cast<std::uint32_t>(n)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal;
        double x = 0, p = 0;
        if (opts.start == LangevinStart::gaussian) {
            do x = opts.sigma_x * normal(rng);
            while (std::abs(x) > half);
        } else {
            x = std::uniform_real_distribution<double>(-half, half)(rng);
        }
        p = opts.sigma_p * normal(rng);
        ++alive[0];
        bool in = true;
        for (long s = 1; s <= steps && in; ++s) {
            x += p / params.m * opts.dt;
            p += kick * normal(rng);
            if (std::abs(x) > half) in = false;
            else if (s % every == 0) ++alive[s / every];
        }
        if (in) {
            ++survivors;
            sx2 += x * x, sp2 += p * p, sxp += 2 * x * p;
            qx2 += x * x * x * x, qp2 += p * p * p * p, qxp += 4 * x * x * p * p;
        }
    }
    LangevinResult r;
    for (long k = 0; k <= samples; ++k)
        r.survival.push_back({k * every * opts.dt, static_cast<double>(alive[k]) / opts.n_particles});
    r.survivors = survivors;
    if (survivors > 1) {
        const double s = survivors;
        auto err = [s](double sum, double sq) { return std::sqrt(std::max(0.0, sq / s - (sum / s) * (sum / s)) / s); };
        r.x2 = sx2 / s, r.p2 = sp2 / s, r.xp2 = sxp / s;
        r.x2_err = err(sx2, qx2), r.p2_err = err(sp2, qp2), r.xp2_err = err(sxp, qxp);
    }
    return r;
}

}  // namespace qzeno

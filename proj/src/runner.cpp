#include "qzeno/runner.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "qzeno/error.hpp"

namespace qzeno {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Kernel propagators cached by (D, duration); the environment may switch on
// partway through an interval.
class Evolver {
public:
    Evolver(const ExperimentConfig& c) : config_(c), grid_(c.grid()) {}

    DensityMatrix advance(const DensityMatrix& rho, double t0, double t1) {
        const double ts = config_.env_switch_on_time;
        const double D = config_.qbm.D;
        if (D == 0.0 || t0 >= ts - 1e-12) return get(D, t1 - t0).apply(rho);
        if (t1 <= ts + 1e-12) return get(0.0, t1 - t0).apply(rho);
        return get(D, t1 - ts).apply(get(0.0, ts - t0).apply(rho));
    }

private:
    const KernelPropagator& get(double D, double t) {
        // Durations are keyed at a resolution far below any meaningful step.
        const auto key = std::make_pair(D, std::llround(t * 1e12));
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            QBMParams qp = config_.qbm;
            qp.D = D;
            it = cache_.emplace(key, KernelPropagator(grid_, qp, t)).first;
        }
        return it->second;
    }

    const ExperimentConfig& config_;
    Grid1D grid_;
    std::map<std::pair<double, long long>, KernelPropagator> cache_;
};

MomentRecord record_of(const DensityMatrix& rho, double t, double hbar) {
    const auto mo = moments(rho, hbar);
    MomentRecord r;
    r.t = t;
    r.norm = mo.norm;
    r.x2 = mo.x2;
    r.p2 = mo.p2;
    r.xp_sym = mo.xp_sym;
    r.p2_pre = r.p2_red = r.delta_term = r.sigma_term = r.boundary_density = kNaN;
    return r;
}

}  // namespace

int ExperimentConfig::steps_per_interval() const { return static_cast<int>(std::llround(eps / dt)); }

int ExperimentConfig::projection_count() const {
    return static_cast<int>(std::floor(total_time / eps + 1e-9));
}

void ExperimentConfig::validate() const {
    qbm.validate();
    proj.validate();
    const Grid1D g(n, eta);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("run.dt must be positive");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("run.eps must be positive");
    const double k = eps / dt;
    if (std::llround(k) < 1 || std::abs(k - std::llround(k)) > 1e-6 * k)
        throw ConfigError("run.eps must be an integer multiple of run.dt");
    if (!(total_time > 0.0) || !std::isfinite(total_time)) throw ConfigError("run.total_time must be positive");
    if (!(sigma > 0.0)) throw ConfigError("init.sigma must be positive");
    if (!(env_switch_on_time >= 0.0)) throw ConfigError("run.env_switch_on_time must be non-negative");
    if (prep_max_cycles < 1) throw ConfigError("prep.max_cycles must be at least 1");
    if (!(prep_tolerance > 0.0)) throw ConfigError("prep.tolerance must be positive");
    if (!(stop_survival >= 0.0 && stop_survival < 1.0)) throw ConfigError("run.stop_survival must lie in [0, 1)");
    if (0.5 * proj.L + 4.0 * proj.a >= 0.5 * g.extent()) throw ConfigError("proj.L does not fit inside the lattice box");
}

void MomentSeries::push(const MomentRecord& r) {
    if (!records_.empty() && !(r.t > records_.back().t))
        throw NumericalError("moment records must have strictly increasing times");
    records_.push_back(r);
}

std::vector<MomentRecord> MomentSeries::projections() const {
    std::vector<MomentRecord> out;
    for (const auto& r : records_)
        if (r.projected) out.push_back(r);
    return out;
}

DensityMatrix initial_state(const ExperimentConfig& config) {
    if (config.initial == InitialKind::prepared_steady_state) return prepare_steady_state(config).state;
    return gaussian_state(config.grid(), config.sigma);
}

RunResult run_sequence(const ExperimentConfig& config) {
    config.validate();
    return run_sequence(config, initial_state(config));
}

RunResult run_sequence(const ExperimentConfig& config, const DensityMatrix& initial) {
    config.validate();
    const double hb = config.qbm.hbar;
    const int K = config.steps_per_interval();
    const int N = config.projection_count();
    Evolver evolver(config);
    RunResult out;

    DensityMatrix rho(initial.grid(), initial.values(), 0.0);
    out.survival.push_back({0.0, rho.trace()});
    out.moments.push(record_of(rho, 0.0, hb));

    auto evolve_interval = [&](double t0, int substeps, double t_end) {
        if (!config.record_substeps) {
            rho = evolver.advance(rho, t0, t_end);
            return;
        }
        for (int j = 1; j <= substeps; ++j) {
            const double a = t0 + (j - 1) * config.dt;
            const double b = j == substeps ? t_end : t0 + j * config.dt;
            rho = evolver.advance(rho, a, b);
            if (j < substeps) out.moments.push(record_of(rho, b, hb));
        }
    };

    for (int k = 1; k <= N; ++k) {
        const double t0 = (k - 1) * config.eps, t1 = k * config.eps;
        evolve_interval(t0, K, t1);
        const double p2_pre = rho.trace() >= 1e-12 ? moments(rho, hb).p2 : kNaN;
        try {
            auto [projected, rep] = apply_projection(rho, config.proj, hb);
            rho = std::move(projected);
            MomentRecord r = record_of(rho, t1, hb);
            r.projected = true;
            r.p2_pre = p2_pre;
            r.p2_red = rep.p2_red;
            r.delta_term = rep.delta_term;
            r.sigma_term = rep.sigma_term;
            r.boundary_density = rep.boundary_density();
            out.moments.push(r);
            out.survival.push_back({t1, rep.norm_after});
            if (rep.norm_after < config.stop_survival) {
                out.final_state = rho;
                return out;
            }
        } catch (const DepletedStateError&) {
            out.depleted = true;
            for (int kk = k; kk <= N; ++kk) out.survival.push_back({kk * config.eps, 0.0});
            return out;
        }
    }
    const double t_last = N * config.eps;
    if (config.total_time - t_last > 1e-9 * config.total_time) {
        const int rest = std::max(1, static_cast<int>(std::llround((config.total_time - t_last) / config.dt)));
        evolve_interval(t_last, rest, config.total_time);
        out.moments.push(record_of(rho, config.total_time, hb));
        out.survival.push_back({config.total_time, rho.trace()});
    }
    out.final_state = rho;
    return out;
}

SteadyState prepare_steady_state(const ExperimentConfig& config) {
    config.validate();
    return prepare_steady_state(config, gaussian_state(config.grid(), config.sigma));
}

SteadyState prepare_steady_state(const ExperimentConfig& config, const DensityMatrix& start) {
    QBMParams free = config.qbm;
    free.D = 0.0;
    const KernelPropagator step(start.grid(), free, config.eps);
    DensityMatrix rho = normalized(start);
    Moments mo = moments(rho, free.hbar);
    std::vector<double> history{mo.p2};
    double change = std::numeric_limits<double>::infinity();
    int quiet = 0;
    for (int cycle = 1; cycle <= config.prep_max_cycles; ++cycle) {
        auto [projected, rep] = apply_projection(step.apply(rho), config.proj, free.hbar);
        rho = DensityMatrix(projected.grid(), projected.values() / rep.norm_after, 0.0);
        const Moments next = moments(rho, free.hbar);
        // <p^2> alone is blind to a packet that spreads freely without reaching
        // the boundary, so <x^2> must be stationary too.
        change = std::max(std::abs(next.p2 - mo.p2) / next.p2, std::abs(next.x2 - mo.x2) / next.x2);
        mo = next;
        history.push_back(mo.p2);
        // Two quiet cycles in a row, so a turning point of a slow oscillation does not count.
        quiet = change < config.prep_tolerance ? quiet + 1 : 0;
        if (quiet >= 2 || (cycle == 1 && change < 0.1 * config.prep_tolerance))
            return {rho, cycle, mo.p2, std::move(history)};
    }
    std::ostringstream msg;
    msg << "steady state not reached after " << config.prep_max_cycles << " cycles; last relative change "
        << change << ", p2 " << mo.p2;
    throw ConvergenceError(msg.str());
}

std::optional<double> half_life(const std::vector<SurvivalPoint>& survival) {
    for (std::size_t i = 0; i < survival.size(); ++i) {
        if (survival[i].p > 0.5) continue;
        if (i == 0) return survival[0].t;
        const auto& a = survival[i - 1];
        const auto& b = survival[i];
        return a.t + (a.p - 0.5) / (a.p - b.p) * (b.t - a.t);
    }
    return std::nullopt;
}

}  // namespace qzeno

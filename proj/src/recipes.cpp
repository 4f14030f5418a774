#include "qzeno/recipes.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <thread>

#include "qzeno/analytic_models.hpp"
#include "qzeno/classical.hpp"
#include "qzeno/complex_potential.hpp"
#include "qzeno/error.hpp"
#include "qzeno/flux.hpp"
#include "qzeno/lattice.hpp"
#include "qzeno/runner.hpp"
#include "qzeno/timescales.hpp"

namespace qzeno {
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Unit labels in the natural units hbar = m = L = 1 used by the headers.
const std::string kTime = "time";
const std::string kLength = "length";
const std::string kMomentum = "momentum";
const std::string kLength2 = "length^2";
const std::string kMomentum2 = "momentum^2";
const std::string kAction = "length*momentum";
const std::string kOne = "1";

class Context {
public:
    Context(std::string recipe, ExperimentConfig config, KeyValues params, fs::path dir)
        : recipe_(std::move(recipe)), config_(std::move(config)), params_(std::move(params)), dir_(std::move(dir)) {}

    const ExperimentConfig& config() const { return config_; }
    const fs::path& dir() const { return dir_; }
    const std::vector<std::string>& files() const { return files_; }
    const Meta& summary() const { return summary_; }

    double number(const std::string& key) const { return parse_double(key, params_.at(key)); }
    long integer(const std::string& key) const { return parse_integer(key, params_.at(key)); }
    std::vector<double> list(const std::string& key) const { return parse_list(key, params_.at(key)); }

    Meta params_meta() const { return {params_.begin(), params_.end()}; }

    void write(const std::string& file, const Table& table, const Meta& extra = {}) {
        Meta meta{{"recipe", recipe_}, {"version", version_string()}};
        for (auto& kv : config_echo(config_)) meta.push_back(std::move(kv));
        for (const auto& kv : params_) meta.push_back(kv);
        for (const auto& kv : extra) meta.push_back(kv);
        write_csv(dir_ / file, meta, table);
        files_.push_back(file);
    }

    void note(const std::string& key, double v) { summary_.emplace_back(key, format_double(v)); }
    void note(const std::string& key, const std::string& v) { summary_.emplace_back(key, v); }

private:
    std::string recipe_;
    ExperimentConfig config_;
    KeyValues params_;
    fs::path dir_;
    std::vector<std::string> files_;
    Meta summary_;
};

// File and column suffix: plain %g form so 100 reads "100", not "1e+02".
std::string tag(const std::string& name, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return name + buf;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Time-averaged post-projection moments over projections at t >= t_from.
struct LateMoments {
    double x2 = kNaN, p2 = kNaN, xp2 = kNaN, sigma = kNaN;
    int count = 0;
};

LateMoments late_moments(const MomentSeries& series, double t_from) {
    std::vector<double> x2, p2, xp, sg;
    for (const auto& r : series.projections()) {
        if (r.t < t_from - 1e-12 || !std::isfinite(r.p2)) continue;
        x2.push_back(r.x2);
        p2.push_back(r.p2);
        xp.push_back(r.xp_sym);
        sg.push_back(r.sigma_term);
    }
    return {mean_of(x2), mean_of(p2), mean_of(xp), mean_of(sg), static_cast<int>(x2.size())};
}

// Half-life run: exact evolution between projections, stopped once survival is below 0.45.
ExperimentConfig half_life_config(ExperimentConfig c, double max_time) {
    c.record_substeps = false;
    c.stop_survival = 0.45;
    c.total_time = max_time;
    if (c.dt > c.eps) c.dt = c.eps;
    return c;
}

double half_life_or_nan(const RunResult& r) {
    const auto h = half_life(r.survival);
    return h ? *h : kNaN;
}

DensityMatrix final_unit_trace(const RunResult& run) {
    if (run.depleted || !run.final_state || !(run.final_state->trace() > 0))
        throw DepletedStateError("state fully absorbed before the end of the run");
    return normalized(*run.final_state);
}

Table moment_table(const RunResult& r, bool projections_only) {
    Table t;
    t.columns = {{"t", kTime},          {"projected", kOne}, {"survival", kOne},      {"x2", kLength2},
                 {"p2", kMomentum2},    {"xp2", kAction},    {"p2_pre", kMomentum2}, {"p2_red", kMomentum2},
                 {"delta", kMomentum2}, {"sigma", kMomentum2}, {"boundary_density", "1/length"}};
    for (const auto& m : r.moments.records()) {
        if (projections_only && !m.projected && m.t > 0) continue;
        t.add({m.t, m.projected ? 1.0 : 0.0, m.norm, m.x2, m.p2, m.xp_sym, m.projected ? m.p2_pre : kNaN,
               m.projected ? m.p2_red : kNaN, m.projected ? m.delta_term : kNaN, m.projected ? m.sigma_term : kNaN,
               m.projected ? m.boundary_density : kNaN});
    }
    return t;
}

Table survival_table(const std::vector<SurvivalPoint>& s) {
    Table t;
    t.columns = {{"t", kTime}, {"survival", kOne}};
    for (const auto& p : s) t.add({p.t, p.p});
    return t;
}

ExperimentConfig with_D(ExperimentConfig c, double D) {
    c.qbm.D = D;
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------

void p2_decomposition(Context& ctx) {
    const auto Ds = ctx.list("recipe.D");
    const auto prep = prepare_steady_state(ctx.config());
    ctx.note("prep_cycles", prep.cycles);
    ctx.note("prep_p2", prep.p2);
    std::vector<RunResult> runs(Ds.size());
    parallel_for(static_cast<int>(Ds.size()),
                 [&](int i) { runs[i] = run_sequence(with_D(ctx.config(), Ds[i]), prep.state); });
    for (std::size_t i = 0; i < Ds.size(); ++i) {
        ctx.write(tag("p2_decomposition_D", Ds[i]) + ".csv", moment_table(runs[i], false),
                  {{"series.D", format_double(Ds[i])},
                   {"convention", "survival unnormalized; moments and decomposition renormalized"}});
        const auto proj = runs[i].moments.projections();
        if (!proj.empty()) ctx.note(tag("final_sigma_over_p2_D", Ds[i]), proj.back().sigma_term / proj.back().p2);
    }
}

void steady_moments(Context& ctx) {
    const auto& c = ctx.config();
    const auto run = run_sequence(c);
    ctx.write("moments.csv", moment_table(run, true),
              {{"convention", "post-projection renormalized moments; xp2 = <xp + px>"}});
    ctx.write("survival.csv", survival_table(run.survival));
    const auto late = late_moments(run.moments, ctx.number("recipe.average_from"));
    ctx.note("late_projections", late.count);
    ctx.note("late_x2", late.x2);
    ctx.note("late_p2", late.p2);
    ctx.note("late_xp2", late.xp2);
    ctx.note("half_life", half_life_or_nan(run));
    const auto ts = timescales(c.qbm, c.proj.L, c.eps, late.p2);
    ctx.note("lambda_inv", ts.lambda_inv);
    if (ctx.integer("recipe.classical") != 0) {
        const auto mode = find_steady_mode();
        const auto dim = rescale(mode, c.qbm, c.proj.L);
        ctx.note("classical_x2", dim.x2);
        ctx.note("classical_p2", dim.p2);
        ctx.note("classical_xp2", dim.xp2);
        ctx.note("classical_lambda_inv", 1.0 / dim.lambda);
    }
}

void steady_wigner(Context& ctx) {
    const auto& c = ctx.config();
    const auto rho = final_unit_trace(run_sequence(c));
    const auto w = wigner_transform(rho, c.qbm.hbar);
    const auto m = moments(rho, c.qbm.hbar);
    const double x_lim = ctx.number("recipe.x_extent") * c.proj.L;
    const double p_lim = ctx.number("recipe.p_sigmas") * std::sqrt(m.p2);

    Table wt;
    wt.columns = {{"x", kLength}, {"p", kMomentum}, {"W", "1/(length*momentum)"}};
    const auto& xg = w.x_grid();
    const auto& pg = w.p_grid();
    for (int i = 0; i < xg.size(); ++i) {
        const double x = xg.coordinate(i);
        if (std::abs(x) > x_lim) continue;
        for (int k = 0; k < pg.size(); ++k) {
            const double p = pg.coordinate(k);
            if (std::abs(p) <= p_lim) wt.add({x, p, w.values()(i, k)});
        }
    }
    ctx.write("wigner.csv", wt, {{"state", "final post-projection state, unit trace"}});

    Table xm;
    xm.columns = {{"x", kLength}, {"density", "1/length"}};
    const auto diag = rho.diagonal();
    const auto xs = rho.grid().coordinates();
    for (std::size_t i = 0; i < xs.size(); ++i) xm.add({xs[i], diag[i]});
    ctx.write("position_marginal.csv", xm);

    Table pm;
    pm.columns = {{"p", kMomentum}, {"density", "1/momentum"}};
    const auto pmarg = w.momentum_marginal();
    double s0 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (int k = 0; k < pg.size(); ++k) {
        const double p = pg.coordinate(k);
        pm.add({p, pmarg[k]});
        s0 += pmarg[k];
        s2 += pmarg[k] * p * p;
        s3 += pmarg[k] * p * p * p;
        s4 += pmarg[k] * p * p * p * p;
    }
    ctx.write("momentum_marginal.csv", pm);

    const double var = s2 / s0;
    ctx.note("position_cv_central80", position_cv(xs, diag, c.proj.L, 0.8));
    ctx.note("p2", m.p2);
    ctx.note("xp2", m.xp_sym);
    ctx.note("momentum_skewness", (s3 / s0) / std::pow(var, 1.5));
    ctx.note("momentum_excess_kurtosis", (s4 / s0) / (var * var) - 3.0);
}

void spatial_profiles(Context& ctx) {
    const auto Ds = ctx.list("recipe.D");
    const auto prep = prepare_steady_state(ctx.config());
    std::vector<std::vector<double>> profiles(Ds.size());
    parallel_for(static_cast<int>(Ds.size()), [&](int i) {
        auto c = with_D(ctx.config(), Ds[i]);
        c.record_substeps = false;
        const auto run = run_sequence(c, prep.state);
        profiles[i] = final_unit_trace(run).diagonal();
    });
    Table t;
    t.columns = {{"x", kLength}};
    for (double D : Ds) t.columns.push_back({tag("density_D", D), "1/length"});
    const auto xs = prep.state.grid().coordinates();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::vector<double> row{xs[i]};
        for (const auto& p : profiles) row.push_back(p[i]);
        t.add(std::move(row));
    }
    ctx.write("profiles.csv", t, {{"state", "final post-projection states, unit trace"}});
    for (std::size_t i = 0; i < Ds.size(); ++i)
        ctx.note(tag("position_cv_central80_D", Ds[i]), position_cv(xs, profiles[i], ctx.config().proj.L, 0.8));
}

void regime_surface(Context& ctx) {
    const auto Ds = ctx.list("recipe.D");
    const auto epss = ctx.list("recipe.eps");
    const double max_time = ctx.number("recipe.max_time");
    const auto& base = ctx.config();
    const int n = static_cast<int>(Ds.size() * epss.size());
    std::vector<double> tau(n);
    parallel_for(n, [&](int k) {
        auto c = base;
        c.qbm.D = Ds[k / epss.size()];
        c.eps = epss[k % epss.size()];
        c = half_life_config(c, max_time);
        c.validate();
        tau[k] = half_life_or_nan(run_sequence(c));
    });

    Table t;
    t.columns = {{"D", "momentum^2/time"}, {"eps", kTime},         {"half_life", kTime},
                 {"lambda_inv", kTime},   {"t_E_final", kTime},    {"rel_diff", kOne},
                 {"classical_side", kOne}};
    int agree = 0, classical = 0, above = 0, zeno = 0;
    for (int k = 0; k < n; ++k) {
        const double D = Ds[k / epss.size()], e = epss[k % epss.size()];
        const auto ts = timescales({base.qbm.m, D, base.qbm.hbar}, base.proj.L, e, 1.0);
        const double rel = (tau[k] - ts.lambda_inv) / ts.lambda_inv;
        const bool cside = ts.t_E_final < e;
        t.add({D, e, tau[k], ts.lambda_inv, ts.t_E_final, rel, cside ? 1.0 : 0.0});
        if (cside) {
            ++classical;
            agree += std::abs(rel) <= 0.25;
        } else {
            ++zeno;
            above += !(tau[k] <= ts.lambda_inv);  // NaN (not reached) counts as above
        }
    }
    ctx.write("surface.csv", t, {{"half_life", "nan when survival stays above 1/2 up to recipe.max_time"}});

    Table b;
    b.columns = {{"D", "momentum^2/time"}, {"eps_boundary", kTime}};
    const double lo = std::log10(std::max(1e-3, ctx.number("recipe.boundary_D_min")));
    const double hi = std::log10(ctx.number("recipe.boundary_D_max"));
    for (int i = 0; i <= 40; ++i) {
        const double D = std::pow(10.0, lo + (hi - lo) * i / 40.0);
        b.add({D, regime_boundary_eps({base.qbm.m, D, base.qbm.hbar}, base.proj.L)});
    }
    ctx.write("boundary.csv", b, {{"curve", "t_E_final(D) = eps"}});
    ctx.note("classical_side_points", classical);
    ctx.note("classical_side_within_25pct", agree);
    ctx.note("zeno_side_points", zeno);
    ctx.note("zeno_side_above_lambda_inv", above);
}

void classical_sweeps(Context& ctx) {
    const auto Ds = ctx.list("recipe.D");
    const auto Ls = ctx.list("recipe.L");
    const double D_for_L = ctx.number("recipe.D_for_L");
    const double L_for_D = ctx.number("recipe.L_for_D");
    const double max_time = ctx.number("recipe.max_time");
    struct Point {
        int sweep;
        double D, L;
    };
    std::vector<Point> pts;
    for (double D : Ds) pts.push_back({0, D, L_for_D});
    for (double L : Ls) pts.push_back({1, D_for_L, L});
    std::vector<double> tau(pts.size());
    parallel_for(static_cast<int>(pts.size()), [&](int k) {
        auto c = ctx.config();
        c.qbm.D = pts[k].D;
        c.proj.L = pts[k].L;
        c = half_life_config(c, max_time);
        c.validate();
        tau[k] = half_life_or_nan(run_sequence(c));
    });
    Table t;
    t.columns = {{"sweep", kOne},        {"D", "momentum^2/time"}, {"L", kLength}, {"half_life", kTime},
                 {"lambda_inv", kTime}, {"rel_diff", kOne},        {"t_E_final", kTime}};
    double worst = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const auto ts = timescales({ctx.config().qbm.m, pts[k].D, ctx.config().qbm.hbar}, pts[k].L,
                                   ctx.config().eps, 1.0);
        const double rel = (tau[k] - ts.lambda_inv) / ts.lambda_inv;
        worst = std::isfinite(rel) ? std::max(worst, std::abs(rel)) : INFINITY;
        t.add({double(pts[k].sweep), pts[k].D, pts[k].L, tau[k], ts.lambda_inv, rel, ts.t_E_final});
    }
    ctx.write("sweeps.csv", t, {{"sweep", "0 = D at fixed L, 1 = L at fixed D"}});
    ctx.note("max_abs_rel_diff", worst);
}

void write_flux(Context& ctx, const ExperimentConfig& c, const std::string& suffix) {
    FluxOptions opts;
    opts.n_lines = static_cast<int>(ctx.integer("recipe.lines"));
    const auto set = trace_flux_lines(c, opts);
    Table lines;
    lines.columns = {{"line", kOne}, {"t", kTime}, {"x", kLength}};
    for (std::size_t l = 0; l < set.trajectories.size(); ++l)
        for (const auto& p : set.trajectories[l]) lines.add({double(l), p.t, p.x});
    const Meta extra{{"series.D", format_double(c.qbm.D)}, {"series.eps", format_double(c.eps)}};
    ctx.write("flux_lines" + suffix + ".csv", lines, extra);

    Table per;
    per.columns = {{"line", kOne},          {"seed", kLength},          {"terminated", kOne},
                   {"quantile_drift", kOne}, {"turning_points", kOne},   {"max_spread_time", kTime},
                   {"recondense_time", kTime}, {"cycle", kTime}};
    const double amp = ctx.number("recipe.min_amplitude");
    int recondensing = 0;
    for (std::size_t l = 0; l < set.trajectories.size(); ++l) {
        const auto r = recondensation(set.trajectories[l], amp);
        recondensing += r.detected;
        per.add({double(l), set.seeds[l], double(set.terminated[l]), set.quantile_drift[l], double(r.turning_points),
                 r.max_spread_time, r.recondense_time, r.cycle});
    }
    ctx.write("flux_summary" + suffix + ".csv", per, extra);
    ctx.note("max_quantile_drift" + suffix, set.max_quantile_drift);
    ctx.note("crossed" + suffix, set.crossed ? 1.0 : 0.0);
    ctx.note("recondensing_lines" + suffix, recondensing);
}

void flux_single(Context& ctx) { write_flux(ctx, ctx.config(), ""); }

void flux_environment(Context& ctx) {
    for (double D : ctx.list("recipe.D")) write_flux(ctx, with_D(ctx.config(), D), tag("_D", D));
}

void spin_model(Context& ctx) {
    const double omega = ctx.number("recipe.omega");
    const auto Ds = ctx.list("recipe.D");
    const double t_max = ctx.number("recipe.t_max");
    const int steps = static_cast<int>(ctx.integer("recipe.points"));
    if (steps < 2) throw ConfigError("recipe.points must be at least 2");

    Table t;
    t.columns = {{"t", kTime}};
    for (double D : Ds) {
        t.columns.push_back({tag("p_x_D", D), kOne});
        t.columns.push_back({tag("p_y_D", D), kOne});
    }
    double worst = 0;
    for (int i = 0; i < steps; ++i) {
        const double s = t_max * i / (steps - 1);
        std::vector<double> row{s};
        for (double D : Ds) {
            for (auto axis : {LindbladAxis::x, LindbladAxis::y}) {
                const SpinModelParams sp{omega, D, axis};
                const double p = spin_survival_single(sp, s);
                row.push_back(p);
                if (i % std::max(1, steps / 10) == 0)
                    worst = std::max(worst, std::abs(spin_lindblad_numeric(sp, s, 1e-3)(0, 0).real() - p));
            }
        }
        t.add(std::move(row));
    }
    ctx.write("spin_survival.csv", t, {{"model", "H = omega sigma_x, Lindblad sqrt(D) sigma_axis"}});
    ctx.note("max_closed_vs_numeric", worst);

    const double tau = ctx.number("recipe.tau");
    Table z;
    z.columns = {{"N", kOne}, {"eps", kTime}};
    for (double D : Ds) {
        z.columns.push_back({tag("p_x_D", D), kOne});
        z.columns.push_back({tag("p_y_D", D), kOne});
    }
    for (double Nd : ctx.list("recipe.N")) {
        const int N = static_cast<int>(Nd);
        if (N < 1 || N != Nd) throw ConfigError("recipe.N entries must be positive integers");
        std::vector<double> row{double(N), tau / N};
        for (double D : Ds)
            for (auto axis : {LindbladAxis::x, LindbladAxis::y})
                row.push_back(spin_zeno_sequence({omega, D, axis}, tau / N, N));
        z.add(std::move(row));
    }
    ctx.write("spin_zeno.csv", z, {{"series.tau", format_double(tau)}});
}

void gaussian_model(Context& ctx) {
    const auto& c = ctx.config();
    const GaussianModelParams gp{c.sigma, c.qbm.D, c.qbm.m, c.qbm.hbar};
    gp.validate();
    const double t_max = ctx.number("recipe.t_max");
    const int points = static_cast<int>(ctx.integer("recipe.points"));
    if (points < 2) throw ConfigError("recipe.points must be at least 2");
    const bool lattice = ctx.integer("recipe.lattice") != 0;
    const auto rho0 = gaussian_state(c.grid(), c.sigma);
    Eigen::VectorXcd psi(c.n);
    for (int i = 0; i < c.n; ++i) psi(i) = std::sqrt(rho0(i, i).real());
    const double h2 = c.eta * c.eta;

    Table t;
    t.columns = {{"t", kTime}, {"closed_form", kOne}, {"lattice", kOne}};
    double worst = 0;
    const KernelPropagator step(c.grid(), c.qbm, t_max / (points - 1));
    DensityMatrix rho = rho0;
    for (int i = 0; i < points; ++i) {
        const double s = t_max * i / (points - 1);
        const double cf = gaussian_overlap(gp, s);
        double lat = kNaN;
        if (lattice) {
            if (i > 0) rho = step.apply(rho);
            lat = (h2 * psi.dot(rho.values() * psi)).real();
            worst = std::max(worst, std::abs(lat - cf));
        }
        t.add({s, cf, lat});
    }
    ctx.write("overlap.csv", t, {{"model", "survival in the initial Gaussian without intermediate projections"}});
    ctx.note("t_z", gp.t_z());
    ctx.note("t_d", gp.t_d());
    if (lattice) ctx.note("max_lattice_vs_closed", worst);
}

void potential_equivalence(Context& ctx) {
    const auto Ds = ctx.list("recipe.D");
    const int windows = static_cast<int>(ctx.integer("recipe.windows"));
    if (windows < 1) throw ConfigError("recipe.windows must be at least 1");
    const auto& base = ctx.config();
    const DensityMatrix start = initial_state(base);
    const ComplexPotential pot{v0_from_eps(base.eps, base.qbm.hbar), base.proj.L, base.proj.a};
    std::vector<std::pair<std::vector<double>, std::vector<double>>> out(Ds.size());
    parallel_for(static_cast<int>(Ds.size()), [&](int i) {
        auto c = with_D(base, Ds[i]);
        c.total_time = windows * c.eps;
        c.record_substeps = false;
        const auto run = run_sequence(c, start);
        std::vector<double> sp, sv;
        for (const auto& p : run.survival) sp.push_back(p.p);
        DensityMatrix rho(start.grid(), start.values(), 0.0);
        sv.push_back(rho.trace());
        for (int k = 1; k <= windows; ++k) {
            rho = evolve_with_potential(rho, pot, c.qbm, c.eps, c.dt);
            sv.push_back(rho.trace());
        }
        out[i] = {std::move(sp), std::move(sv)};
    });
    for (std::size_t i = 0; i < Ds.size(); ++i) {
        Table t;
        t.columns = {{"t", kTime}, {"survival_projector", kOne}, {"survival_potential", kOne}, {"rel_diff", kOne}};
        double worst = 0;
        for (int k = 0; k <= windows; ++k) {
            const double a = out[i].first.at(k), b = out[i].second.at(k);
            const double rel = (b - a) / a;
            worst = std::max(worst, std::abs(rel));
            t.add({k * base.eps, a, b, rel});
        }
        ctx.write(tag("equivalence_D", Ds[i]) + ".csv", t,
                  {{"series.D", format_double(Ds[i])}, {"potential.V0", format_double(pot.V0)}});
        ctx.note(tag("max_rel_diff_D", Ds[i]), worst);
    }
}

void classical_mode(Context& ctx) {
    SteadyModeOptions o;
    o.cells_inside = static_cast<int>(ctx.integer("recipe.cells"));
    o.p_points = static_cast<int>(ctx.integer("recipe.p_points"));
    o.p_max = ctx.number("recipe.p_max");
    o.gate_eps = ctx.number("recipe.gate");
    const auto mode = find_steady_mode(o);
    Table shape;
    shape.columns = {{"x_scaled", kOne}, {"p_scaled", kOne}, {"w", kOne}};
    const auto& xg = mode.shape.x_grid();
    const auto& pg = mode.shape.p_grid();
    for (int j = 0; j < xg.size(); ++j)
        for (int k = 0; k < pg.size(); ++k) shape.add({xg.coordinate(j), pg.coordinate(k), mode.shape.values()(k, j)});
    const Meta scaled{{"scaling", "x in L, p in (m L D)^(1/3), t in (m^2 L^2 / D)^(1/3)"}};
    ctx.write("mode_shape.csv", shape, scaled);
    Table marg;
    marg.columns = {{"x_scaled", kOne}, {"density", kOne}};
    const auto pm = mode.shape.position_marginal();
    for (int j = 0; j < xg.size(); ++j) marg.add({xg.coordinate(j), pm[j]});
    ctx.write("mode_position_marginal.csv", marg, scaled);

    ctx.note("lambda_scaled", mode.lambda);
    ctx.note("x2_scaled", mode.x2);
    ctx.note("p2_scaled", mode.p2);
    ctx.note("xp2_scaled", mode.xp2);
    ctx.note("t_converged_scaled", mode.t_converged);
    const auto dim = rescale(mode, ctx.config().qbm, ctx.config().proj.L);
    ctx.note("x2", dim.x2);
    ctx.note("p2", dim.p2);
    ctx.note("xp2", dim.xp2);
    ctx.note("lambda_inv", 1.0 / dim.lambda);

    const long particles = ctx.integer("recipe.langevin");
    if (particles > 0) {
        LangevinOptions lo;
        lo.n_particles = static_cast<int>(particles);
        lo.t = ctx.number("recipe.langevin_t");
        lo.dt = ctx.number("recipe.langevin_dt");
        lo.sample_every = 0.01;
        lo.seed = ctx.config().seed;
        lo.start = LangevinStart::uniform;
        const auto lr = langevin_oracle({1.0, 1.0, 1.0}, 1.0, lo);
        ctx.write("langevin_survival.csv", survival_table(lr.survival), scaled);
        ctx.note("langevin_survivors", lr.survivors);
        ctx.note("langevin_x2", lr.x2);
        ctx.note("langevin_x2_err", lr.x2_err);
        ctx.note("langevin_p2", lr.p2);
        ctx.note("langevin_p2_err", lr.p2_err);
        ctx.note("langevin_xp2", lr.xp2);
        ctx.note("langevin_xp2_err", lr.xp2_err);
    }
}

struct Entry {
    RecipeInfo info;
    void (*run)(Context&);
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> r = {
        {{"p2-decomposition", "post-projection <p^2> and its red/Delta/Sigma split from the prepared state",
          {{"init.kind", "prepared"}, {"run.total_time", "0.1"}, {"recipe.D", "100,4000,20000"}}},
         p2_decomposition},
        {{"steady-moments", "post-projection moments and survival at strong decoherence",
          {{"qbm.D", "20000"},
           {"run.total_time", "0.2"},
           {"recipe.average_from", "0.1"},
           {"recipe.classical", "1"}}},
         steady_moments},
        {{"steady-wigner", "Wigner function and marginals of the late post-projection state",
          {{"qbm.D", "20000"},
           {"init.kind", "prepared"},
           {"run.total_time", "0.2"},
           {"run.record_substeps", "0"},
           {"recipe.x_extent", "0.75"},
           {"recipe.p_sigmas", "5"}}},
         steady_wigner},
        {{"spatial-profiles", "late post-projection position densities for several D",
          {{"init.kind", "prepared"}, {"run.total_time", "0.2"}, {"recipe.D", "0,100,4000,20000"}}},
         spatial_profiles},
        {{"regime-surface", "half-life minus classical decay time over a (D, eps) grid, plus the boundary curve",
          {{"recipe.D", "300,1000,3000,10000,30000"},
           {"recipe.eps", "0.0005,0.001,0.002,0.004,0.008"},
           {"recipe.max_time", "2"},
           {"recipe.boundary_D_min", "10"},
           {"recipe.boundary_D_max", "100000"}}},
         regime_surface},
        {{"classical-sweeps", "half-life against the classical decay time over D and over L",
          {{"recipe.D", "3000,10000,30000"},
           {"recipe.L", "0.8,1,1.2"},
           {"recipe.D_for_L", "10000"},
           {"recipe.L_for_D", "1"},
           {"recipe.max_time", "1"}}},
         classical_sweeps},
        {{"flux-free", "flux lines of the free Gaussian (no projection inside the run)",
          {{"run.eps", "1"}, {"run.total_time", "0.1"}, {"recipe.lines", "9"}, {"recipe.min_amplitude", "0.005"}}},
         flux_single},
        {{"flux-projected", "flux lines through a projection sequence without environment",
          {{"run.eps", "0.02"},
           {"run.total_time", "0.1"},
           {"recipe.lines", "9"},
           {"recipe.min_amplitude", "0.005"}}},
         flux_single},
        {{"flux-environment", "flux lines through projections for several D",
          {{"run.total_time", "0.4"},
           {"recipe.D", "0,100,4000"},
           {"recipe.lines", "9"},
           {"recipe.min_amplitude", "0.005"}}},
         flux_environment},
        {{"spin-model", "two-level survival under dephasing and the projected sequence",
          {{"recipe.omega", "1"},
           {"recipe.D", "0,0.5,1,2.5"},
           {"recipe.t_max", "5"},
           {"recipe.points", "501"},
           {"recipe.tau", "1"},
           {"recipe.N", "1,2,5,10,20,50,100"}}},
         spin_model},
        {{"gaussian-model", "overlap with the initial Gaussian, closed form against the lattice",
          {{"qbm.D", "100"}, {"recipe.t_max", "0.05"}, {"recipe.points", "21"}, {"recipe.lattice", "1"}}},
         gaussian_model},
        {{"potential-equivalence", "projector string against the equivalent absorbing potential",
          {{"recipe.D", "0,100"}, {"recipe.windows", "5"}}},
         potential_equivalence},
        {{"classical-mode", "slowest decaying mode of the classical absorbing problem",
          {{"qbm.D", "20000"},
           {"recipe.cells", "200"},
           {"recipe.p_points", "241"},
           {"recipe.p_max", "6"},
           {"recipe.gate", "0"},
           {"recipe.langevin", "0"},
           {"recipe.langevin_t", "3"},
           {"recipe.langevin_dt", "0.0001"}}},
         classical_mode},
    };
    return r;
}

const Entry& find_entry(const std::string& name) {
    for (const auto& e : registry())
        if (e.info.name == name) return e;
    std::string known;
    for (const auto& e : registry()) known += (known.empty() ? "" : ", ") + e.info.name;
    throw UsageError("unknown recipe '" + name + "' (known: " + known + ")");
}

}  // namespace

const std::vector<RecipeInfo>& recipes() {
    static const std::vector<RecipeInfo> infos = [] {
        std::vector<RecipeInfo> v;
        for (const auto& e : registry()) v.push_back(e.info);
        return v;
    }();
    return infos;
}

const RecipeInfo& find_recipe(const std::string& name) { return find_entry(name).info; }

RecipeOutput run_recipe(const std::string& name, const KeyValues& overrides, const fs::path& out_dir) {
    const auto& entry = find_entry(name);
    const auto start = std::chrono::steady_clock::now();

    KeyValues merged = entry.info.defaults;
    for (const auto& [k, v] : overrides) {
        if (k.rfind("recipe.", 0) == 0 && !entry.info.defaults.count(k))
            throw ConfigError("unknown parameter '" + k + "' for recipe " + name);
        merged[k] = v;
    }
    const auto config = apply_overrides(ExperimentConfig{}, merged);
    KeyValues params;
    for (const auto& [k, v] : merged)
        if (k.rfind("recipe.", 0) == 0) params[k] = v;

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + out_dir.string() + ": " + ec.message());

    Context ctx(name, config, params, out_dir);
    entry.run(ctx);

    RecipeOutput out;
    out.dir = out_dir;
    auto& m = out.manifest;
    m.recipe = name;
    m.version = version_string();
    m.seed = config.seed;
    m.config = config_echo(config);
    m.params = ctx.params_meta();
    m.summary = ctx.summary();
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(out_dir, m, ctx.files());
    out.manifest = read_manifest(out_dir / "manifest.json");
    return out;
}

double position_cv(const std::vector<double>& x, const std::vector<double>& density, double L, double fraction) {
    if (x.size() != density.size() || !(L > 0) || !(fraction > 0 && fraction <= 1))
        throw ArgumentError("position_cv: bad arguments");
    const double half = 0.5 * L * fraction;
    double s = 0, s2 = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) > half + 1e-12) continue;
        s += density[i];
        s2 += density[i] * density[i];
        ++n;
    }
    if (n < 2) throw ArgumentError("position_cv: fewer than two points in the central window");
    const double mean = s / n;
    const double var = std::max(0.0, s2 / n - mean * mean);
    return std::sqrt(var) / mean;
}

void parallel_for(int n, const std::function<void(int)>& f) {
    if (n <= 0) return;
    const int workers = std::max(1, std::min<int>(n, static_cast<int>(std::thread::hardware_concurrency())));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace qzeno

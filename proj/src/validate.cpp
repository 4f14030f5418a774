#include "qzeno/validate.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "qzeno/analytic_models.hpp"
#include "qzeno/flux.hpp"
#include "qzeno/lattice.hpp"
#include "qzeno/projectors.hpp"
#include "qzeno/propagators.hpp"

namespace qzeno {

namespace {

double sup(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

std::vector<CheckResult> run_invariant_suite(const ExperimentConfig& config) {
    config.validate();
    std::vector<CheckResult> out;
    auto check = [&](std::string name, double value, double tol) {
        out.push_back({std::move(name), value, tol, std::isfinite(value) && value <= tol});
    };

    const Grid1D grid = config.grid();
    QBMParams env = config.qbm;
    if (env.D == 0.0) env.D = 100.0;
    const double hb = env.hbar;
    const double t = 0.01;
    const auto rho = gaussian_state(grid, config.sigma, 0.0, 0.0);

    const auto k = evolve_kernel(rho, env, t);
    check("kernel trace preserved", std::abs(k.trace() - rho.trace()), 1e-9);
    check("kernel hermiticity", k.hermiticity_defect(), 1e-12);

    const int steps = std::max(1, static_cast<int>(std::lround(t / config.dt)));
    const auto s = evolve_stepper(rho, env, std::nullopt, t / steps, steps);
    check("kernel vs stepper sup norm", sup(k.values() - s.values()) / sup(rho.values()), 1e-4);

    const double p2_0 = moments(rho, hb).p2, p2_1 = moments(k, hb).p2;
    const double expect = 2.0 * env.D * t;
    check("momentum diffusion 2Dt", std::abs((p2_1 - p2_0) - expect) / expect, 1e-6);

    const auto [projected, rep] = apply_projection(k, config.proj, hb);
    (void)projected;
    check("p2 split sums to p2_after",
          std::abs(rep.p2_red + rep.delta_term + rep.sigma_term - rep.p2_after) / std::abs(rep.p2_after), 1e-9);

    ExperimentConfig short_run = config;
    short_run.qbm = env;
    short_run.initial = InitialKind::gaussian;
    short_run.total_time = 5 * config.eps;
    short_run.record_substeps = false;
    short_run.stop_survival = 0;
    const auto run = run_sequence(short_run);
    double rise = 0;
    for (std::size_t i = 1; i < run.survival.size(); ++i)
        rise = std::max(rise, run.survival[i].p - run.survival[i - 1].p);
    check("survival non-increasing", rise, 1e-12);

    if (grid.size() % 4 == 0) {
        const auto back = inverse_wigner(wigner_transform(k, hb));
        check("Wigner round trip", sup(back.values() - k.values()) / sup(k.values()), 1e-10);
    }

    check("continuity residual", continuity_residual(rho, env), 1e-4);

    double spin = 0;
    for (auto axis : {LindbladAxis::x, LindbladAxis::y}) {
        const SpinModelParams sp{1.0, 0.5, axis};
        for (double tt : {0.5, 1.0, 2.0})
            spin = std::max(spin, std::abs(spin_lindblad_numeric(sp, tt, 1e-3)(0, 0).real() -
                                           spin_survival_single(sp, tt)));
    }
    check("spin closed form vs master equation", spin, 1e-8);

    Eigen::VectorXcd psi(grid.size());
    for (int i = 0; i < grid.size(); ++i) psi(i) = std::sqrt(rho(i, i).real());
    const double h2 = grid.spacing() * grid.spacing();
    const double lattice = (h2 * psi.dot(k.values() * psi)).real();
    const double closed = gaussian_overlap({config.sigma, env.D, env.m, hb}, t);
    check("Gaussian overlap closed form", std::abs(lattice - closed), 1e-4);
    return out;
}

}  // namespace qzeno

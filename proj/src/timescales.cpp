#include "qzeno/timescales.hpp"

#include <cmath>
#include <limits>

#include "qzeno/error.hpp"

namespace qzeno {

Timescales timescales(const QBMParams& qbm, double L, double eps, double p2_current) {
    qbm.validate();
    if (!(L > 0.0)) throw ConfigError("proj.L must be positive");
    if (!(eps > 0.0)) throw ConfigError("run.eps must be positive");
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double m = qbm.m, hb = qbm.hbar, D = qbm.D;
    Timescales ts;
    ts.t_E = p2_current > 0.0 ? hb * m / p2_current : inf;
    ts.p_c = m * L / eps;
    ts.a_cutoff = hb / ts.p_c;
    ts.V0 = hb / eps;
    if (D > 0.0) {
        ts.t_loc = std::sqrt(m * hb / D);
        ts.tau_suppress = m * hb / (D * eps);
        ts.lambda_inv = std::cbrt(m * m * L * L / D);
        ts.p_s = std::cbrt(m * L * D);
        ts.t_E_final = hb * std::cbrt(m) / std::pow(L * D, 2.0 / 3.0);
    } else {
        ts.t_loc = ts.tau_suppress = ts.lambda_inv = ts.t_E_final = inf;
        ts.p_s = 0.0;
    }
    return ts;
}

Regime classify_regime(const Timescales& ts, double eps) {
    if (ts.t_loc < eps) return Regime::trivial_classical;
    if (ts.t_E_final < eps) return Regime::classical;
    return Regime::zeno;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::zeno: return "zeno";
        case Regime::classical: return "classical";
        case Regime::trivial_classical: return "trivial-classical";
    }
    return "unknown";
}

double regime_boundary_eps(const QBMParams& qbm, double L) {
    return timescales(qbm, L, 1.0, 1.0).t_E_final;
}

}  // namespace qzeno

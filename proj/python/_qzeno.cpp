// Python bindings: configuration by key=value dicts, the recipes, and the
// pieces most useful from a notebook (runs, timescales, toy models).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qzeno/analytic_models.hpp"
#include "qzeno/classical.hpp"
#include "qzeno/config.hpp"
#include "qzeno/error.hpp"
#include "qzeno/io.hpp"
#include "qzeno/recipes.hpp"
#include "qzeno/runner.hpp"
#include "qzeno/timescales.hpp"
#include "qzeno/validate.hpp"

namespace py = pybind11;
using namespace qzeno;

namespace {

ExperimentConfig config_of(const KeyValues& kv) { return apply_overrides(ExperimentConfig{}, kv); }

py::array_t<double> array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict run(const KeyValues& overrides) {
    const auto c = config_of(overrides);
    RunResult r;
    {
        py::gil_scoped_release release;
        r = run_sequence(c);
    }
    std::vector<double> ts, ps;
    for (const auto& s : r.survival) ts.push_back(s.t), ps.push_back(s.p);
    std::vector<double> t, projected, x2, p2, xp, p2_red, delta, sigma;
    for (const auto& m : r.moments.records()) {
        t.push_back(m.t);
        projected.push_back(m.projected);
        x2.push_back(m.x2);
        p2.push_back(m.p2);
        xp.push_back(m.xp_sym);
        p2_red.push_back(m.p2_red);
        delta.push_back(m.delta_term);
        sigma.push_back(m.sigma_term);
    }
    py::dict moments;
    moments["t"] = array(t);
    moments["projected"] = array(projected);
    moments["x2"] = array(x2);
    moments["p2"] = array(p2);
    moments["xp2"] = array(xp);
    moments["p2_red"] = array(p2_red);
    moments["delta"] = array(delta);
    moments["sigma"] = array(sigma);
    py::dict out;
    out["survival_t"] = array(ts);
    out["survival"] = array(ps);
    out["moments"] = moments;
    out["depleted"] = r.depleted;
    const auto h = half_life(r.survival);
    out["half_life"] = h ? py::cast(*h) : py::none();
    if (r.final_state) {
        const auto& v = r.final_state->values();
        py::array_t<std::complex<double>> rho({v.rows(), v.cols()});
        auto m = rho.mutable_unchecked<2>();
        for (Eigen::Index i = 0; i < v.rows(); ++i)
            for (Eigen::Index j = 0; j < v.cols(); ++j) m(i, j) = v(i, j);
        out["final_rho"] = rho;
    }
    return out;
}

py::dict recipe(const std::string& name, const KeyValues& overrides, const std::filesystem::path& out_dir) {
    RecipeOutput o;
    {
        py::gil_scoped_release release;
        o = run_recipe(name, overrides, out_dir);
    }
    py::dict d;
    d["dir"] = o.dir;
    py::list files;
    for (const auto& f : o.manifest.files) files.append(py::dict(py::arg("file") = f.file, py::arg("sha256") = f.sha256));
    d["files"] = files;
    py::dict summary;
    for (const auto& [k, v] : o.manifest.summary) summary[py::str(k)] = v;
    d["summary"] = summary;
    return d;
}

py::dict timescales_of(const KeyValues& overrides, double p2) {
    const auto c = config_of(overrides);
    const auto t = timescales(c.qbm, c.proj.L, c.eps, p2);
    py::dict d;
    d["t_E"] = t.t_E;
    d["t_loc"] = t.t_loc;
    d["tau_suppress"] = t.tau_suppress;
    d["lambda_inv"] = t.lambda_inv;
    d["p_s"] = t.p_s;
    d["t_E_final"] = t.t_E_final;
    d["p_c"] = t.p_c;
    d["a_cutoff"] = t.a_cutoff;
    d["V0"] = t.V0;
    d["regime"] = to_string(classify_regime(t, c.eps));
    return d;
}

}  // namespace

PYBIND11_MODULE(_qzeno, m) {
    m.doc() = "Repeated position projections under quantum Brownian motion";
    m.attr("__version__") = version_string();

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);

    m.def("config", [](const KeyValues& kv) {
        const auto echo = config_echo(config_of(kv));
        return KeyValues(echo.begin(), echo.end());
    },
          py::arg("overrides") = KeyValues{}, "Full configuration echo after applying overrides.");
    m.def("run", &run, py::arg("overrides") = KeyValues{},
          "Projection sequence; survival, moments and the final unnormalized density matrix.");
    m.def("recipes", [] {
        std::vector<std::string> names;
        for (const auto& r : recipes()) names.push_back(r.name);
        return names;
    });
    m.def("run_recipe", &recipe, py::arg("name"), py::arg("overrides"), py::arg("out_dir"));
    m.def("timescales", &timescales_of, py::arg("overrides") = KeyValues{}, py::arg("p2") = 25.0);
    m.def("validate", [](const KeyValues& kv) {
        std::vector<std::tuple<std::string, double, double, bool>> out;
        for (const auto& r : run_invariant_suite(config_of(kv))) out.emplace_back(r.name, r.value, r.tolerance, r.pass);
        return out;
    }, py::arg("overrides") = KeyValues{});

    m.def("spin_survival", [](double omega, double D, const std::string& axis, double t) {
        if (axis != "x" && axis != "y") throw ArgumentError("axis must be 'x' or 'y'");
        return spin_survival_single({omega, D, axis == "x" ? LindbladAxis::x : LindbladAxis::y}, t);
    }, py::arg("omega"), py::arg("D"), py::arg("axis"), py::arg("t"));
    m.def("gaussian_overlap", [](double sigma, double D, double t, double mass, double hbar) {
        return gaussian_overlap({sigma, D, mass, hbar}, t);
    }, py::arg("sigma"), py::arg("D"), py::arg("t"), py::arg("m") = 1.0, py::arg("hbar") = 1.0);
    m.def("classical_mode", [](int cells, int p_points) {
        SteadyModeOptions o;
        o.cells_inside = cells;
        o.p_points = p_points;
        SteadyMode s = [&] {
            py::gil_scoped_release release;
            return find_steady_mode(o);
        }();
        py::dict d;
        d["lambda"] = s.lambda;
        d["x2"] = s.x2;
        d["p2"] = s.p2;
        d["xp2"] = s.xp2;
        return d;
    }, py::arg("cells") = 200, py::arg("p_points") = 241,
          "Slowest classical mode in scaled units (x in L, p in (m L D)^(1/3)).");
}

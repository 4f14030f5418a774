// qzeno command-line tool: run and sweep recipes, check invariants, print timescales.
// Exit codes: 0 ok, 2 configuration or usage error, 3 numerical error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qzeno/config.hpp"
#include "qzeno/error.hpp"
#include "qzeno/io.hpp"
#include "qzeno/recipes.hpp"
#include "qzeno/timescales.hpp"
#include "qzeno/validate.hpp"

namespace fs = std::filesystem;
using namespace qzeno;

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericalExit = 3;

struct GlobalOptions {
    std::string config_file;
    std::vector<std::string> sets;
};

KeyValues collect_overrides(const GlobalOptions& g) {
    KeyValues kv;
    if (!g.config_file.empty()) kv = read_key_values(g.config_file);
    for (const auto& s : g.sets) {
        auto [k, v] = split_assignment(s);
        kv[k] = v;
    }
    return kv;
}

// Config keys only, for subcommands that do not take recipe parameters.
ExperimentConfig config_from(const KeyValues& kv) {
    for (const auto& [k, v] : kv)
        if (k.rfind("recipe.", 0) == 0) throw UsageError("'" + k + "' is only valid with run or sweep");
    return apply_overrides(ExperimentConfig{}, kv);
}

void print_summary(const RecipeOutput& out) {
    std::cout << "wrote " << out.manifest.files.size() << " file(s) to " << out.dir.string() << '\n';
    for (const auto& [k, v] : out.manifest.summary) std::cout << "  " << k << " = " << v << '\n';
}

int cmd_run(const GlobalOptions& g, const std::string& recipe) {
    find_recipe(recipe);
    const auto out = run_recipe(recipe, collect_overrides(g), output_root() / recipe);
    print_summary(out);
    return 0;
}

// "k=v1,v2" pairs into their cartesian product, in the order given.
std::vector<KeyValues> expand(const std::vector<std::string>& params) {
    std::vector<KeyValues> combos{KeyValues{}};
    std::vector<std::string> seen;
    for (const auto& p : params) {
        auto [k, list] = split_assignment(p);
        if (std::find(seen.begin(), seen.end(), k) != seen.end()) throw UsageError("--param " + k + " given twice");
        seen.push_back(k);
        std::vector<std::string> values;
        std::string item;
        std::stringstream ss(list);
        while (std::getline(ss, item, ',')) {
            if (item.empty()) throw UsageError("--param " + k + ": empty value in '" + list + "'");
            values.push_back(item);
        }
        std::vector<KeyValues> next;
        for (const auto& c : combos)
            for (const auto& v : values) {
                auto n = c;
                n[k] = v;
                next.push_back(std::move(n));
            }
        combos = std::move(next);
    }
    return combos;
}

std::string combo_name(const KeyValues& combo, const std::vector<std::string>& order) {
    std::string name;
    for (const auto& p : order) {
        const auto k = split_assignment(p).first;
        name += (name.empty() ? "" : "_") + k + "=" + combo.at(k);
    }
    return name;
}

int cmd_sweep(const GlobalOptions& g, const std::string& recipe, const std::vector<std::string>& params) {
    find_recipe(recipe);
    if (params.empty()) throw UsageError("sweep needs at least one --param key=v1,v2,...");
    const auto base = collect_overrides(g);
    const auto combos = expand(params);
    const fs::path root = output_root() / (recipe + "-sweep");

    // Validate every combination before any work starts.
    for (const auto& c : combos) {
        auto kv = base;
        for (const auto& [k, v] : c) kv[k] = v;
        KeyValues config_only;
        for (const auto& [k, v] : kv)
            if (k.rfind("recipe.", 0) != 0) config_only[k] = v;
        apply_overrides(ExperimentConfig{}, config_only);
    }

    std::vector<std::string> names(combos.size());
    parallel_for(static_cast<int>(combos.size()), [&](int i) {
        auto kv = base;
        for (const auto& [k, v] : combos[i]) kv[k] = v;
        names[i] = combo_name(combos[i], params);
        run_recipe(recipe, kv, root / names[i]);
    });

    RunManifest m;
    m.recipe = recipe + " (sweep)";
    m.version = version_string();
    for (const auto& p : params) {
        auto [k, v] = split_assignment(p);
        m.params.emplace_back(k, v);
    }
    std::vector<std::string> files;
    for (const auto& n : names) files.push_back(n + "/manifest.json");
    write_manifest(root, m, files);
    std::cout << "wrote " << combos.size() << " run(s) under " << root.string() << '\n';
    return 0;
}

int cmd_validate(const GlobalOptions& g) {
    const auto config = config_from(collect_overrides(g));
    const auto results = run_invariant_suite(config);
    bool ok = true;
    for (const auto& r : results) {
        std::printf("%s  %-40s %.3e (tol %.1e)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.value, r.tolerance);
        ok = ok && r.pass;
    }
    return ok ? 0 : kNumericalExit;
}

int cmd_timescales(const GlobalOptions& g, std::optional<double> p2) {
    const auto c = config_from(collect_overrides(g));
    // Default <p^2> is that of the initial Gaussian.
    const double p2_now = p2 ? *p2 : c.qbm.hbar * c.qbm.hbar / (4.0 * c.sigma * c.sigma);
    if (!(p2_now > 0)) throw ConfigError("--p2 must be positive");
    const auto ts = timescales(c.qbm, c.proj.L, c.eps, p2_now);
    auto row = [](const char* name, double v, const char* what) {
        std::printf("%-14s %-14.6g %s\n", name, v, what);
    };
    std::printf("D=%g m=%g hbar=%g L=%g eps=%g <p^2>=%g\n", c.qbm.D, c.qbm.m, c.qbm.hbar, c.proj.L, c.eps, p2_now);
    row("t_E", ts.t_E, "hbar m / <p^2>");
    row("t_loc", ts.t_loc, "sqrt(m hbar / D)");
    row("tau", ts.tau_suppress, "m hbar / (D eps)");
    row("lambda_inv", ts.lambda_inv, "(m^2 L^2 / D)^(1/3)");
    row("p_s", ts.p_s, "(m L D)^(1/3)");
    row("t_E_final", ts.t_E_final, "hbar m^(1/3) / (L D)^(2/3)");
    row("p_c", ts.p_c, "m L / eps");
    row("a_cutoff", ts.a_cutoff, "hbar / p_c");
    row("V0", ts.V0, "hbar / eps");
    std::printf("regime         %s\n", to_string(classify_regime(ts, c.eps)).c_str());
    if (c.qbm.D > 0) std::printf("boundary eps   %-14.6g t_E_final = eps\n", regime_boundary_eps(c.qbm, c.proj.L));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Repeated position projections of a particle under quantum Brownian motion"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("--config", g.config_file, "key=value file of overrides")->check(CLI::ExistingFile);
    app.add_option("--set", g.sets, "override one key, e.g. --set qbm.D=4000 (repeatable)");

    std::string recipe;
    auto* run = app.add_subcommand("run", "run a named recipe into $QZENO_OUTPUT_DIR/<recipe>");
    run->add_option("recipe", recipe, "recipe name")->required();

    std::vector<std::string> params;
    auto* sweep = app.add_subcommand("sweep", "run a recipe over the cartesian product of --param lists");
    sweep->add_option("recipe", recipe, "recipe name")->required();
    sweep->add_option("--param", params, "key=v1,v2,... (repeatable)");

    auto* validate = app.add_subcommand("validate", "run the fast invariant suite");
    auto* ts = app.add_subcommand("timescales", "print the timescales of a configuration");
    std::optional<double> p2;
    ts->add_option("--p2", p2, "current <p^2> (default: the initial Gaussian's)");

    auto* list = app.add_subcommand("recipes", "list recipes and their parameters");

    // Global options are accepted after the subcommand as well.
    for (auto* sub : {run, sweep, validate, ts, list}) {
        sub->add_option("--config", g.config_file, "key=value file of overrides")->check(CLI::ExistingFile);
        sub->add_option("--set", g.sets, "override one key (repeatable)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigExit;
    }

    try {
        if (*run) return cmd_run(g, recipe);
        if (*sweep) return cmd_sweep(g, recipe, params);
        if (*validate) return cmd_validate(g);
        if (*ts) return cmd_timescales(g, p2);
        if (*list) {
            for (const auto& r : recipes()) {
                std::cout << r.name << "  " << r.description << '\n';
                for (const auto& [k, v] : r.defaults) std::cout << "    " << k << " = " << v << '\n';
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const ArgumentError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumericalExit;
    }
    return 0;
}

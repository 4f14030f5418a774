#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "qzeno/analytic_models.hpp"
#include "qzeno/error.hpp"
#include "qzeno/recipes.hpp"

using namespace qzeno;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("qzeno_recipes_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string meta_value(const CsvFile& f, const std::string& key) {
    for (const auto& [k, v] : f.meta)
        if (k == key) return v;
    return {};
}

}  // namespace

TEST_CASE("registry holds the thirteen recipes, each with a description") {
    std::set<std::string> names;
    for (const auto& r : recipes()) {
        names.insert(r.name);
        CHECK_FALSE(r.description.empty());
    }
    CHECK(names == std::set<std::string>{"p2-decomposition", "steady-moments", "steady-wigner", "spatial-profiles",
                                         "regime-surface", "classical-sweeps", "flux-free", "flux-projected",
                                         "flux-environment", "spin-model", "gaussian-model", "potential-equivalence",
                                         "classical-mode"});
    CHECK_THROWS_AS(find_recipe("nope"), UsageError);
}

TEST_CASE("unknown recipe, unknown parameter and bad override are rejected before any output") {
    const auto dir = scratch("errors");
    CHECK_THROWS_AS(run_recipe("nope", {}, dir), UsageError);
    CHECK_THROWS_WITH_AS(run_recipe("spin-model", {{"recipe.bogus", "1"}}, dir), doctest::Contains("recipe.bogus"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(run_recipe("spin-model", {{"qbm.D", "x"}}, dir), doctest::Contains("qbm.D"), ConfigError);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("spin-model output carries the config echo, units and closed forms") {
    const auto dir = scratch("spin");
    const auto out = run_recipe("spin-model", {{"recipe.D", "0.5"}, {"recipe.points", "11"}}, dir);
    REQUIRE(out.manifest.files.size() == 2);
    const auto f = read_csv(dir / "spin_survival.csv");
    CHECK(meta_value(f, "recipe") == "spin-model");
    CHECK(meta_value(f, "lattice.n") == "256");
    CHECK(meta_value(f, "run.eps") == "0.01");
    CHECK(meta_value(f, "recipe.D") == "0.5");
    CHECK(f.columns == std::vector<std::string>{"t", "p_x_D0.5", "p_y_D0.5"});
    CHECK(f.units.front() == "t=time");
    REQUIRE(f.rows.size() == 11);
    const double t = f.rows[4][0];
    CHECK(f.rows[4][1] == doctest::Approx(spin_survival_single({1, 0.5, LindbladAxis::x}, t)).epsilon(1e-10));
    CHECK(f.rows[4][2] == doctest::Approx(spin_survival_single({1, 0.5, LindbladAxis::y}, t)).epsilon(1e-10));
    CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("identical config gives identical digests") {
    const KeyValues kv{{"recipe.points", "6"}, {"recipe.t_max", "0.02"}};
    const auto a = run_recipe("gaussian-model", kv, scratch("det_a"));
    const auto b = run_recipe("gaussian-model", kv, scratch("det_b"));
    REQUIRE(a.manifest.files.size() == b.manifest.files.size());
    for (std::size_t i = 0; i < a.manifest.files.size(); ++i) CHECK(a.manifest.files[i].sha256 == b.manifest.files[i].sha256);
    const auto c = run_recipe("gaussian-model", {{"recipe.points", "6"}, {"recipe.t_max", "0.03"}}, scratch("det_c"));
    CHECK(c.manifest.files[0].sha256 != a.manifest.files[0].sha256);
}

TEST_CASE("gaussian-model lattice column follows the closed form") {
    const auto dir = scratch("gauss");
    run_recipe("gaussian-model", {{"recipe.points", "6"}}, dir);
    const auto f = read_csv(dir / "overlap.csv");
    for (const auto& r : f.rows) CHECK(std::abs(r[1] - r[2]) < 1e-4);
}

TEST_CASE("recipe defaults apply under empty overrides") {
    // The spin model does not touch the lattice, so the echo must be the stock configuration.
    const auto dir = scratch("defaults");
    const auto out = run_recipe("spin-model", {{"recipe.points", "2"}}, dir);
    std::map<std::string, std::string> echo(out.manifest.config.begin(), out.manifest.config.end());
    CHECK(echo["lattice.n"] == "256");
    CHECK(echo["lattice.eta"] == "0.02");
    CHECK(echo["run.dt"] == "0.001");
    CHECK(echo["init.sigma"] == "0.1");
    CHECK(echo["run.eps"] == "0.01");
    CHECK(echo["proj.a"] == "0.02");
}

TEST_CASE("position_cv") {
    std::vector<double> x, flat, ramp;
    for (int i = -50; i <= 50; ++i) {
        x.push_back(i * 0.01);
        flat.push_back(1.0);
        ramp.push_back(1.0 + i * 0.01);
    }
    CHECK(position_cv(x, flat, 1.0) == doctest::Approx(0.0));
    // Uniform on [-0.4, 0.4] around 1: standard deviation 0.4 / sqrt(3) on the lattice.
    CHECK(position_cv(x, ramp, 1.0) == doctest::Approx(0.4 / std::sqrt(3.0)).epsilon(0.03));
    CHECK_THROWS_AS(position_cv(x, flat, 1.0, 0.0), ArgumentError);
}

TEST_CASE("parallel_for visits every index and rethrows") {
    std::vector<int> seen(50, 0);
    parallel_for(50, [&](int i) { seen[i] += 1; });
    for (int s : seen) CHECK(s == 1);
    CHECK_THROWS_AS(parallel_for(5, [](int i) {
                        if (i == 3) throw NumericalError("boom");
                    }),
                    NumericalError);
}

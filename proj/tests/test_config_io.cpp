#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "qzeno/config.hpp"
#include "qzeno/error.hpp"
#include "qzeno/io.hpp"

using namespace qzeno;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("qzeno_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("key=value text parses with comments and overrides") {
    const auto kv = parse_key_values("# header\nqbm.D = 100\n\nrun.eps=0.005  # trailing\nqbm.D=200\n");
    CHECK(kv.size() == 2);
    CHECK(kv.at("qbm.D") == "200");
    CHECK(kv.at("run.eps") == "0.005");
    CHECK_THROWS_AS(parse_key_values("no equals sign\n"), ConfigError);
    const auto [k, v] = split_assignment("proj.L=1.5");
    CHECK(k == "proj.L");
    CHECK(v == "1.5");
    CHECK_THROWS_AS(split_assignment("=3"), ConfigError);
}

TEST_CASE("overrides reach every field and the echo round-trips") {
    KeyValues kv{{"qbm.D", "4000"},        {"qbm.m", "2"},           {"proj.kind", "smeared"},
                 {"proj.a", "0.01"},       {"proj.L", "0.8"},        {"lattice.n", "128"},
                 {"lattice.eta", "0.03"},  {"run.eps", "0.005"},     {"run.total_time", "0.1"},
                 {"run.seed", "7"},        {"init.kind", "prepared"}, {"init.sigma", "0.12"},
                 {"recipe.anything", "1,2"}};
    const auto c = apply_overrides(ExperimentConfig{}, kv);
    CHECK(c.qbm.D == 4000);
    CHECK(c.qbm.m == 2);
    CHECK(c.proj.a == 0.01);
    CHECK(c.proj.L == 0.8);
    CHECK(c.n == 128);
    CHECK(c.eta == 0.03);
    CHECK(c.eps == 0.005);
    CHECK(c.seed == 7);
    CHECK(c.initial == InitialKind::prepared_steady_state);
    CHECK(c.sigma == 0.12);

    KeyValues echoed;
    for (const auto& [k, v] : config_echo(c)) echoed[k] = v;
    CHECK(echoed.size() == config_keys().size());
    const auto back = apply_overrides(ExperimentConfig{}, echoed);
    CHECK(config_echo(back) == config_echo(c));
}

TEST_CASE("sharp projector without an edge width has a = 0") {
    const auto c = apply_overrides(ExperimentConfig{}, {{"proj.kind", "sharp"}});
    CHECK(c.proj.kind == ProjectorKind::sharp);
    CHECK(c.proj.a == 0.0);
}

TEST_CASE("config errors name the offending key") {
    auto message = [](const KeyValues& kv) {
        try {
            apply_overrides(ExperimentConfig{}, kv);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message({{"qbm.Dee", "1"}}).find("qbm.Dee") != std::string::npos);
    CHECK(message({{"qbm.D", "abc"}}).find("qbm.D") != std::string::npos);
    CHECK(message({{"lattice.n", "12.5"}}).find("lattice.n") != std::string::npos);
    CHECK(message({{"qbm.D", "-1"}}).find("D") != std::string::npos);
    CHECK(message({{"init.kind", "thermal"}}).find("init.kind") != std::string::npos);
    CHECK_FALSE(message({{"run.eps", "0.0015"}}).empty());
    CHECK(parse_list("recipe.D", "1, 2.5,3") == std::vector<double>{1, 2.5, 3});
    CHECK_THROWS_AS(parse_list("recipe.D", "1,,2"), ConfigError);
    CHECK(format_double(0.1) == "0.1");
    CHECK(parse_double("x", format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("csv round trip keeps metadata, units and NaN") {
    const auto dir = scratch("csv");
    Table t;
    t.columns = {{"t", "time"}, {"p2", "hbar^2/L^2"}};
    t.add({0.0, 25.0});
    t.add({0.01, NAN});
    write_csv(dir / "a.csv", {{"recipe", "demo"}, {"qbm.D", "100"}}, t);
    const auto f = read_csv(dir / "a.csv");
    CHECK(f.columns == std::vector<std::string>{"t", "p2"});
    REQUIRE(f.rows.size() == 2);
    CHECK(f.rows[0][1] == 25.0);
    CHECK(std::isnan(f.rows[1][1]));
    CHECK(f.units == std::vector<std::string>{"t=time", "p2=hbar^2/L^2"});
    CHECK(f.meta.front() == std::pair<std::string, std::string>{"recipe", "demo"});

    Table bad;
    bad.columns = {{"a", "1"}};
    CHECK_THROWS(bad.add({1.0, 2.0}));
}

TEST_CASE("sha256 of a known string") {
    const auto dir = scratch("sha");
    std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
    CHECK(sha256_file(dir / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    std::ofstream(dir / "empty.txt", std::ios::binary);
    CHECK(sha256_file(dir / "empty.txt") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("manifest round trip") {
    const auto dir = scratch("manifest");
    std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
    RunManifest m;
    m.recipe = "demo";
    m.version = version_string();
    m.seed = 42;
    m.wall_seconds = 1.5;
    m.config = {{"qbm.D", "100"}};
    m.params = {{"recipe.D", "1,2"}};
    write_manifest(dir, m, {"abc.txt"});
    const auto r = read_manifest(dir / "manifest.json");
    CHECK(r.recipe == "demo");
    CHECK(r.seed == 42);
    CHECK(r.config == m.config);
    CHECK(r.params == m.params);
    REQUIRE(r.files.size() == 1);
    CHECK(r.files[0].bytes == 3);
    CHECK(r.files[0].sha256 == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK_FALSE(r.version.empty());
}

#include "qzeno/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qzeno/error.hpp"

namespace qzeno {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::pair<std::string, std::string> split_assignment(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + arg + "'");
    auto key = trim(arg.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key in '" + arg + "'");
    return {key, trim(arg.substr(eq + 1))};
}

KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            kv.insert_or_assign(split_assignment(line).first, split_assignment(line).second);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str());
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
}

long parse_integer(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw ConfigError(key + ": expected a comma-separated list of numbers");
    return out;
}

std::string format_double(double v) {
    // Shortest form that round-trips; plain notation when it is no longer (100, not 1e+02).
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> config_keys() {
    return {"qbm.m",         "qbm.D",          "qbm.hbar",     "proj.kind",
            "proj.L",        "proj.a",         "lattice.n",    "lattice.eta",
            "run.eps",       "run.total_time", "run.dt",       "run.env_switch_on_time",
            "run.seed",      "run.stop_survival", "run.record_substeps", "init.kind",
            "init.sigma",    "prep.max_cycles", "prep.tolerance"};
}

ExperimentConfig apply_overrides(ExperimentConfig c, const KeyValues& kv) {
    bool a_given = false;
    for (const auto& [key, value] : kv) {
        if (key.rfind("recipe.", 0) == 0) continue;
        if (key == "qbm.m") c.qbm.m = parse_double(key, value);
        else if (key == "qbm.D") c.qbm.D = parse_double(key, value);
        else if (key == "qbm.hbar") c.qbm.hbar = parse_double(key, value);
        else if (key == "proj.L") c.proj.L = parse_double(key, value);
        else if (key == "proj.a") c.proj.a = parse_double(key, value), a_given = true;
        else if (key == "proj.kind") {
            if (value == "sharp") c.proj.kind = ProjectorKind::sharp;
            else if (value == "smeared") c.proj.kind = ProjectorKind::smeared;
            else throw ConfigError(key + ": expected sharp or smeared, got '" + value + "'");
        } else if (key == "lattice.n") c.n = static_cast<int>(parse_integer(key, value));
        else if (key == "lattice.eta") c.eta = parse_double(key, value);
        else if (key == "run.eps") c.eps = parse_double(key, value);
        else if (key == "run.total_time") c.total_time = parse_double(key, value);
        else if (key == "run.dt") c.dt = parse_double(key, value);
        else if (key == "run.env_switch_on_time") c.env_switch_on_time = parse_double(key, value);
        else if (key == "run.seed") {
            const long s = parse_integer(key, value);
            if (s < 0) throw ConfigError(key + ": must be non-negative");
            c.seed = static_cast<std::uint64_t>(s);
        } else if (key == "run.stop_survival") c.stop_survival = parse_double(key, value);
        else if (key == "run.record_substeps") {
            if (value == "true" || value == "1") c.record_substeps = true;
            else if (value == "false" || value == "0") c.record_substeps = false;
            else throw ConfigError(key + ": expected true or false, got '" + value + "'");
        } else if (key == "init.kind") {
            if (value == "gaussian") c.initial = InitialKind::gaussian;
            else if (value == "prepared") c.initial = InitialKind::prepared_steady_state;
            else throw ConfigError(key + ": expected gaussian or prepared, got '" + value + "'");
        } else if (key == "init.sigma") c.sigma = parse_double(key, value);
        else if (key == "prep.max_cycles") c.prep_max_cycles = static_cast<int>(parse_integer(key, value));
        else if (key == "prep.tolerance") c.prep_tolerance = parse_double(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    // A sharp projector has no edge width unless one is asked for (which validate rejects).
    if (c.proj.kind == ProjectorKind::sharp && !a_given) c.proj.a = 0.0;
    try {
        c.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return c;
}

std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& c) {
    return {{"qbm.m", format_double(c.qbm.m)},
            {"qbm.D", format_double(c.qbm.D)},
            {"qbm.hbar", format_double(c.qbm.hbar)},
            {"proj.kind", c.proj.kind == ProjectorKind::sharp ? "sharp" : "smeared"},
            {"proj.L", format_double(c.proj.L)},
            {"proj.a", format_double(c.proj.a)},
            {"lattice.n", std::to_string(c.n)},
            {"lattice.eta", format_double(c.eta)},
            {"run.eps", format_double(c.eps)},
            {"run.total_time", format_double(c.total_time)},
            {"run.dt", format_double(c.dt)},
            {"run.env_switch_on_time", format_double(c.env_switch_on_time)},
            {"run.seed", std::to_string(c.seed)},
            {"run.stop_survival", format_double(c.stop_survival)},
            {"run.record_substeps", c.record_substeps ? "true" : "false"},
            {"init.kind", c.initial == InitialKind::gaussian ? "gaussian" : "prepared"},
            {"init.sigma", format_double(c.sigma)},
            {"prep.max_cycles", std::to_string(c.prep_max_cycles)},
            {"prep.tolerance", format_double(c.prep_tolerance)}};
}

}  // namespace qzeno

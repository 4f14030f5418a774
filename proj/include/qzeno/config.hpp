#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qzeno/runner.hpp"

namespace qzeno {

// Flat key=value text. '#' starts a comment, blank lines are ignored, later
// keys override earlier ones.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::filesystem::path& path);
// "key=value" from the command line.
std::pair<std::string, std::string> split_assignment(const std::string& arg);

// Applies dotted keys (qbm.D, proj.L, run.eps, ...). Keys under "recipe." are
// left for the recipe; any other unknown key, or a value that does not parse,
// is a ConfigError naming the key. The result is validated.
ExperimentConfig apply_overrides(ExperimentConfig base, const KeyValues& kv);

// Every config field as key=value, in a fixed order, round-trippable through apply_overrides.
std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& config);

std::vector<std::string> config_keys();

double parse_double(const std::string& key, const std::string& value);
long parse_integer(const std::string& key, const std::string& value);
std::vector<double> parse_list(const std::string& key, const std::string& value);
std::string format_double(double v);

}  // namespace qzeno

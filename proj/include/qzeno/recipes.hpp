#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qzeno/config.hpp"
#include "qzeno/io.hpp"

namespace qzeno {

struct RecipeInfo {
    std::string name;
    std::string description;
    KeyValues defaults;  // applied before user overrides; recipe.* entries are the recipe's own parameters
};

const std::vector<RecipeInfo>& recipes();
const RecipeInfo& find_recipe(const std::string& name);  // UsageError when unknown

struct RecipeOutput {
    std::filesystem::path dir;
    RunManifest manifest;
};

// Runs a named recipe into out_dir (created if needed). Overrides use the
// config keys plus the recipe's recipe.* parameters; anything else is a
// ConfigError naming the key. Every CSV header carries the full config echo and
// the recipe parameters. manifest.json is written last.
RecipeOutput run_recipe(const std::string& name, const KeyValues& overrides, const std::filesystem::path& out_dir);

// Coefficient of variation of the diagonal density over the central fraction of
// the window [-L/2, L/2].
double position_cv(const std::vector<double>& x, const std::vector<double>& density, double L,
                   double fraction = 0.8);

// Runs f(0..n-1) on up to hardware_concurrency threads. Exceptions propagate
// (the first one by index).
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace qzeno

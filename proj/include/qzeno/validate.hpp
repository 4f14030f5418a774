#pragma once

#include <string>
#include <vector>

#include "qzeno/runner.hpp"

namespace qzeno {

struct CheckResult {
    std::string name;
    double value = 0;      // measured deviation
    double tolerance = 0;  // pass when value <= tolerance
    bool pass = false;
};

// Fast invariants on the lattice of config (seconds): trace and hermiticity,
// kernel against stepper, momentum diffusion, the <p^2> split, survival
// monotonicity, Wigner round trip, continuity, toy-model closed forms.
// A D of zero is replaced by 100 where the check needs an environment.
std::vector<CheckResult> run_invariant_suite(const ExperimentConfig& config);

}  // namespace qzeno

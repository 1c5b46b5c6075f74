#pragma once

// Configuration text parsing and the command-line entry point
// (run / converge / validate / info).

#include <iosfwd>
#include <string>
#include <vector>

#include "smagfem/config.hpp"

namespace smagfem {

// Flat `key = value` lines with `#` comments. Unknown keys are rejected;
// errors name the key and line number. Defaults come from the selected case.
SimConfig parse_config(const std::string& text);
std::string serialize_config(const SimConfig& config);

struct ConvergenceResult {
    std::vector<double> hs;
    std::vector<double> l2_errors;
    std::vector<double> h1_errors;
    double l2_slope = 0.0;
};

// Mesh-sequence study for the manufactured cases: `levels` meshes starting
// at resolution 8, doubling each level. For the evolving case the viscosity
// is capped at U*h and dt is scaled with h.
ConvergenceResult run_convergence(const SimConfig& base, int levels,
                                  std::ostream* log = nullptr);

// Exit codes: 0 success, 1 instability/validation failure, 2 usage error.
int cli_main(int argc, const char* const* argv);

}  // namespace smagfem

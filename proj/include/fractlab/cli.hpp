#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fractlab {

inline constexpr const char* kToolVersion = "fractlab 0.1.0";

// Runs one subcommand (gen, energy, gowers, edges, fup, expand, fit, report).
// Returns 0 on success, 2 on validation errors, 3 on numeric non-convergence.
// All file outputs are written atomically and are byte-deterministic for a
// fixed config and seed.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fractlab

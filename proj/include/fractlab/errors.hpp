#pragma once

#include <stdexcept>
#include <string>

namespace fractlab {

// Bad parameters, malformed inputs, violated preconditions.  CLI exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Work or memory beyond the configured budget (transform size, matrix side,
// base^levels overflow).  CLI exit code 2.
struct SizeError : std::runtime_error {
  explicit SizeError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver failed to converge; carries the last iterate so callers
// can report how far it got.  CLI exit code 3.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double last, int iters)
      : std::runtime_error(what), last_estimate(last), iterations(iters) {}
  double last_estimate;
  int iterations;
};

}  // namespace fractlab

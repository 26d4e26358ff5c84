#pragma once

#include <cstdint>

#include "fractlab/grid.hpp"

namespace fractlab {

// Sampled two-sided regularity constants: c_upper bounds mu(B(x,r))/r^delta
// over a covering grid of centers, c_lower over support-centered balls.
// Valid only for r in [scale_lo, scale_hi]; a sampled lower bound on the
// true constant.
struct RegularityCertificate {
  double delta = 0.0;
  double scale_lo = 0.0;
  double scale_hi = 0.0;
  double c_upper = 0.0;
  double c_lower = 0.0;
  double constant_C = 0.0;
  std::int64_t sample_count = 0;
};

// Radii sweep the absolute geometric ladder 10^{-k/12} restricted to
// [scale_lo, scale_hi] (12 steps per decade), so shrinking the window only
// removes sample points.  Upper centers on a grid of spacing r/2 covering
// the bounding box plus all support centers; lower centers on support cells
// only.  Each pool is capped at `samples` points by a seeded subsample.
RegularityCertificate check_regularity(const GridMeasure& mu, double delta, double scale_lo,
                                       double scale_hi, std::int64_t samples = 10000);

// mu(B(x,r)) by summing cells whose centers lie in the closed ball.
double ball_mass(const GridMeasure& mu, const std::array<double, 3>& x, double r);

}  // namespace fractlab

#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "fractlab/energy.hpp"
#include "fractlab/grid.hpp"

namespace fractlab {

// Discrete Gowers U^2 toolkit.  All quantities carry the Haar weight
// step^dim per lattice point, so they are Riemann discretizations of the
// continuum objects; the algebraic inequalities (Gowers-Cauchy-Schwarz,
// Young, splitting, tensor identity) hold exactly on the weighted lattice.

// ||f||_{U^2}^4 = step^{3 dim} * sum_c |(f (*) f)(c)|^2
double u2_fourth(const GridFunction& f, std::int64_t fft_budget = kDefaultFftBudget);
double u2_norm(const GridFunction& f, std::int64_t fft_budget = kDefaultFftBudget);

// <f1,f2,f3,f4> = sum_{x,h,k} f1(x) conj(f2)(x+h) conj(f3)(x+k) f4(x+h+k)
// * step^{3 dim}.  Uses the direct triple sum for supports <= 64 points and
// the convolution identity otherwise.
std::complex<double> gowers_inner(const GridFunction& f1, const GridFunction& f2,
                                  const GridFunction& f3, const GridFunction& f4,
                                  std::int64_t fft_budget = kDefaultFftBudget);

// ||mu * 1_{B(0,r)}||_{U^2}: the smoothing produces the ball-mass field
// g(a) = mu(B(center_a, r)) on the dilated lattice.
double u2_of_smoothed(const GridMeasure& mu, const Rational& r,
                      std::int64_t fft_budget = kDefaultFftBudget);

// For F on a 2-factor lattice V x V' (axis 0 = V): returns
// (||F||_{U^2(VxV')}, || v' -> ||F(.,v')||_{U^2(V)} ||_{U^2(V')}).
std::pair<double, double> splitting_check(const GridFunction& F,
                                          std::int64_t fft_budget = kDefaultFftBudget);

// ||f||_{L^p} with Haar weight, for the Young-bound checks.
double lp_norm(const GridFunction& f, double p);

// Seeded randomized suite for the four toolkit facts: Gowers-Cauchy-Schwarz,
// the Young bound ||f||_{U^2} <= ||f||_{4/3}, the tensor identity, and the
// splitting inequality.  Each trial draws fresh nonnegative functions.
struct ToolkitCheckResult {
  std::string family;
  int trials = 0;
  int failures = 0;
  double max_violation = 0.0;  // worst relative excess of lhs over rhs
};

std::vector<ToolkitCheckResult> run_gowers_checks(int trials, std::uint64_t seed,
                                                  std::int64_t fft_budget = kDefaultFftBudget);

}  // namespace fractlab

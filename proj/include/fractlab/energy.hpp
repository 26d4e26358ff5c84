#pragma once

#include <cstdint>
#include <vector>

#include "fractlab/dense.hpp"
#include "fractlab/grid.hpp"

namespace fractlab {

inline constexpr std::int64_t kDefaultFftBudget = std::int64_t{1} << 27;

enum class EnergyMethod { brute, fast };

// (scale, energy) samples with a power-law fit over the interior scales.
// Invariants: entries sorted by r ascending, energy nondecreasing in r,
// beta = fitted_slope - delta.
struct EnergyCurve {
  struct Entry {
    Rational r;
    double energy;
  };
  std::vector<Entry> entries;
  double delta = 0.0;
  double fitted_slope = 0.0;
  double beta = 0.0;
  double residual = 0.0;
  EnergyMethod method = EnergyMethod::fast;
};

// Quadruple sum over cell centers with |x1+x2-x3-x4| <= r (closed Euclidean
// ball), computed by direct pair enumeration.  Oracle scale only: refuses
// supports larger than 400 cells.
double energy_bruteforce(const GridMeasure& mu, const Rational& r);

// Same sum via the sum distribution s = mu (*) mu (fast convolution on the
// doubled lattice) followed by a windowed self-correlation of s.  Agrees with
// energy_bruteforce up to floating-point rounding.
double energy_fast(const GridMeasure& mu, const Rational& r,
                   std::int64_t fft_budget = kDefaultFftBudget);

// Energy with the ball window replaced by an arbitrary symmetric set H.
double energy_wrt_set(const GridMeasure& mu, const WindowSet& H,
                      std::int64_t fft_budget = kDefaultFftBudget);

// total^3 * sup_x mu(B(x,r)), the right-hand side of the trivial energy
// bound.  The sup is exact in one dimension (sliding window); in higher
// dimensions the ball is relaxed to the circumscribed axis cube, which only
// enlarges the bound.
double trivial_energy_bound(const GridMeasure& mu, const Rational& r);

// Evaluates the energy on a ladder of scales and fits log E against log r
// over the interior scales (the largest and smallest scale are dropped).
// Every point is checked against the trivial bound and monotonicity.
EnergyCurve energy_curve(const GridMeasure& mu, std::vector<Rational> scales,
                         double delta, EnergyMethod method,
                         std::int64_t fft_budget = kDefaultFftBudget);

// Internal: windowed self-correlation sum_{a,b: |(a-b)*step| <= r} s(a)s(b).
double windowed_self_correlation(const DenseD& s, const Rational& step, const Rational& r);

}  // namespace fractlab

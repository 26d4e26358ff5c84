#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fractlab/grid.hpp"

namespace fractlab {

// Active/inactive K-adic interval hierarchy for a one-dimensional measure.
// Level n holds the intervals [j K^-n, (j+1) K^-n); an interval is active
// iff it contains at least one support cell center.  Intervals outside the
// bounding box are simply absent from the active sets (treated inactive).
class KAdicTree {
public:
  KAdicTree(const GridMeasure& mu, int K, int depth);

  int base() const { return K_; }
  int depth() const { return depth_; }
  bool active(int level, std::int64_t j) const;
  const std::vector<std::int64_t>& active_at(int level) const { return active_[level]; }
  double interval_mass(int level, std::int64_t j) const;
  // K >= 1000, a perfect square, and a multiple of 100: the hypotheses the
  // paper's constants assume.  Small K is accepted for exhaustive tests.
  bool paper_regime() const;

private:
  int K_;
  int depth_;
  std::vector<std::vector<std::int64_t>> active_;  // per level, sorted
  std::vector<std::vector<double>> mass_;
};

struct EdgeReport {
  int n = 0;                     // interval length K^{-2n}
  double interval_length = 0.0;
  std::int64_t active_count = 0;
  std::int64_t left_edge_count = 0;
  std::int64_t near_edge_count = 0;
  double exceptional_mass = 0.0;  // mu^2(E_n)
};

KAdicTree build_tree(const GridMeasure& mu, int K, int depth);

// Maximal runs of >= ceil(sqrt(K)) consecutive active equal-length intervals,
// reported as (level, start index, run length).  Empty output certifies the
// porosity property for this discretized input.
std::vector<std::tuple<int, std::int64_t, std::int64_t>> porosity_violations(
    const KAdicTree& tree);

// Active intervals of length K^{-2n} whose left siblings and whose parent's
// left shift are all inactive.  Requires n >= 1 and 2n <= depth.
std::vector<std::int64_t> left_edges(const KAdicTree& tree, int n);

// For each left edge I, the run {I, I+1, ...} extending right while the
// previous interval is active; the terminating inactive interval is included
// (it is the rightmost near-edge).  The run is capped at
// max(ceil(K/100), ceil(sqrt(K))+1).
std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> near_edges(const KAdicTree& tree,
                                                                           int n);

std::int64_t near_edge_cap(int K);

// E_n: level-2n index pairs not covered by any product of equal-length
// near-edges at scales n' <= n, with mu^2(E_n) summed over active pairs.
// Returns reports for n = 0..N.
std::vector<EdgeReport> exceptional_sets(const KAdicTree& tree, const GridMeasure& mu, int N);

// mu^2 of the strip {(x,y) in [-1,1]^2 : |x+y-z| <= r}.
double strip_mass(const GridMeasure& mu, double z, double r);

// r^{-1} * sum_z mu^2(S_z)^2 * dz over the z-grid of spacing r covering
// [-3,3]: the Riemann form of the strip bound on the energy.
double energy_bound_via_strips(const GridMeasure& mu, double r);

}  // namespace fractlab

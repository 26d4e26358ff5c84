#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "fractlab/rational.hpp"

namespace fractlab {

// Lattice index.  Components beyond the ambient dimension are zero.
using Idx = std::array<std::int64_t, 3>;

inline bool idx_less(const Idx& a, const Idx& b) { return a < b; }

struct BoundingBox {
  std::array<double, 3> lo{-1.0, -1.0, -1.0};
  std::array<double, 3> hi{1.0, 1.0, 1.0};
};

// Recipe for a base-K digit-set Cantor construction on [0,1].
// Derived dimension: delta = log|digits| / log(base).
// With `seed` set, each node draws its own uniformly random |digits|-subset
// of {0..base-1}; the deterministic construction uses `digits` at every node.
struct CantorSpec {
  int base = 3;
  std::vector<int> digits;
  int levels = 1;
  std::optional<std::uint64_t> seed;

  double delta() const;
  void validate() const;
};

// Nonnegative mass assignment on a regular lattice: cell i sits at
// origin + i*step (per axis).  Immutable after construction; safe to share
// across threads.
class GridMeasure {
public:
  GridMeasure(int dim, Rational step, std::array<Rational, 3> origin,
              std::vector<std::pair<Idx, double>> cells,
              BoundingBox box = BoundingBox{});

  int dim() const { return dim_; }
  const Rational& step() const { return step_; }
  const std::array<Rational, 3>& origin() const { return origin_; }
  const std::vector<std::pair<Idx, double>>& cells() const { return cells_; }
  double total_mass() const { return total_mass_; }
  const BoundingBox& box() const { return box_; }

  std::size_t support_size() const { return cells_.size(); }
  std::array<double, 3> center(const Idx& i) const {
    std::array<double, 3> x{0, 0, 0};
    for (int a = 0; a < dim_; ++a)
      x[a] = origin_[a].value() + static_cast<double>(i[a]) * step_.value();
    return x;
  }
  // Exact center coordinate along one axis.
  Rational center_rat(int axis, std::int64_t i) const {
    return origin_[axis] + Rational(i) * step_;
  }

  const std::optional<CantorSpec>& provenance() const { return provenance_; }
  void set_provenance(CantorSpec spec) { provenance_ = std::move(spec); }

private:
  int dim_;
  Rational step_;
  std::array<Rational, 3> origin_;
  std::vector<std::pair<Idx, double>> cells_;  // sorted lexicographically
  double total_mass_;
  BoundingBox box_;
  std::optional<CantorSpec> provenance_;
};

// Complex-valued function on a lattice (Haar weight step^dim per point).
class GridFunction {
public:
  GridFunction(int dim, Rational step, std::array<Rational, 3> origin,
               std::vector<std::pair<Idx, std::complex<double>>> values);

  int dim() const { return dim_; }
  const Rational& step() const { return step_; }
  const std::array<Rational, 3>& origin() const { return origin_; }
  const std::vector<std::pair<Idx, std::complex<double>>>& values() const { return values_; }

  bool same_lattice(const GridFunction& o) const {
    return dim_ == o.dim_ && step_ == o.step_ && origin_[0] == o.origin_[0] &&
           origin_[1] == o.origin_[1] && origin_[2] == o.origin_[2];
  }

private:
  int dim_;
  Rational step_;
  std::array<Rational, 3> origin_;
  std::vector<std::pair<Idx, std::complex<double>>> values_;  // sorted
};

// Finite symmetric set of lattice offsets containing 0 (a rasterized ball
// B(0,r) or a general symmetric window H).
class WindowSet {
public:
  WindowSet(int dim, Rational step, std::vector<Idx> indices);

  int dim() const { return dim_; }
  const Rational& step() const { return step_; }
  const std::vector<Idx>& indices() const { return indices_; }

private:
  int dim_;
  Rational step_;
  std::vector<Idx> indices_;  // sorted
};

// |i|*step <= r, ties decided exactly in integer arithmetic.
bool index_in_ball(const Idx& i, int dim, const Rational& step, const Rational& r);

// All offsets with |o|*step <= r.
WindowSet rasterize_ball(int dim, const Rational& step, const Rational& r);

// ---- measure constructors ----

// Equal mass on the surviving depth-`levels` digit strings of `spec`,
// step = base^-levels, cells indexed by the digit-string value, centers at
// (a + 1/2) * step.  Total mass exactly 1.
GridMeasure cantor_measure(const CantorSpec& spec);

// Uniform mass on lattice centers of B^{delta_int}(0,1) x {0}^{dim-delta_int},
// normalized to total mass 1.  The integer-dimension reference measure.
GridMeasure disk_measure(int dim, int delta_int, const Rational& step);

// Product lattice measure: mass(i,j) = mass_a(i) * mass_b(j).
GridMeasure product_measure(const GridMeasure& a, const GridMeasure& b);

// All lattice cells within Euclidean distance r of some support cell center
// (the rasterized r-neighborhood X_r).
std::vector<Idx> neighborhood_support(const GridMeasure& mu, const Rational& r);

}  // namespace fractlab

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fractlab/fup.hpp"
#include "fractlab/grid.hpp"

namespace fractlab {

enum class MapKind { sum, difference, product, shifted_product, quadratic, affine };

// A C^2 map F: R x R -> R from the named family, with a declared domain box
// on which the x- and y-derivatives stay invertible (the product maps are
// restricted away from 0; quadratic degenerates only on the line y = 0).
struct MapSpec {
  MapKind kind = MapKind::sum;
  // affine: F(x,y) = a*x + b*y + c
  double affine_a = 1.0;
  double affine_b = 1.0;
  double affine_c = 0.0;
  double domain_lo = -2.5;
  double domain_hi = 2.5;

  static MapSpec named(MapKind kind);
  static MapSpec named(const std::string& name);
  std::string name() const;

  double apply(double x, double y) const;
  double dx(double x, double y) const;
  double dy(double x, double y) const;
  void validate() const;
};

// 1D mask: cells at step `step`, centers step*index.
struct Mask1D {
  Rational step;
  std::vector<std::int64_t> cells;  // sorted
};

// Rasterized r-neighborhood of the mask family at lattice step r/2, with an
// optional affine pre-image a*X + b (used to shift Cantor sets into [1/2,1]
// for the product maps).
Mask1D neighborhood_mask(const MaskSpec& spec, const Rational& r, double pre_scale = 1.0,
                         double pre_shift = 0.0);

// Lebesgue measure of the rasterized image {F(x,y)} over all cell-center
// pairs, on an output lattice of step r/2 dilated by one cell.
double image_measure(const MapSpec& F, const Mask1D& x_mask, const Mask1D& y_mask,
                     const Rational& r);

// Lebesgue measure of the rasterized X_r itself.
double baseline_measure(const Mask1D& x_mask);

struct ExpansionCurve {
  struct Entry {
    Rational r;
    double image = 0.0;
    double baseline_x = 0.0;
    double baseline_y = 0.0;
  };
  std::vector<Entry> entries;  // sorted by r descending
  std::string map;
  double delta = 0.0;
  double fitted_exponent = 0.0;
  double gain = 0.0;  // (d - delta) - fitted_exponent
  bool degenerate = false;
};

ExpansionCurve expansion_curve(const MapSpec& F, const MaskSpec& x_spec, const MaskSpec& y_spec,
                               const std::vector<Rational>& radii, double pre_scale = 1.0,
                               double pre_shift = 0.0);

}  // namespace fractlab

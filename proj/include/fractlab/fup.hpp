#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fractlab/grid.hpp"

namespace fractlab {

// Quadrature discretization of the semiclassical Fourier transform
// F_h f(xi) = (2 pi h)^{-d/2} int e^{-i x.xi/h} f(x) dx with both variables
// on the same step-lattice.  `points` are flattened lattice indices.
Eigen::MatrixXcd fourier_matrix_points(const std::vector<Idx>& rows, const std::vector<Idx>& cols,
                                       double h, const Rational& step, int dim);

// Full (unmasked) matrix on the lattice of the extent box.  Side caps:
// 2^14 in dim 1, 2^12 total in dim 2.
Eigen::MatrixXcd fourier_matrix(double h, const Rational& step, double extent_lo,
                                double extent_hi, int dim = 1);

// Lattice points of [lo,hi]^dim at spacing `step`.
std::vector<Idx> lattice_points(const Rational& step, double lo, double hi, int dim);

// ||1_X F_h 1_Y||_{L^2->L^2}: largest singular value of the restricted
// matrix.  Direct Hermitian decomposition when the smaller side is <= 1024,
// power iteration on the normal operator otherwise (relative tolerance 1e-9
// or better, at most 10^4 iterations; non-convergence raises
// ConvergenceError carrying the last iterate).
double fup_norm(const std::vector<Idx>& x_mask, const std::vector<Idx>& y_mask, double h,
                const Rational& step, int dim = 1);

// Mask family for the uncertainty experiments: a Cantor recipe (mask = the
// h-neighborhood of the depth-n set when h = base^-n) or a full interval.
struct MaskSpec {
  bool full_interval = false;
  double interval_lo = 0.0;
  double interval_hi = 1.0;
  CantorSpec cantor;

  double delta() const { return full_interval ? 1.0 : cantor.delta(); }
};

std::vector<Idx> build_mask(const MaskSpec& spec, const Rational& h, const Rational& step,
                            double extent_lo, double extent_hi);

struct FupPoint {
  Rational h;
  double norm = 0.0;
  std::int64_t matrix_side = 0;
  int oversample = 0;
};

// (h, operator norm) samples with the fitted uncertainty exponent against
// the trivial exponent.  Entries sorted by h descending.
struct FupCurve {
  std::vector<FupPoint> entries;
  double delta_x = 0.0;
  double delta_y = 0.0;
  double trivial_exponent = 0.0;
  double fitted_exponent = 0.0;
  double gain = 0.0;
  bool degenerate = false;  // constant norms, gain undefined
};

FupCurve fup_curve(const MaskSpec& x_spec, const MaskSpec& y_spec,
                   const std::vector<Rational>& h_list, int oversample = 4, int threads = 1);

// h^{d/2-delta} * E(mu_Y, h)^{1/4}: the energy-side majorant of the
// L^2 -> L^4 pipeline.
double fey_bound(const GridMeasure& mu_y, const Rational& h, double delta);

// max(d/2 - delta_y, (d - delta_x - delta_y)/2, 0)
double trivial_fup_exponent(int dim, double delta_x, double delta_y);

}  // namespace fractlab

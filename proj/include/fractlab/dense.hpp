#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "fractlab/grid.hpp"

namespace fractlab {

// Row-major dense block over an index box [lo, lo+n), axis 0 slowest.
// Unused axes have extent 1.
template <class T>
struct DenseBlock {
  int dim = 1;
  Idx lo{0, 0, 0};
  std::array<std::int64_t, 3> n{1, 1, 1};
  std::vector<T> v;

  std::int64_t size() const { return n[0] * n[1] * n[2]; }
  std::int64_t offset(const Idx& i) const {
    return ((i[0] - lo[0]) * n[1] + (i[1] - lo[1])) * n[2] + (i[2] - lo[2]);
  }
  bool contains(const Idx& i) const {
    for (int a = 0; a < 3; ++a)
      if (i[a] < lo[a] || i[a] >= lo[a] + n[a]) return false;
    return true;
  }
  T& at(const Idx& i) { return v[offset(i)]; }
  const T& at(const Idx& i) const { return v[offset(i)]; }

  static DenseBlock box(int dim, Idx lo, std::array<std::int64_t, 3> n) {
    DenseBlock b;
    b.dim = dim;
    b.lo = lo;
    b.n = n;
    b.v.assign(static_cast<std::size_t>(n[0] * n[1] * n[2]), T{});
    return b;
  }
};

using DenseD = DenseBlock<double>;
using DenseC = DenseBlock<std::complex<double>>;

DenseD densify(const GridMeasure& mu);
DenseC densify(const GridFunction& f);

// Linear self-convolution s(c) = sum_{a+b=c} d(a) d(b); result box doubles.
// Strategy (direct pairwise vs zero-padded FFT) is chosen by an operation
// count estimate; both give the same sum up to rounding.  `fft_budget` caps
// the padded transform size in points.
DenseD self_convolve(const DenseD& d, std::size_t nnz, std::int64_t fft_budget);

// Plain complex linear convolution (used by the Gowers toolkit).
DenseC convolve(const DenseC& f, const DenseC& g, std::int64_t fft_budget);

// T(a) = sum over b in the closed Euclidean ball |(a-b)*step| <= r of d(b),
// for a over d's box dilated by the ball radius.  Widths are resolved with
// exact integer arithmetic.
DenseD ball_sum_field(const DenseD& d, const Rational& step, const Rational& r);

}  // namespace fractlab

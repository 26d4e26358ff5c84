#include "fractlab/fft.hpp"

#include <cmath>
#include <numbers>

#include "fractlab/errors.hpp"

namespace fractlab::fft {

namespace {

void bit_reverse(std::complex<double>* a, std::size_t n) {
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
}

}  // namespace

void transform(std::complex<double>* a, std::size_t n, bool inverse) {
  if (n == 0 || (n & (n - 1)) != 0)
    throw ValidationError("fft: length must be a power of two");
  bit_reverse(a, n);
  // one shared twiddle table at the finest resolution
  static thread_local std::vector<std::complex<double>> table;
  static thread_local std::size_t table_n = 0;
  if (table_n != n) {
    table.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      table[k] = {std::cos(ang), std::sin(ang)};
    }
    table_n = n;
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> w = table[k * stride];
        if (inverse) w = std::conj(w);
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) a[i] *= inv;
  }
}

void transform_nd(std::vector<std::complex<double>>& a,
                  const std::vector<std::size_t>& extents, bool inverse) {
  std::size_t total = 1;
  for (std::size_t e : extents) total *= e;
  if (a.size() != total) throw ValidationError("fft: extent/product mismatch");
  if (extents.size() == 1) {
    transform(a.data(), extents[0], inverse);
    return;
  }
  // axis-by-axis: gather strided lines into a contiguous buffer
  std::size_t ndim = extents.size();
  std::vector<std::size_t> strides(ndim, 1);
  for (std::size_t d = ndim; d-- > 1;) strides[d - 1] = strides[d] * extents[d];
  std::vector<std::complex<double>> line;
  for (std::size_t axis = 0; axis < ndim; ++axis) {
    std::size_t len = extents[axis];
    std::size_t stride = strides[axis];
    std::size_t lines = total / len;
    line.resize(len);
    for (std::size_t l = 0; l < lines; ++l) {
      // decompose l into coordinates of the other axes
      std::size_t base = 0, rem = l;
      for (std::size_t d = 0; d < ndim; ++d) {
        if (d == axis) continue;
        std::size_t coord = rem % extents[d];
        rem /= extents[d];
        base += coord * strides[d];
      }
      for (std::size_t k = 0; k < len; ++k) line[k] = a[base + k * stride];
      transform(line.data(), len, inverse);
      for (std::size_t k = 0; k < len; ++k) a[base + k * stride] = line[k];
    }
  }
}

}  // namespace fractlab::fft

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace fractlab::fft {

// In-place iterative radix-2 transform, n a power of two.  The inverse
// includes the 1/n factor.  Deterministic: fixed twiddle tables, fixed
// butterfly order.
void transform(std::complex<double>* a, std::size_t n, bool inverse);

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Transform along every axis of a row-major dense block (axis 0 slowest).
// Each extent must be a power of two.
void transform_nd(std::vector<std::complex<double>>& a,
                  const std::vector<std::size_t>& extents, bool inverse);

}  // namespace fractlab::fft

#include "fractlab/dense.hpp"

#include <algorithm>
#include <cmath>

#include "fractlab/errors.hpp"
#include "fractlab/fft.hpp"

namespace fractlab {

namespace {

struct SparseEntries {
  std::vector<Idx> idx;
  std::vector<std::complex<double>> val;
};

template <class T>
std::pair<Idx, Idx> index_bounds(const std::vector<std::pair<Idx, T>>& cells) {
  Idx lo{0, 0, 0}, hi{0, 0, 0};
  bool first = true;
  for (const auto& [i, m] : cells) {
    if (first) { lo = hi = i; first = false; continue; }
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], i[a]);
      hi[a] = std::max(hi[a], i[a]);
    }
  }
  return {lo, hi};
}

// floor(r/step) in exact integer arithmetic
std::int64_t ball_radius_cells(const Rational& step, const Rational& r) {
  __int128 p = static_cast<__int128>(r.num()) * step.den();
  __int128 q = static_cast<__int128>(r.den()) * step.num();
  if (p < 0) return -1;
  return static_cast<std::int64_t>(floor_div128(p, q));
}

// max dx >= 0 with (dx^2 + m) * q^2 <= p^2, or -1 if none
std::int64_t exact_width(__int128 p, __int128 q, __int128 m) {
  __int128 p2 = p * p, q2 = q * q;
  if (m * q2 > p2) return -1;
  double est = std::sqrt(std::max(0.0, static_cast<double>(p2 - m * q2) / static_cast<double>(q2)));
  std::int64_t w = static_cast<std::int64_t>(est);
  while ((static_cast<__int128>(w + 1) * (w + 1) + m) * q2 <= p2) ++w;
  while (w >= 0 && (static_cast<__int128>(w) * w + m) * q2 > p2) --w;
  return w;
}

}  // namespace

DenseD densify(const GridMeasure& mu) {
  auto [lo, hi] = index_bounds(mu.cells());
  std::array<std::int64_t, 3> n{1, 1, 1};
  for (int a = 0; a < mu.dim(); ++a) n[a] = hi[a] - lo[a] + 1;
  auto d = DenseD::box(mu.dim(), lo, n);
  for (const auto& [i, m] : mu.cells()) d.at(i) += m;
  return d;
}

DenseC densify(const GridFunction& f) {
  auto [lo, hi] = index_bounds(f.values());
  std::array<std::int64_t, 3> n{1, 1, 1};
  for (int a = 0; a < f.dim(); ++a) n[a] = hi[a] - lo[a] + 1;
  auto d = DenseC::box(f.dim(), lo, n);
  for (const auto& [i, z] : f.values()) d.at(i) += z;
  return d;
}

DenseD self_convolve(const DenseD& d, std::size_t nnz, std::int64_t fft_budget) {
  std::array<std::int64_t, 3> rn{1, 1, 1};
  Idx rlo{0, 0, 0};
  for (int a = 0; a < 3; ++a) {
    rn[a] = 2 * d.n[a] - 1;
    rlo[a] = 2 * d.lo[a];
  }

  std::vector<std::size_t> pad;
  std::size_t padded = 1;
  for (int a = 0; a < d.dim; ++a) {
    pad.push_back(fft::next_pow2(static_cast<std::size_t>(rn[a])));
    padded *= pad.back();
  }
  double fft_cost = 3.0 * static_cast<double>(padded) * std::log2(static_cast<double>(padded) + 2.0);
  double direct_cost = static_cast<double>(nnz) * static_cast<double>(nnz);
  bool use_direct = direct_cost <= fft_cost;
  if (padded > static_cast<std::size_t>(fft_budget)) {
    if (direct_cost <= static_cast<double>(fft_budget))
      use_direct = true;
    else
      throw SizeError("self_convolve: grid too large for the transform size budget");
  }

  auto out = DenseD::box(d.dim, rlo, rn);
  if (use_direct) {
    std::vector<std::pair<Idx, double>> ent;
    ent.reserve(nnz);
    Idx i{0, 0, 0};
    for (i[0] = d.lo[0]; i[0] < d.lo[0] + d.n[0]; ++i[0])
      for (i[1] = d.lo[1]; i[1] < d.lo[1] + d.n[1]; ++i[1])
        for (i[2] = d.lo[2]; i[2] < d.lo[2] + d.n[2]; ++i[2])
          if (double m = d.at(i); m != 0.0) ent.push_back({i, m});
    for (const auto& [ia, ma] : ent)
      for (const auto& [ib, mb] : ent)
        out.at({ia[0] + ib[0], ia[1] + ib[1], ia[2] + ib[2]}) += ma * mb;
  } else {
    std::vector<std::complex<double>> a(padded, {0.0, 0.0});
    // embed d at offset 0 of the padded block
    std::vector<std::size_t> stride(pad.size(), 1);
    for (std::size_t k = pad.size(); k-- > 1;) stride[k - 1] = stride[k] * pad[k];
    Idx i{0, 0, 0};
    for (i[0] = 0; i[0] < d.n[0]; ++i[0])
      for (i[1] = 0; i[1] < d.n[1]; ++i[1])
        for (i[2] = 0; i[2] < d.n[2]; ++i[2]) {
          std::size_t off = 0;
          for (int k = 0; k < d.dim; ++k) off += static_cast<std::size_t>(i[k]) * stride[k];
          a[off] = d.v[d.offset({i[0] + d.lo[0], i[1] + d.lo[1], i[2] + d.lo[2]})];
        }
    fft::transform_nd(a, pad, false);
    for (auto& z : a) z *= z;
    fft::transform_nd(a, pad, true);
    for (i[0] = 0; i[0] < rn[0]; ++i[0])
      for (i[1] = 0; i[1] < rn[1]; ++i[1])
        for (i[2] = 0; i[2] < rn[2]; ++i[2]) {
          std::size_t off = 0;
          Idx loc{i[0], i[1], i[2]};
          for (int k = 0; k < d.dim; ++k) off += static_cast<std::size_t>(loc[k]) * stride[k];
          // rounding can leave tiny negatives; the sum distribution is nonnegative
          out.v[out.offset({i[0] + rlo[0], i[1] + rlo[1], i[2] + rlo[2]})] =
              std::max(0.0, a[off].real());
        }
  }
  return out;
}

DenseC convolve(const DenseC& f, const DenseC& g, std::int64_t fft_budget) {
  if (f.dim != g.dim) throw ValidationError("convolve: dim mismatch");
  std::array<std::int64_t, 3> rn{1, 1, 1};
  Idx rlo{0, 0, 0};
  for (int a = 0; a < 3; ++a) {
    rn[a] = f.n[a] + g.n[a] - 1;
    rlo[a] = f.lo[a] + g.lo[a];
  }
  std::vector<std::size_t> pad;
  std::size_t padded = 1;
  for (int a = 0; a < f.dim; ++a) {
    pad.push_back(fft::next_pow2(static_cast<std::size_t>(rn[a])));
    padded *= pad.back();
  }
  double fft_cost = 4.0 * static_cast<double>(padded) * std::log2(static_cast<double>(padded) + 2.0);
  double direct_cost = static_cast<double>(f.size()) * static_cast<double>(g.size());
  bool use_direct = direct_cost <= fft_cost;
  if (padded > static_cast<std::size_t>(fft_budget)) {
    if (direct_cost <= static_cast<double>(fft_budget))
      use_direct = true;
    else
      throw SizeError("convolve: grid too large for the transform size budget");
  }

  auto out = DenseC::box(f.dim, rlo, rn);
  if (use_direct) {
    Idx i{0, 0, 0}, j{0, 0, 0};
    for (i[0] = f.lo[0]; i[0] < f.lo[0] + f.n[0]; ++i[0])
      for (i[1] = f.lo[1]; i[1] < f.lo[1] + f.n[1]; ++i[1])
        for (i[2] = f.lo[2]; i[2] < f.lo[2] + f.n[2]; ++i[2]) {
          std::complex<double> fz = f.at(i);
          if (fz == std::complex<double>{}) continue;
          for (j[0] = g.lo[0]; j[0] < g.lo[0] + g.n[0]; ++j[0])
            for (j[1] = g.lo[1]; j[1] < g.lo[1] + g.n[1]; ++j[1])
              for (j[2] = g.lo[2]; j[2] < g.lo[2] + g.n[2]; ++j[2]) {
                std::complex<double> gz = g.at(j);
                if (gz == std::complex<double>{}) continue;
                out.at({i[0] + j[0], i[1] + j[1], i[2] + j[2]}) += fz * gz;
              }
        }
    return out;
  }

  std::vector<std::size_t> stride(pad.size(), 1);
  for (std::size_t k = pad.size(); k-- > 1;) stride[k - 1] = stride[k] * pad[k];
  auto embed = [&](const DenseC& src) {
    std::vector<std::complex<double>> a(padded, {0.0, 0.0});
    Idx i{0, 0, 0};
    for (i[0] = 0; i[0] < src.n[0]; ++i[0])
      for (i[1] = 0; i[1] < src.n[1]; ++i[1])
        for (i[2] = 0; i[2] < src.n[2]; ++i[2]) {
          std::size_t off = 0;
          for (int k = 0; k < src.dim; ++k) off += static_cast<std::size_t>(i[k]) * stride[k];
          a[off] = src.v[src.offset({i[0] + src.lo[0], i[1] + src.lo[1], i[2] + src.lo[2]})];
        }
    return a;
  };
  auto A = embed(f);
  auto B = embed(g);
  fft::transform_nd(A, pad, false);
  fft::transform_nd(B, pad, false);
  for (std::size_t k = 0; k < padded; ++k) A[k] *= B[k];
  fft::transform_nd(A, pad, true);
  Idx i{0, 0, 0};
  for (i[0] = 0; i[0] < rn[0]; ++i[0])
    for (i[1] = 0; i[1] < rn[1]; ++i[1])
      for (i[2] = 0; i[2] < rn[2]; ++i[2]) {
        std::size_t off = 0;
        Idx loc{i[0], i[1], i[2]};
        for (int k = 0; k < f.dim; ++k) off += static_cast<std::size_t>(loc[k]) * stride[k];
        out.v[out.offset({i[0] + rlo[0], i[1] + rlo[1], i[2] + rlo[2]})] = A[off];
      }
  return out;
}

DenseD ball_sum_field(const DenseD& d, const Rational& step, const Rational& r) {
  std::int64_t R = ball_radius_cells(step, r);
  if (R < 0) throw ValidationError("ball_sum_field: negative radius");
  __int128 p = static_cast<__int128>(r.num()) * step.den();
  __int128 q = static_cast<__int128>(r.den()) * step.num();

  Idx tlo = d.lo;
  std::array<std::int64_t, 3> tn = d.n;
  for (int a = 0; a < d.dim; ++a) {
    tlo[a] -= R;
    tn[a] += 2 * R;
  }
  auto T = DenseD::box(d.dim, tlo, tn);

  if (d.dim == 1) {
    std::vector<double> P(static_cast<std::size_t>(d.n[0]) + 1, 0.0);
    for (std::int64_t k = 0; k < d.n[0]; ++k) P[k + 1] = P[k] + d.v[k];
    for (std::int64_t a = 0; a < tn[0]; ++a) {
      std::int64_t abs_a = tlo[0] + a;
      std::int64_t lo = std::max(abs_a - R, d.lo[0]);
      std::int64_t hi = std::min(abs_a + R, d.lo[0] + d.n[0] - 1);
      if (lo > hi) continue;
      T.v[a] = P[hi - d.lo[0] + 1] - P[lo - d.lo[0]];
    }
    return T;
  }

  if (d.dim == 2) {
    // per-row prefix sums of the source
    std::vector<double> P(static_cast<std::size_t>(d.n[0]) * (d.n[1] + 1), 0.0);
    for (std::int64_t y = 0; y < d.n[0]; ++y)
      for (std::int64_t x = 0; x < d.n[1]; ++x)
        P[y * (d.n[1] + 1) + x + 1] =
            P[y * (d.n[1] + 1) + x] + d.v[y * d.n[1] + x];
    std::vector<std::int64_t> width(static_cast<std::size_t>(R) + 1);
    for (std::int64_t dy = 0; dy <= R; ++dy)
      width[dy] = exact_width(p, q, static_cast<__int128>(dy) * dy);
    for (std::int64_t ay = 0; ay < tn[0]; ++ay) {
      std::int64_t abs_y = tlo[0] + ay;
      for (std::int64_t dy = -R; dy <= R; ++dy) {
        std::int64_t sy = abs_y + dy - d.lo[0];
        if (sy < 0 || sy >= d.n[0]) continue;
        std::int64_t w = width[dy < 0 ? -dy : dy];
        if (w < 0) continue;
        const double* row = &P[sy * (d.n[1] + 1)];
        double* trow = &T.v[ay * tn[1]];
        for (std::int64_t ax = 0; ax < tn[1]; ++ax) {
          std::int64_t abs_x = tlo[1] + ax;
          std::int64_t lo = std::max(abs_x - w, d.lo[1]);
          std::int64_t hi = std::min(abs_x + w, d.lo[1] + d.n[1] - 1);
          if (lo > hi) continue;
          trow[ax] += row[hi - d.lo[1] + 1] - row[lo - d.lo[1]];
        }
      }
    }
    return T;
  }

  // dim 3: prefix along the last axis, widths per (dy, dz)
  std::vector<double> P(static_cast<std::size_t>(d.n[0]) * d.n[1] * (d.n[2] + 1), 0.0);
  for (std::int64_t y = 0; y < d.n[0]; ++y)
    for (std::int64_t x = 0; x < d.n[1]; ++x) {
      std::size_t base = (y * d.n[1] + x) * (d.n[2] + 1);
      std::size_t sbase = (y * d.n[1] + x) * d.n[2];
      for (std::int64_t z = 0; z < d.n[2]; ++z) P[base + z + 1] = P[base + z] + d.v[sbase + z];
    }
  for (std::int64_t ay = 0; ay < tn[0]; ++ay)
    for (std::int64_t ax = 0; ax < tn[1]; ++ax)
      for (std::int64_t dy = -R; dy <= R; ++dy) {
        std::int64_t sy = tlo[0] + ay + dy - d.lo[0];
        if (sy < 0 || sy >= d.n[0]) continue;
        for (std::int64_t dz = -R; dz <= R; ++dz) {
          std::int64_t sx = tlo[1] + ax + dz - d.lo[1];
          if (sx < 0 || sx >= d.n[1]) continue;
          std::int64_t w = exact_width(
              p, q, static_cast<__int128>(dy) * dy + static_cast<__int128>(dz) * dz);
          if (w < 0) continue;
          const double* row = &P[(sy * d.n[1] + sx) * (d.n[2] + 1)];
          double* cell = &T.v[(ay * tn[1] + ax) * tn[2]];
          for (std::int64_t az = 0; az < tn[2]; ++az) {
            std::int64_t abs_z = tlo[2] + az;
            std::int64_t lo = std::max(abs_z - w, d.lo[2]);
            std::int64_t hi = std::min(abs_z + w, d.lo[2] + d.n[2] - 1);
            if (lo > hi) continue;
            cell[az] += row[hi - d.lo[2] + 1] - row[lo - d.lo[2]];
          }
        }
      }
  return T;
}

}  // namespace fractlab

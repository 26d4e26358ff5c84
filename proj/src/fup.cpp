#include "fractlab/fup.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "fractlab/energy.hpp"
#include "fractlab/errors.hpp"
#include "fractlab/fit.hpp"

namespace fractlab {

Eigen::MatrixXcd fourier_matrix_points(const std::vector<Idx>& rows, const std::vector<Idx>& cols,
                                       double h, const Rational& step, int dim) {
  if (!(h > 0)) throw ValidationError("fourier_matrix: h must be > 0");
  if (step.value() > h) throw ValidationError("fourier_matrix: step must be <= h");
  const double s = step.value();
  double scale = std::pow(2.0 * std::numbers::pi * h, -0.5 * dim);
  for (int a = 0; a < dim; ++a) scale *= s;
  if (static_cast<double>(rows.size()) * static_cast<double>(cols.size()) > 4.9e7)
    throw SizeError("fourier_matrix: restricted matrix exceeds the memory budget");
  Eigen::MatrixXcd M(rows.size(), cols.size());
  for (std::size_t rr = 0; rr < rows.size(); ++rr) {
    for (std::size_t cc = 0; cc < cols.size(); ++cc) {
      double dot = 0.0;
      for (int a = 0; a < dim; ++a)
        dot += (static_cast<double>(rows[rr][a]) * s) * (static_cast<double>(cols[cc][a]) * s);
      double ang = -dot / h;
      M(static_cast<Eigen::Index>(rr), static_cast<Eigen::Index>(cc)) =
          scale * std::complex<double>(std::cos(ang), std::sin(ang));
    }
  }
  return M;
}

std::vector<Idx> lattice_points(const Rational& step, double lo, double hi, int dim) {
  std::int64_t imin = static_cast<std::int64_t>(std::ceil(lo / step.value() - 1e-12));
  std::int64_t imax = static_cast<std::int64_t>(std::floor(hi / step.value() + 1e-12));
  std::vector<Idx> pts;
  if (imin > imax) return pts;
  if (dim == 1) {
    for (std::int64_t a = imin; a <= imax; ++a) pts.push_back({a, 0, 0});
  } else if (dim == 2) {
    for (std::int64_t a = imin; a <= imax; ++a)
      for (std::int64_t b = imin; b <= imax; ++b) pts.push_back({a, b, 0});
  } else {
    throw ValidationError("lattice_points: dim must be 1 or 2");
  }
  return pts;
}

Eigen::MatrixXcd fourier_matrix(double h, const Rational& step, double extent_lo,
                                double extent_hi, int dim) {
  auto pts = lattice_points(step, extent_lo, extent_hi, dim);
  std::int64_t side = static_cast<std::int64_t>(pts.size());
  if (dim == 1 && side > (1 << 14)) throw SizeError("fourier_matrix: side > 2^14 in dim 1");
  if (dim == 2 && side > (1 << 12)) throw SizeError("fourier_matrix: side > 2^12 in dim 2");
  if (pts.empty()) return Eigen::MatrixXcd(0, 0);
  return fourier_matrix_points(pts, pts, h, step, dim);
}

double fup_norm(const std::vector<Idx>& x_mask, const std::vector<Idx>& y_mask, double h,
                const Rational& step, int dim) {
  if (x_mask.empty() || y_mask.empty()) return 0.0;
  if (step.value() > h / 4.0 + 1e-15)
    throw ValidationError("fup_norm: oversampling factor must be >= 4");
  Eigen::MatrixXcd M = fourier_matrix_points(x_mask, y_mask, h, step, dim);
  const Eigen::Index rows = M.rows(), cols = M.cols();

  if (std::min(rows, cols) <= 1024) {
    Eigen::MatrixXcd N = (cols <= rows) ? Eigen::MatrixXcd(M.adjoint() * M)
                                        : Eigen::MatrixXcd(M * M.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(N, Eigen::EigenvaluesOnly);
    double lam = es.eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, lam));
  }

  // power iteration on M^H M with a deterministic start vector
  Eigen::VectorXcd v = Eigen::VectorXcd::Constant(cols, std::complex<double>(1.0, 0.0));
  v /= v.norm();
  double lam = 0.0, prev = -1.0;
  const int max_iters = 10000;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXcd w = M * v;
    Eigen::VectorXcd u = M.adjoint() * w;
    lam = u.norm();  // -> sigma_max^2
    if (lam == 0.0) return 0.0;
    v = u / lam;
    if (prev >= 0.0 && std::abs(lam - prev) <= 1e-12 * lam) return std::sqrt(lam);
    prev = lam;
  }
  throw ConvergenceError("fup_norm: power iteration did not converge", std::sqrt(lam), max_iters);
}

std::vector<Idx> build_mask(const MaskSpec& spec, const Rational& h, const Rational& step,
                            double extent_lo, double extent_hi) {
  std::vector<Idx> lattice = lattice_points(step, extent_lo, extent_hi, 1);
  std::vector<Idx> out;
  if (spec.full_interval) {
    double lo = spec.interval_lo - h.value(), hi = spec.interval_hi + h.value();
    for (const auto& p : lattice) {
      double x = static_cast<double>(p[0]) * step.value();
      if (x >= lo - 1e-15 && x < hi - 1e-15) out.push_back(p);
    }
    return out;
  }
  // depth n from h = base^-n
  spec.cantor.validate();
  Rational probe(1);
  int n = 0;
  while (probe > h) {
    probe = probe * Rational(1, spec.cantor.base);
    ++n;
  }
  if (!(probe == h))
    throw ValidationError("build_mask: h must be an exact power of the Cantor base");
  CantorSpec at_depth = spec.cantor;
  at_depth.levels = n;
  GridMeasure set = cantor_measure(at_depth);
  // surviving digit intervals [a*h, (a+1)*h], dilated by h, as exact rationals
  std::vector<std::pair<Rational, Rational>> ivs;
  for (const auto& [i, m] : set.cells()) {
    Rational lo = Rational(i[0]) * h - h;
    Rational hi = Rational(i[0] + 1) * h + h;
    if (!ivs.empty() && !(ivs.back().second < lo))
      ivs.back().second = hi;
    else
      ivs.push_back({lo, hi});
  }
  // half-open membership [lo, hi): rasterized neighborhoods then carry their
  // exact Lebesgue measure, which keeps the quadrature stable under
  // oversampling refinement
  for (const auto& p : lattice) {
    Rational x = Rational(p[0]) * step;
    auto it = std::upper_bound(ivs.begin(), ivs.end(), x,
                               [](const Rational& v, const auto& iv) { return v < iv.first; });
    if (it != ivs.begin()) {
      --it;
      if (x < it->second) out.push_back(p);
    }
  }
  return out;
}

double trivial_fup_exponent(int dim, double delta_x, double delta_y) {
  double d = static_cast<double>(dim);
  return std::max({d / 2.0 - delta_y, (d - delta_x - delta_y) / 2.0, 0.0});
}

FupCurve fup_curve(const MaskSpec& x_spec, const MaskSpec& y_spec,
                   const std::vector<Rational>& h_list, int oversample, int threads) {
  if (h_list.size() < 4) throw ValidationError("fup_curve: need >= 4 values of h");
  if (oversample < 4) throw ValidationError("fup_curve: oversample must be >= 4");
  std::vector<Rational> hs = h_list;
  std::sort(hs.begin(), hs.end(), [](const Rational& a, const Rational& b) { return b < a; });

  FupCurve curve;
  curve.delta_x = x_spec.delta();
  curve.delta_y = y_spec.delta();
  curve.trivial_exponent = trivial_fup_exponent(1, curve.delta_x, curve.delta_y);
  curve.entries.resize(hs.size());

  auto eval = [&](std::size_t k) {
    const Rational& h = hs[k];
    Rational step = h * Rational(1, oversample);
    auto xm = build_mask(x_spec, h, step, -2.0, 2.0);
    auto ym = build_mask(y_spec, h, step, -2.0, 2.0);
    FupPoint pt;
    pt.h = h;
    pt.oversample = oversample;
    pt.matrix_side = static_cast<std::int64_t>(std::max(xm.size(), ym.size()));
    pt.norm = fup_norm(xm, ym, h.value(), step, 1);
    curve.entries[k] = pt;
  };
  if (threads <= 1) {
    for (std::size_t k = 0; k < hs.size(); ++k) eval(k);
  } else {
    std::vector<std::future<void>> futs;
    std::size_t next = 0;
    while (next < hs.size()) {
      futs.clear();
      for (int t = 0; t < threads && next < hs.size(); ++t, ++next)
        futs.push_back(std::async(std::launch::async, eval, next));
      for (auto& f : futs) f.get();
    }
  }

  double lo = curve.entries.front().norm, hi = lo;
  for (const auto& e : curve.entries) {
    lo = std::min(lo, e.norm);
    hi = std::max(hi, e.norm);
  }
  if (hi - lo <= 1e-12 * std::max(1.0, hi)) {
    curve.degenerate = true;
    curve.fitted_exponent = 0.0;
    curve.gain = std::numeric_limits<double>::quiet_NaN();
    return curve;
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& e : curve.entries) pts.push_back({e.h.value(), e.norm});
  PowerLawFit fit = fit_powerlaw(pts);
  curve.fitted_exponent = fit.slope;
  curve.gain = curve.fitted_exponent - curve.trivial_exponent;
  return curve;
}

double fey_bound(const GridMeasure& mu_y, const Rational& h, double delta) {
  if (h < mu_y.step()) throw ValidationError("fey_bound: h < step");
  double d = static_cast<double>(mu_y.dim());
  return std::pow(h.value(), d / 2.0 - delta) * std::pow(energy_fast(mu_y, h), 0.25);
}

}  // namespace fractlab

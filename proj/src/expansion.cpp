#include "fractlab/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fractlab/errors.hpp"
#include "fractlab/fit.hpp"

namespace fractlab {

MapSpec MapSpec::named(MapKind kind) {
  MapSpec m;
  m.kind = kind;
  switch (kind) {
    case MapKind::product:
      m.domain_lo = 0.25;  // bounded away from 0
      m.domain_hi = 1.5;
      break;
    case MapKind::shifted_product:
      m.domain_lo = -1.25;  // shift keeps the factors >= 1/4
      m.domain_hi = 1.25;
      break;
    default:
      break;
  }
  return m;
}

MapSpec MapSpec::named(const std::string& name) {
  if (name == "sum") return named(MapKind::sum);
  if (name == "difference") return named(MapKind::difference);
  if (name == "product") return named(MapKind::product);
  if (name == "shifted-product" || name == "shifted_product")
    return named(MapKind::shifted_product);
  if (name == "quadratic") return named(MapKind::quadratic);
  if (name == "affine") return named(MapKind::affine);
  throw ValidationError("unknown map: " + name);
}

std::string MapSpec::name() const {
  switch (kind) {
    case MapKind::sum: return "sum";
    case MapKind::difference: return "difference";
    case MapKind::product: return "product";
    case MapKind::shifted_product: return "shifted-product";
    case MapKind::quadratic: return "quadratic";
    case MapKind::affine: return "affine";
  }
  return "?";
}

double MapSpec::apply(double x, double y) const {
  switch (kind) {
    case MapKind::sum: return x + y;
    case MapKind::difference: return x - y;
    case MapKind::product: return x * y;
    case MapKind::shifted_product: return (x + 1.5) * (y + 1.5);
    case MapKind::quadratic: return x + y * y;
    case MapKind::affine: return affine_a * x + affine_b * y + affine_c;
  }
  return 0.0;
}

double MapSpec::dx(double x, double y) const {
  (void)x;
  switch (kind) {
    case MapKind::sum:
    case MapKind::difference: return 1.0;
    case MapKind::product: return y;
    case MapKind::shifted_product: return y + 1.5;
    case MapKind::quadratic: return 1.0;
    case MapKind::affine: return affine_a;
  }
  return 0.0;
}

double MapSpec::dy(double x, double y) const {
  switch (kind) {
    case MapKind::sum: return 1.0;
    case MapKind::difference: return -1.0;
    case MapKind::product: return x;
    case MapKind::shifted_product: return x + 1.5;
    case MapKind::quadratic: return 2.0 * y;
    case MapKind::affine: return affine_b;
  }
  return 0.0;
}

void MapSpec::validate() const {
  if (!(domain_lo < domain_hi)) throw ValidationError("MapSpec: empty domain");
  if (kind == MapKind::affine && (std::abs(affine_a) < 1e-12 || std::abs(affine_b) < 1e-12))
    throw ValidationError("MapSpec: affine coefficients must be invertible");
  if ((kind == MapKind::product || kind == MapKind::shifted_product)) {
    // derivative-in-x and derivative-in-y must be invertible on the domain
    double lo = domain_lo, hi = domain_hi;
    double shift = kind == MapKind::shifted_product ? 1.5 : 0.0;
    if (lo + shift <= 0.0 && hi + shift >= 0.0)
      throw ValidationError("MapSpec: product domain must avoid 0");
  }
}

Mask1D neighborhood_mask(const MaskSpec& spec, const Rational& r, double pre_scale,
                         double pre_shift) {
  if (!r.positive()) throw ValidationError("neighborhood_mask: r must be > 0");
  if (!(pre_scale > 0.0))
    throw ValidationError("neighborhood_mask: pre-scale must be positive");
  Rational step = r * Rational(1, 2);
  Mask1D mask;
  mask.step = step;

  std::vector<std::pair<double, double>> ivs;  // dilated intervals, merged
  if (spec.full_interval) {
    ivs.push_back({pre_scale * spec.interval_lo + pre_shift - r.value(),
                   pre_scale * spec.interval_hi + pre_shift + r.value()});
  } else {
    spec.cantor.validate();
    Rational probe(1);
    int n = 0;
    while (r < probe) {
      probe = probe * Rational(1, spec.cantor.base);
      ++n;
    }
    if (!(probe == r))
      throw ValidationError("neighborhood_mask: r must be an exact power of the Cantor base");
    CantorSpec at_depth = spec.cantor;
    at_depth.levels = n;
    GridMeasure set = cantor_measure(at_depth);
    const double rr = r.value();
    for (const auto& [i, m] : set.cells()) {
      double lo = pre_scale * (static_cast<double>(i[0]) * rr) + pre_shift - rr;
      double hi = pre_scale * (static_cast<double>(i[0] + 1) * rr) + pre_shift + rr;
      if (!ivs.empty() && ivs.back().second >= lo)
        ivs.back().second = std::max(ivs.back().second, hi);
      else
        ivs.push_back({lo, hi});
    }
  }
  const double s = step.value();
  for (const auto& [lo, hi] : ivs) {
    std::int64_t a = static_cast<std::int64_t>(std::ceil(lo / s - 1e-12));
    std::int64_t b = static_cast<std::int64_t>(std::floor(hi / s + 1e-12));
    for (std::int64_t k = a; k <= b; ++k) mask.cells.push_back(k);
  }
  std::sort(mask.cells.begin(), mask.cells.end());
  mask.cells.erase(std::unique(mask.cells.begin(), mask.cells.end()), mask.cells.end());
  return mask;
}

double image_measure(const MapSpec& F, const Mask1D& x_mask, const Mask1D& y_mask,
                     const Rational& r) {
  F.validate();
  Rational out_step = r * Rational(1, 2);
  if (x_mask.step > out_step || y_mask.step > out_step)
    throw ValidationError("image_measure: mask step must be <= r/2");
  const double sx = x_mask.step.value(), sy = y_mask.step.value();
  const double so = out_step.value();
  for (const auto& mask : {&x_mask, &y_mask}) {
    for (std::int64_t c : mask->cells) {
      double v = static_cast<double>(c) * (mask == &x_mask ? sx : sy);
      if (v < F.domain_lo - 1e-12 || v > F.domain_hi + 1e-12)
        throw ValidationError("image_measure: mask point outside the map domain");
    }
  }
  std::vector<std::int64_t> covered;
  covered.reserve(x_mask.cells.size() * y_mask.cells.size());
  for (std::int64_t cx : x_mask.cells) {
    double x = static_cast<double>(cx) * sx;
    for (std::int64_t cy : y_mask.cells) {
      double z = F.apply(x, static_cast<double>(cy) * sy);
      covered.push_back(static_cast<std::int64_t>(std::floor(z / so)));
    }
  }
  std::sort(covered.begin(), covered.end());
  covered.erase(std::unique(covered.begin(), covered.end()), covered.end());
  // dilate by one cell to absorb the C^2 curvature error
  std::int64_t count = 0;
  std::int64_t prev_end = std::numeric_limits<std::int64_t>::min();
  for (std::size_t k = 0; k < covered.size(); ++k) {
    std::int64_t lo = std::max(covered[k] - 1, prev_end + 1);
    std::int64_t hi = covered[k] + 1;
    if (hi >= lo) count += hi - lo + 1;
    prev_end = std::max(prev_end, hi);
  }
  return static_cast<double>(count) * so;
}

double baseline_measure(const Mask1D& x_mask) {
  return static_cast<double>(x_mask.cells.size()) * x_mask.step.value();
}

ExpansionCurve expansion_curve(const MapSpec& F, const MaskSpec& x_spec, const MaskSpec& y_spec,
                               const std::vector<Rational>& radii, double pre_scale,
                               double pre_shift) {
  if (radii.size() < 4) throw ValidationError("expansion_curve: need >= 4 radii");
  std::vector<Rational> rs = radii;
  std::sort(rs.begin(), rs.end(), [](const Rational& a, const Rational& b) { return b < a; });

  ExpansionCurve curve;
  curve.map = F.name();
  curve.delta = x_spec.delta();
  for (const auto& r : rs) {
    auto xm = neighborhood_mask(x_spec, r, pre_scale, pre_shift);
    auto ym = neighborhood_mask(y_spec, r, pre_scale, pre_shift);
    ExpansionCurve::Entry e;
    e.r = r;
    e.image = image_measure(F, xm, ym, r);
    e.baseline_x = baseline_measure(xm);
    e.baseline_y = baseline_measure(ym);
    curve.entries.push_back(e);
  }
  double lo = curve.entries.front().image, hi = lo;
  for (const auto& e : curve.entries) {
    lo = std::min(lo, e.image);
    hi = std::max(hi, e.image);
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& e : curve.entries) pts.push_back({e.r.value(), e.image});
  PowerLawFit fit = fit_powerlaw(pts);
  curve.fitted_exponent = fit.slope;
  curve.gain = (1.0 - curve.delta) - curve.fitted_exponent;
  curve.degenerate = false;
  return curve;
}

}  // namespace fractlab

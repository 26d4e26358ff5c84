#include "fractlab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fractlab/errors.hpp"

namespace fractlab {

namespace {

// sorted support geometry for repeated ball queries
struct SupportIndex {
  int dim;
  double step;
  std::array<double, 3> origin;
  // dim 1: centers ascending with prefix masses
  std::vector<double> centers;
  std::vector<double> prefix;
  // dim 2/3: pencils keyed by leading coordinate(s), each with sorted last
  // coordinate and prefix masses
  struct Pencil {
    std::array<double, 2> lead;
    std::vector<double> last;
    std::vector<double> prefix;
  };
  std::vector<Pencil> pencils;

  explicit SupportIndex(const GridMeasure& mu)
      : dim(mu.dim()), step(mu.step().value()) {
    for (int a = 0; a < 3; ++a) origin[a] = mu.origin()[a].value();
    if (dim == 1) {
      centers.reserve(mu.cells().size());
      std::vector<double> masses;
      for (const auto& [i, m] : mu.cells()) {
        centers.push_back(origin[0] + static_cast<double>(i[0]) * step);
        masses.push_back(m);
      }
      prefix.assign(centers.size() + 1, 0.0);
      for (std::size_t k = 0; k < centers.size(); ++k) prefix[k + 1] = prefix[k] + masses[k];
    } else {
      // cells are sorted lexicographically, so pencils come out grouped
      const Idx* prev = nullptr;
      for (const auto& [i, m] : mu.cells()) {
        if (!prev || (*prev)[0] != i[0] || (dim == 3 && (*prev)[1] != i[1])) {
          Pencil p;
          p.lead[0] = origin[0] + static_cast<double>(i[0]) * step;
          p.lead[1] = dim == 3 ? origin[1] + static_cast<double>(i[1]) * step : 0.0;
          pencils.push_back(std::move(p));
        }
        prev = &i;
        auto& p = pencils.back();
        int last_axis = dim - 1;
        p.last.push_back(origin[last_axis] + static_cast<double>(i[last_axis]) * step);
        p.prefix.push_back(m);
      }
      for (auto& p : pencils) {
        std::vector<double> pref(p.last.size() + 1, 0.0);
        for (std::size_t k = 0; k < p.last.size(); ++k) pref[k + 1] = pref[k] + p.prefix[k];
        p.prefix = std::move(pref);
      }
    }
  }

  double ball(const std::array<double, 3>& x, double r) const {
    if (dim == 1) {
      auto lo = std::lower_bound(centers.begin(), centers.end(), x[0] - r);
      auto hi = std::upper_bound(centers.begin(), centers.end(), x[0] + r);
      return prefix[static_cast<std::size_t>(hi - centers.begin())] -
             prefix[static_cast<std::size_t>(lo - centers.begin())];
    }
    double acc = 0.0;
    const double r2 = r * r;
    for (const auto& p : pencils) {
      double d2 = (p.lead[0] - x[0]) * (p.lead[0] - x[0]);
      if (dim == 3) d2 += (p.lead[1] - x[1]) * (p.lead[1] - x[1]);
      if (d2 > r2) continue;
      double w = std::sqrt(r2 - d2);
      double c = dim == 3 ? x[2] : x[1];
      auto lo = std::lower_bound(p.last.begin(), p.last.end(), c - w);
      auto hi = std::upper_bound(p.last.begin(), p.last.end(), c + w);
      acc += p.prefix[static_cast<std::size_t>(hi - p.last.begin())] -
             p.prefix[static_cast<std::size_t>(lo - p.last.begin())];
    }
    return acc;
  }
};

}  // namespace

double ball_mass(const GridMeasure& mu, const std::array<double, 3>& x, double r) {
  return SupportIndex(mu).ball(x, r);
}

RegularityCertificate check_regularity(const GridMeasure& mu, double delta, double scale_lo,
                                       double scale_hi, std::int64_t samples) {
  if (mu.cells().empty()) throw ValidationError("check_regularity: empty measure");
  if (!(delta > 0.0) || delta > static_cast<double>(mu.dim()))
    throw ValidationError("check_regularity: delta outside (0, dim]");
  double diam = 0.0;
  for (int a = 0; a < mu.dim(); ++a) {
    double e = mu.box().hi[a] - mu.box().lo[a];
    diam += e * e;
  }
  diam = std::sqrt(diam);
  if (!(mu.step().value() <= scale_lo) || !(scale_lo <= scale_hi) || !(scale_hi <= diam))
    throw ValidationError("check_regularity: need step <= scale_lo <= scale_hi <= box diameter");

  // absolute ladder 10^{-k/12} within [scale_lo, scale_hi]
  std::vector<double> radii;
  const double l10 = std::log10(scale_hi), l10lo = std::log10(scale_lo);
  std::int64_t kmin = static_cast<std::int64_t>(std::ceil(-12.0 * l10 - 1e-9));
  std::int64_t kmax = static_cast<std::int64_t>(std::floor(-12.0 * l10lo + 1e-9));
  for (std::int64_t k = kmin; k <= kmax; ++k) radii.push_back(std::pow(10.0, -k / 12.0));
  if (radii.empty()) radii.push_back(scale_hi);

  SupportIndex sup(mu);
  RegularityCertificate cert;
  cert.delta = delta;
  cert.scale_lo = scale_lo;
  cert.scale_hi = scale_hi;
  cert.c_upper = 0.0;
  cert.c_lower = std::numeric_limits<double>::infinity();
  cert.sample_count = 0;

  // support centers, possibly subsampled (fresh per-radius generators keep
  // the sampling independent of which other radii are in the window)
  std::vector<std::array<double, 3>> support;
  support.reserve(mu.cells().size());
  for (const auto& [i, m] : mu.cells()) support.push_back(mu.center(i));

  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double r = radii[ri];
    const double rd = std::pow(r, delta);

    // lower bound: support-centered balls
    std::mt19937_64 rng(1 + 0x9e3779b97f4a7c15ULL * (ri + 1));
    if (static_cast<std::int64_t>(support.size()) <= samples) {
      for (const auto& x : support) {
        double q = sup.ball(x, r) / rd;
        cert.c_lower = std::min(cert.c_lower, q);
        cert.c_upper = std::max(cert.c_upper, q);
        ++cert.sample_count;
      }
    } else {
      for (std::int64_t t = 0; t < samples; ++t) {
        const auto& x = support[rng() % support.size()];
        double q = sup.ball(x, r) / rd;
        cert.c_lower = std::min(cert.c_lower, q);
        cert.c_upper = std::max(cert.c_upper, q);
        ++cert.sample_count;
      }
    }

    // upper bound: covering grid of spacing r/2 over the box
    std::array<std::int64_t, 3> counts{1, 1, 1};
    std::int64_t total = 1;
    for (int a = 0; a < mu.dim(); ++a) {
      counts[a] = static_cast<std::int64_t>(std::floor((mu.box().hi[a] - mu.box().lo[a]) / (r / 2))) + 1;
      total *= counts[a];
    }
    auto grid_point = [&](std::int64_t t) {
      std::array<double, 3> x{0, 0, 0};
      for (int a = 0; a < mu.dim(); ++a) {
        x[a] = mu.box().lo[a] + static_cast<double>(t % counts[a]) * (r / 2);
        t /= counts[a];
      }
      return x;
    };
    if (total <= samples) {
      for (std::int64_t t = 0; t < total; ++t) {
        double q = sup.ball(grid_point(t), r) / rd;
        cert.c_upper = std::max(cert.c_upper, q);
        ++cert.sample_count;
      }
    } else {
      for (std::int64_t t = 0; t < samples; ++t) {
        double q = sup.ball(grid_point(static_cast<std::int64_t>(rng() % total)), r) / rd;
        cert.c_upper = std::max(cert.c_upper, q);
        ++cert.sample_count;
      }
    }
  }

  cert.constant_C = cert.c_lower > 0.0
                        ? std::max(cert.c_upper, 1.0 / cert.c_lower)
                        : std::numeric_limits<double>::infinity();
  return cert;
}

}  // namespace fractlab

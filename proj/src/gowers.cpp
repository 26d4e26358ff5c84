#include "fractlab/gowers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fractlab/errors.hpp"

namespace fractlab {

namespace {

double haar3(const GridFunction& f) {
  double s = f.step().value();
  double w = 1.0;
  for (int a = 0; a < 3 * f.dim(); ++a) w *= s;
  return w;
}

}  // namespace

double u2_fourth(const GridFunction& f, std::int64_t fft_budget) {
  if (f.values().empty()) return 0.0;
  DenseC d = densify(f);
  DenseC c = convolve(d, d, fft_budget);
  double acc = 0.0;
  for (const auto& z : c.v) acc += std::norm(z);
  return haar3(f) * acc;
}

double u2_norm(const GridFunction& f, std::int64_t fft_budget) {
  return std::pow(u2_fourth(f, fft_budget), 0.25);
}

std::complex<double> gowers_inner(const GridFunction& f1, const GridFunction& f2,
                                  const GridFunction& f3, const GridFunction& f4,
                                  std::int64_t fft_budget) {
  if (!f1.same_lattice(f2) || !f1.same_lattice(f3) || !f1.same_lattice(f4))
    throw ValidationError("gowers_inner: functions must share a lattice");
  std::size_t maxsup = std::max({f1.values().size(), f2.values().size(), f3.values().size(),
                                 f4.values().size()});
  if (maxsup == 0) return {0.0, 0.0};

  if (maxsup <= 64) {
    // direct cubic sum with a binary-search lookup into f4
    const auto& v4 = f4.values();
    auto lookup = [&](const Idx& i) -> std::complex<double> {
      auto it = std::lower_bound(v4.begin(), v4.end(), i,
                                 [](const auto& e, const Idx& k) { return e.first < k; });
      if (it != v4.end() && it->first == i) return it->second;
      return {0.0, 0.0};
    };
    std::complex<double> acc{0.0, 0.0};
    for (const auto& [x, a] : f1.values())
      for (const auto& [u, b] : f2.values())
        for (const auto& [v, c] : f3.values()) {
          Idx t{u[0] + v[0] - x[0], u[1] + v[1] - x[1], u[2] + v[2] - x[2]};
          acc += a * std::conj(b) * std::conj(c) * lookup(t);
        }
    return haar3(f1) * acc;
  }

  DenseC c14 = convolve(densify(f1), densify(f4), fft_budget);
  DenseC c23 = convolve(densify(f2), densify(f3), fft_budget);
  // sum over the overlap of the two sum-lattice boxes
  Idx lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < 3; ++a) {
    lo[a] = std::max(c14.lo[a], c23.lo[a]);
    hi[a] = std::min(c14.lo[a] + c14.n[a], c23.lo[a] + c23.n[a]);
  }
  std::complex<double> acc{0.0, 0.0};
  Idx i{0, 0, 0};
  for (i[0] = lo[0]; i[0] < hi[0]; ++i[0])
    for (i[1] = lo[1]; i[1] < hi[1]; ++i[1])
      for (i[2] = lo[2]; i[2] < hi[2]; ++i[2]) acc += c14.at(i) * std::conj(c23.at(i));
  return haar3(f1) * acc;
}

double u2_of_smoothed(const GridMeasure& mu, const Rational& r, std::int64_t fft_budget) {
  if (r < mu.step()) throw ValidationError("u2_of_smoothed: r < step");
  DenseD d = densify(mu);
  DenseD g = ball_sum_field(d, mu.step(), r);
  DenseC gc;
  gc.dim = g.dim;
  gc.lo = g.lo;
  gc.n = g.n;
  gc.v.assign(g.v.begin(), g.v.end());
  DenseC c = convolve(gc, gc, fft_budget);
  double acc = 0.0;
  for (const auto& z : c.v) acc += std::norm(z);
  double s = mu.step().value();
  double w = 1.0;
  for (int a = 0; a < 3 * mu.dim(); ++a) w *= s;
  return std::pow(w * acc, 0.25);
}

std::pair<double, double> splitting_check(const GridFunction& F, std::int64_t fft_budget) {
  if (F.dim() != 2) throw ValidationError("splitting_check: needs a 2-factor lattice");
  double lhs = u2_norm(F, fft_budget);

  // column norms: f_V(v') = ||F(., v')||_{U^2(V)}, V = axis 0
  DenseC d = densify(F);
  std::vector<std::pair<Idx, std::complex<double>>> colnorms;
  for (std::int64_t x = 0; x < d.n[1]; ++x) {
    std::vector<std::pair<Idx, std::complex<double>>> col;
    for (std::int64_t y = 0; y < d.n[0]; ++y) {
      std::complex<double> z = d.v[y * d.n[1] + x];
      if (z != std::complex<double>{}) col.push_back({{d.lo[0] + y, 0, 0}, z});
    }
    if (col.empty()) continue;
    GridFunction slice(1, F.step(), {F.origin()[0], Rational(0), Rational(0)}, std::move(col));
    double nn = u2_norm(slice, fft_budget);
    if (nn != 0.0) colnorms.push_back({{d.lo[1] + x, 0, 0}, nn});
  }
  if (colnorms.empty()) return {lhs, 0.0};
  GridFunction fv(1, F.step(), {F.origin()[1], Rational(0), Rational(0)}, std::move(colnorms));
  return {lhs, u2_norm(fv, fft_budget)};
}

double lp_norm(const GridFunction& f, double p) {
  double s = f.step().value();
  double haar = 1.0;
  for (int a = 0; a < f.dim(); ++a) haar *= s;
  double acc = 0.0;
  for (const auto& [i, z] : f.values()) acc += std::pow(std::abs(z), p) * haar;
  return std::pow(acc, 1.0 / p);
}

namespace {

GridFunction random_function(std::mt19937_64& rng, int dim, const Rational& step,
                             std::int64_t span, int max_support) {
  std::uniform_int_distribution<std::int64_t> coord(-span, span);
  std::uniform_int_distribution<int> count(2, max_support);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  int n = count(rng);
  std::vector<std::pair<Idx, std::complex<double>>> values;
  for (int k = 0; k < n; ++k) {
    Idx i{0, 0, 0};
    for (int a = 0; a < dim; ++a) i[a] = coord(rng);
    values.push_back({i, std::complex<double>(val(rng), 0.0)});
  }
  std::sort(values.begin(), values.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  values.erase(std::unique(values.begin(), values.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               values.end());
  return GridFunction(dim, step, {Rational(0), Rational(0), Rational(0)}, std::move(values));
}

}  // namespace

std::vector<ToolkitCheckResult> run_gowers_checks(int trials, std::uint64_t seed,
                                                  std::int64_t fft_budget) {
  std::mt19937_64 rng(seed);
  const Rational steps[3] = {Rational(1), Rational(1, 2), Rational(1, 4)};
  ToolkitCheckResult gcs{"gowers-cauchy-schwarz", trials, 0, 0.0};
  ToolkitCheckResult young{"young", trials, 0, 0.0};
  ToolkitCheckResult tensor{"tensor-identity", trials, 0, 0.0};
  ToolkitCheckResult split{"splitting", trials, 0, 0.0};

  for (int t = 0; t < trials; ++t) {
    Rational step = steps[t % 3];
    int dim = (t % 2) ? 2 : 1;

    // Gowers-Cauchy-Schwarz
    {
      auto f1 = random_function(rng, dim, step, 6, 10);
      auto f2 = random_function(rng, dim, step, 6, 10);
      auto f3 = random_function(rng, dim, step, 6, 10);
      auto f4 = random_function(rng, dim, step, 6, 10);
      double lhs = std::abs(gowers_inner(f1, f2, f3, f4, fft_budget));
      double rhs = u2_norm(f1, fft_budget) * u2_norm(f2, fft_budget) *
                   u2_norm(f3, fft_budget) * u2_norm(f4, fft_budget);
      double excess = rhs > 0 ? lhs / rhs - 1.0 : lhs;
      gcs.max_violation = std::max(gcs.max_violation, excess);
      if (excess > 1e-9) ++gcs.failures;
    }
    // Young bound
    {
      auto f = random_function(rng, dim, step, 8, 16);
      double lhs = u2_norm(f, fft_budget);
      double rhs = lp_norm(f, 4.0 / 3.0);
      double excess = rhs > 0 ? lhs / rhs - 1.0 : lhs;
      young.max_violation = std::max(young.max_violation, excess);
      if (excess > 1e-9) ++young.failures;
    }
    // tensor identity (1D x 1D)
    {
      auto f = random_function(rng, 1, step, 8, 12);
      auto g = random_function(rng, 1, step, 8, 12);
      std::vector<std::pair<Idx, std::complex<double>>> prod;
      for (const auto& [i, a] : f.values())
        for (const auto& [j, b] : g.values()) prod.push_back({{i[0], j[0], 0}, a * b});
      GridFunction fg(2, step, {Rational(0), Rational(0), Rational(0)}, std::move(prod));
      double lhs = u2_norm(fg, fft_budget);
      double rhs = u2_norm(f, fft_budget) * u2_norm(g, fft_budget);
      double diff = std::abs(lhs - rhs) / std::max(1e-30, rhs);
      tensor.max_violation = std::max(tensor.max_violation, diff);
      if (diff > 1e-10) ++tensor.failures;
    }
    // splitting inequality on a 2-factor lattice
    {
      auto F = random_function(rng, 2, step, 5, 24);
      auto [lhs, rhs] = splitting_check(F, fft_budget);
      double excess = rhs > 0 ? lhs / rhs - 1.0 : lhs;
      split.max_violation = std::max(split.max_violation, excess);
      if (excess > 1e-9) ++split.failures;
    }
  }
  return {gcs, young, tensor, split};
}

}  // namespace fractlab

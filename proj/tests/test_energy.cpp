#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fractlab/energy.hpp"
#include "fractlab/errors.hpp"
#include "fractlab/grid.hpp"

using namespace fractlab;

namespace {

CantorSpec cantor(int base, std::vector<int> digits, int levels) {
  CantorSpec s;
  s.base = base;
  s.digits = std::move(digits);
  s.levels = levels;
  return s;
}

GridMeasure two_points(double m0, double m1) {
  // masses at positions 0 and 1 on a step-1/4 lattice inside [-1,1]
  return GridMeasure(1, Rational(1, 4), {Rational(0), Rational(0), Rational(0)},
                     {{{0, 0, 0}, m0}, {{4, 0, 0}, m1}});
}

// literal quadruple-loop oracle, usable for tiny supports only
double energy_quadruple_oracle(const GridMeasure& mu, const Rational& r) {
  double total = 0.0;
  const auto& cells = mu.cells();
  for (const auto& [i1, m1] : cells)
    for (const auto& [i2, m2] : cells)
      for (const auto& [i3, m3] : cells)
        for (const auto& [i4, m4] : cells) {
          Idx d{i1[0] + i2[0] - i3[0] - i4[0], i1[1] + i2[1] - i3[1] - i4[1],
                i1[2] + i2[2] - i3[2] - i4[2]};
          if (index_in_ball(d, mu.dim(), mu.step(), r)) total += m1 * m2 * m3 * m4;
        }
  return total;
}

GridMeasure random_measure(std::mt19937_64& rng, int dim, int max_cells, std::int64_t span) {
  std::uniform_int_distribution<std::int64_t> coord(-span, span);
  std::uniform_int_distribution<int> count(2, max_cells);
  std::uniform_real_distribution<double> mass(0.01, 1.0);
  int n = count(rng);
  std::vector<std::pair<Idx, double>> cells;
  for (int k = 0; k < n; ++k) {
    Idx i{0, 0, 0};
    for (int a = 0; a < dim; ++a) i[a] = coord(rng);
    cells.push_back({i, mass(rng)});
  }
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  cells.erase(std::unique(cells.begin(), cells.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              cells.end());
  Rational step(1, 4 * span);  // keeps centers inside [-1,1]
  return GridMeasure(dim, step, {Rational(0), Rational(0), Rational(0)}, std::move(cells));
}

}  // namespace

TEST_CASE("bruteforce: point mass has energy one at every radius") {
  GridMeasure p(1, Rational(1, 4), {Rational(1, 8), Rational(0), Rational(0)},
                {{{0, 0, 0}, 1.0}});
  CHECK(energy_bruteforce(p, Rational(0)) == doctest::Approx(1.0));
  CHECK(energy_bruteforce(p, Rational(1, 2)) == doctest::Approx(1.0));
}

TEST_CASE("bruteforce: two-point sum distribution") {
  GridMeasure mu = two_points(0.5, 0.5);
  // sum distribution (1/4, 1/2, 1/4): within r=1/2 only equal sums pair up
  CHECK(energy_bruteforce(mu, Rational(1, 2)) == doctest::Approx(3.0 / 8));
  // r=1 adds the |a-b|=1 pairs
  CHECK(energy_bruteforce(mu, Rational(1)) == doctest::Approx(7.0 / 8));
}

TEST_CASE("bruteforce agrees with the literal quadruple loop") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 12; ++t) {
    int dim = 1 + t % 3;
    GridMeasure mu = random_measure(rng, dim, 7, 5);
    Rational r(1 + static_cast<int>(rng() % 6), 16);
    double a = energy_bruteforce(mu, r);
    double b = energy_quadruple_oracle(mu, r);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("bruteforce refuses large supports") {
  GridMeasure mu = cantor_measure(cantor(3, {0, 1, 2}, 6));  // 729 cells
  CHECK_THROWS_AS(energy_bruteforce(mu, Rational(1, 9)), ValidationError);
}

TEST_CASE("fast equals brute on seeded random measures") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    int dim = 1 + t % 3;
    int max_cells = dim == 1 ? 200 : 60;
    std::int64_t span = dim == 1 ? 400 : 12;
    GridMeasure mu = random_measure(rng, dim, max_cells, span);
    Rational r = mu.step() * Rational(1 + static_cast<int>(rng() % 40));
    double fast = energy_fast(mu, r);
    double brute = energy_bruteforce(mu, r);
    CHECK(std::abs(fast - brute) <= 1e-9 * std::max(1e-30, std::abs(brute)));
  }
}

TEST_CASE("fast equals brute on the depth-4 Cantor measure") {
  GridMeasure mu = cantor_measure(cantor(3, {0, 2}, 4));
  for (int k = 1; k <= 4; ++k) {
    Rational r = Rational::pow(3, -k);
    CHECK(energy_fast(mu, r) ==
          doctest::Approx(energy_bruteforce(mu, r)).epsilon(1e-9));
  }
}

TEST_CASE("fast path validates the radius against the step") {
  GridMeasure mu = cantor_measure(cantor(3, {0, 2}, 3));
  CHECK_THROWS_AS(energy_fast(mu, Rational(1, 100)), ValidationError);
}

TEST_CASE("energy is monotone in r") {
  GridMeasure mu = cantor_measure(cantor(3, {0, 2}, 6));
  double prev = 0.0;
  for (int k = 6; k >= 1; --k) {
    double e = energy_fast(mu, Rational::pow(3, -k));
    CHECK(e >= prev);
    prev = e;
  }
}

TEST_CASE("integer-dimension reference: energy scales linearly in r") {
  GridMeasure mu = disk_measure(1, 1, Rational::pow(2, -12));
  // E ~ r^1: the ratio E/r stays within a fixed window
  double lo = 1e300, hi = 0.0;
  for (int k = 4; k <= 9; ++k) {
    Rational r = Rational::pow(2, -k);
    double ratio = energy_fast(mu, r) / r.value();
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(hi / lo < 1.6);
}

TEST_CASE("energy_wrt_set: H={0} gives the exact discrete energy") {
  GridMeasure mu = two_points(0.5, 0.5);
  WindowSet h0(1, mu.step(), {{{0, 0, 0}}});
  // sum distribution (1/4,1/2,1/4); sum of squares = 3/8
  CHECK(energy_wrt_set(mu, h0) == doctest::Approx(3.0 / 8));
}

TEST_CASE("energy_wrt_set with a rasterized ball equals energy_fast") {
  GridMeasure mu = cantor_measure(cantor(3, {0, 2}, 4));
  Rational r = Rational::pow(3, -2);
  WindowSet ball = rasterize_ball(1, mu.step(), r);
  CHECK(energy_wrt_set(mu, ball) == doctest::Approx(energy_fast(mu, r)).epsilon(1e-12));
}

TEST_CASE("energy_wrt_set is invariant under lattice dilation T(x)=2x+1") {
  GridMeasure mu = cantor_measure(cantor(3, {0, 2}, 3));
  Rational r = Rational::pow(3, -2);
  WindowSet ball = rasterize_ball(1, mu.step(), r);
  // T*mu: same indices, step 2s, origin 2o+1 (recentering into the box)
  std::vector<std::pair<Idx, double>> cells = mu.cells();
  BoundingBox box;
  box.lo = {-4, -4, -4};
  box.hi = {4, 4, 4};
  GridMeasure pushed(1, mu.step() * Rational(2),
                     {mu.origin()[0] * Rational(2) + Rational(1), Rational(0), Rational(0)},
                     std::move(cells), box);
  WindowSet doubled(1, pushed.step(), ball.indices());  // 2H on the doubled lattice
  CHECK(energy_wrt_set(pushed, doubled) == energy_wrt_set(mu, ball));
}

TEST_CASE("energy_wrt_set rejects asymmetric windows") {
  CHECK_THROWS_AS(WindowSet(1, Rational(1, 4), {{{0, 0, 0}}, {{1, 0, 0}}}), ValidationError);
  CHECK_THROWS_AS(WindowSet(1, Rational(1, 4), {{{1, 0, 0}}, {{-1, 0, 0}}}), ValidationError);
}

TEST_CASE("trivial bound holds with near-sharpness for a point mass") {
  GridMeasure p(1, Rational(1, 4), {Rational(0), Rational(0), Rational(0)},
                {{{0, 0, 0}, 1.0}});
  CHECK(trivial_energy_bound(p, Rational(1, 2)) == doctest::Approx(1.0));
  CHECK(energy_bruteforce(p, Rational(1, 2)) <= trivial_energy_bound(p, Rational(1, 2)));
}

TEST_CASE("trivial bound dominates the energy on random measures") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    int dim = 1 + t % 2;
    GridMeasure mu = random_measure(rng, dim, 40, 16);
    Rational r = mu.step() * Rational(1 + static_cast<int>(rng() % 20));
    CHECK(energy_bruteforce(mu, r) <= trivial_energy_bound(mu, r) * (1 + 1e-9));
  }
}

TEST_CASE("energy curve: fit, beta, and residual bookkeeping") {
  GridMeasure mu = cantor_measure(cantor(3, {0, 2}, 8));
  double delta = cantor(3, {0, 2}, 8).delta();
  std::vector<Rational> scales;
  for (int k = 2; k <= 7; ++k) scales.push_back(Rational::pow(3, -k));
  EnergyCurve curve = energy_curve(mu, scales, delta, EnergyMethod::fast);
  REQUIRE(curve.entries.size() == 6);
  for (std::size_t k = 1; k < curve.entries.size(); ++k) {
    CHECK(curve.entries[k - 1].r < curve.entries[k].r);
    CHECK(curve.entries[k].energy >= curve.entries[k - 1].energy);
  }
  CHECK(curve.beta == curve.fitted_slope - delta);
  CHECK(curve.beta > 0.1);  // strict gain for the non-integer Cantor family
  CHECK(curve.residual < 0.1);
}

TEST_CASE("energy curve: brute method matches fast on small inputs") {
  GridMeasure mu = cantor_measure(cantor(3, {0, 2}, 4));
  std::vector<Rational> scales;
  for (int k = 1; k <= 4; ++k) scales.push_back(Rational::pow(3, -k));
  EnergyCurve fast = energy_curve(mu, scales, 0.6, EnergyMethod::fast);
  EnergyCurve brute = energy_curve(mu, scales, 0.6, EnergyMethod::brute);
  for (std::size_t k = 0; k < fast.entries.size(); ++k)
    CHECK(fast.entries[k].energy ==
          doctest::Approx(brute.entries[k].energy).epsilon(1e-9));
}

TEST_CASE("energy curve rejects short ladders and out-of-range scales") {
  GridMeasure mu = cantor_measure(cantor(3, {0, 2}, 4));
  CHECK_THROWS_AS(
      energy_curve(mu, {Rational(1, 3), Rational(1, 9), Rational(1, 27)}, 0.6,
                   EnergyMethod::fast),
      ValidationError);
  CHECK_THROWS_AS(energy_curve(mu,
                               {Rational(2), Rational(1, 3), Rational(1, 9), Rational(1, 27)},
                               0.6, EnergyMethod::fast),
                  ValidationError);
}

TEST_CASE("golden value: depth-12 Cantor energy at r = 3^-6") {
  // pinned from a fast/brute cross-validated run (the two routes agree to
  // 15 digits at depth 5 where brute is feasible)
  GridMeasure mu = cantor_measure(cantor(3, {0, 2}, 12));
  CHECK(energy_fast(mu, Rational::pow(3, -6)) ==
        doctest::Approx(0.0026953440949739615).epsilon(1e-9));
}

TEST_CASE("transform size budget: refuses only when both paths exceed it") {
  // 64 cells spread across 4033 lattice sites: padded transform 8192 points
  std::vector<std::pair<Idx, double>> cells;
  for (int k = 0; k < 64; ++k) cells.push_back({{64 * k, 0, 0}, 1.0 / 64});
  GridMeasure mu(1, Rational(1, 8192), {Rational(0), Rational(0), Rational(0)},
                 std::move(cells));
  Rational r(1, 64);
  CHECK_THROWS_AS(energy_fast(mu, r, 1024), SizeError);
  CHECK(energy_fast(mu, r, 1 << 20) ==
        doctest::Approx(energy_bruteforce(mu, r)).epsilon(1e-9));
  // a budget that admits the direct pair sum but not the transform
  CHECK(energy_fast(mu, r, 8191) == doctest::Approx(energy_bruteforce(mu, r)).epsilon(1e-9));
}

TEST_CASE("2D product measure energy runs through the dense path") {
  GridMeasure c = cantor_measure(cantor(3, {0, 2}, 3));
  GridMeasure cc = product_measure(c, c);
  Rational r = Rational::pow(3, -2);
  CHECK(energy_fast(cc, r) == doctest::Approx(energy_bruteforce(cc, r)).epsilon(1e-9));
}

TEST_CASE("2D disk reference: energy scales like r^2") {
  GridMeasure mu = disk_measure(2, 2, Rational::pow(2, -6));
  double lo = 1e300, hi = 0.0;
  for (int k = 2; k <= 5; ++k) {
    Rational r = Rational::pow(2, -k);
    double ratio = energy_fast(mu, r) / (r.value() * r.value());
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(hi / lo < 1.8);
}

TEST_CASE("energy_wrt_set validates lattice compatibility") {
  GridMeasure mu = cantor_measure(cantor(3, {0, 2}, 2));
  WindowSet wrong_step(1, Rational(1, 4), {{{0, 0, 0}}});
  CHECK_THROWS_AS(energy_wrt_set(mu, wrong_step), ValidationError);
  WindowSet wrong_dim(2, mu.step(), {{{0, 0, 0}}});
  CHECK_THROWS_AS(energy_wrt_set(mu, wrong_dim), ValidationError);
}

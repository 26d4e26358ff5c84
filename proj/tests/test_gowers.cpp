#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fractlab/energy.hpp"
#include "fractlab/errors.hpp"
#include "fractlab/gowers.hpp"
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

GridFunction indicator(std::vector<std::int64_t> pts, Rational step = Rational(1)) {
  std::vector<std::pair<Idx, std::complex<double>>> values;
  for (auto p : pts) values.push_back({{p, 0, 0}, {1.0, 0.0}});
  return GridFunction(1, step, {Rational(0), Rational(0), Rational(0)}, std::move(values));
}

GridFunction random_fn(std::mt19937_64& rng, int dim, Rational step, std::int64_t span, int n,
                       bool complex_values = false) {
  std::uniform_int_distribution<std::int64_t> coord(-span, span);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  std::vector<std::pair<Idx, std::complex<double>>> values;
  for (int k = 0; k < n; ++k) {
    Idx i{0, 0, 0};
    for (int a = 0; a < dim; ++a) i[a] = coord(rng);
    values.push_back({i, {val(rng), complex_values ? val(rng) - 0.5 : 0.0}});
  }
  std::sort(values.begin(), values.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  values.erase(std::unique(values.begin(), values.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               values.end());
  return GridFunction(dim, step, {Rational(0), Rational(0), Rational(0)}, std::move(values));
}

}  // namespace

TEST_CASE("u2 of a single point at counting normalization") {
  CHECK(u2_fourth(indicator({0})) == doctest::Approx(1.0));
}

TEST_CASE("u2 fourth power of a two-point indicator is 6") {
  // convolution counts (1,2,1); sum of squares 6
  CHECK(u2_fourth(indicator({0, 1})) == doctest::Approx(6.0));
}

TEST_CASE("u2 matches the gowers inner product of four copies") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    auto f = random_fn(rng, 1 + t % 2, Rational(1, 2), 5, 8, true);
    auto ip = gowers_inner(f, f, f, f);
    CHECK(ip.imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ip.real() == doctest::Approx(u2_fourth(f)).epsilon(1e-9));
  }
}

TEST_CASE("gowers inner: zero factor annihilates") {
  auto f = indicator({0, 1, 3});
  GridFunction z(1, Rational(1), {Rational(0), Rational(0), Rational(0)}, {});
  CHECK(std::abs(gowers_inner(f, f, z, f)) == doctest::Approx(0.0));
}

TEST_CASE("gowers inner: convolution route equals the cubic sum") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 6; ++t) {
    // large enough to trigger the convolution path
    auto f1 = random_fn(rng, 1, Rational(1, 4), 40, 80, true);
    auto f2 = random_fn(rng, 1, Rational(1, 4), 40, 80, true);
    auto f3 = random_fn(rng, 1, Rational(1, 4), 40, 12, true);
    auto f4 = random_fn(rng, 1, Rational(1, 4), 40, 12, true);
    auto fast = gowers_inner(f1, f2, f3, f4);
    // direct evaluation
    std::complex<double> direct{0, 0};
    for (const auto& [x, a] : f1.values())
      for (const auto& [u, b] : f2.values())
        for (const auto& [v, c] : f3.values())
          for (const auto& [w, d] : f4.values())
            if (w[0] == u[0] + v[0] - x[0])
              direct += a * std::conj(b) * std::conj(c) * d;
    double haar = std::pow(0.25, 3);
    direct *= haar;
    CHECK(std::abs(fast - direct) <= 1e-9 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("gowers inner requires a common lattice") {
  auto f = indicator({0, 1});
  auto g = indicator({0, 1}, Rational(1, 2));
  CHECK_THROWS_AS(gowers_inner(f, f, f, g), ValidationError);
}

TEST_CASE("tensor identity is exact") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    auto f = random_fn(rng, 1, Rational(1, 2), 6, 6);
    auto g = random_fn(rng, 1, Rational(1, 2), 6, 6);
    std::vector<std::pair<Idx, std::complex<double>>> prod;
    for (const auto& [i, a] : f.values())
      for (const auto& [j, b] : g.values()) prod.push_back({{i[0], j[0], 0}, a * b});
    GridFunction fg(2, Rational(1, 2), {Rational(0), Rational(0), Rational(0)},
                    std::move(prod));
    double lhs = u2_norm(fg);
    double rhs = u2_norm(f) * u2_norm(g);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("u2_of_smoothed: point mass against the tent-function integral") {
  // ||1_{[-r,r]}||_{U^2}^4 = (2/3)(2r)^3; check to 2% at r = 64*step
  Rational step(1, 8192);
  GridMeasure p(1, step, {Rational(0), Rational(0), Rational(0)}, {{{0, 0, 0}, 1.0}});
  Rational r = step * Rational(64);
  double u = u2_of_smoothed(p, r);
  double expect = std::pow(2.0 / 3.0 * std::pow(2.0 * r.value(), 3.0), 0.25);
  CHECK(std::abs(u - expect) / expect < 0.02);
}

TEST_CASE("u2_of_smoothed: energy ratio window over six scales") {
  GridMeasure mu = cantor_measure(cantor(3, {0, 2}, 12));
  double lo = 1e300, hi = 0.0;
  for (int k = 4; k <= 9; ++k) {
    Rational r = Rational::pow(3, -k);
    double e = energy_fast(mu, r);
    double u = u2_of_smoothed(mu, r);
    double ratio = e * std::pow(r.value(), 3.0) / std::pow(u, 4.0);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(hi / lo <= 64.0);
}

TEST_CASE("u2_of_smoothed: dilation comparison bounded by lambda") {
  GridMeasure mu = cantor_measure(cantor(3, {0, 2}, 8));
  for (int lambda : {2, 4}) {
    for (int k = 3; k <= 5; ++k) {
      Rational r = Rational::pow(3, -k);
      double base = u2_of_smoothed(mu, r);
      double dil = u2_of_smoothed(mu, r * Rational(lambda));
      double ratio = dil / base;
      CHECK(ratio >= 1.0 - 1e-12);
      CHECK(ratio <= static_cast<double>(lambda) + 1e-12);
    }
  }
}

TEST_CASE("splitting: tensor products achieve equality") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 10; ++t) {
    auto f = random_fn(rng, 1, Rational(1), 5, 5);
    auto g = random_fn(rng, 1, Rational(1), 5, 5);
    std::vector<std::pair<Idx, std::complex<double>>> prod;
    for (const auto& [i, a] : f.values())
      for (const auto& [j, b] : g.values()) prod.push_back({{i[0], j[0], 0}, a * b});
    GridFunction fg(2, Rational(1), {Rational(0), Rational(0), Rational(0)}, std::move(prod));
    auto [lhs, rhs] = splitting_check(fg);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("splitting: zero function") {
  GridFunction z(2, Rational(1), {Rational(0), Rational(0), Rational(0)}, {});
  auto [lhs, rhs] = splitting_check(z);
  CHECK(lhs == 0.0);
  CHECK(rhs == 0.0);
}

TEST_CASE("splitting inequality on 100 random 16x16 lattices") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 100; ++t) {
    auto F = random_fn(rng, 2, Rational(1, 2), 8, 40);
    auto [lhs, rhs] = splitting_check(F);
    CHECK(lhs <= rhs * (1 + 1e-9));
  }
}

TEST_CASE("splitting rejects non-product lattices") {
  auto f = indicator({0, 1});
  CHECK_THROWS_AS(splitting_check(f), ValidationError);
}

TEST_CASE("young bound on random nonnegative functions") {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 50; ++t) {
    auto f = random_fn(rng, 1 + t % 2, Rational(1, 3), 8, 12);
    CHECK(u2_norm(f) <= lp_norm(f, 4.0 / 3.0) * (1 + 1e-9));
  }
}

TEST_CASE("u2_of_smoothed validates the radius") {
  GridMeasure mu = cantor_measure(cantor(3, {0, 2}, 4));
  CHECK_THROWS_AS(u2_of_smoothed(mu, Rational(1, 1000)), ValidationError);
}

TEST_CASE("toolkit check suite is clean and deterministic") {
  auto a = run_gowers_checks(50, 1);
  auto b = run_gowers_checks(50, 1);
  REQUIRE(a.size() == 4);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].failures == 0);
    CHECK(a[k].max_violation == b[k].max_violation);
  }
}

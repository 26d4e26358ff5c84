#include "fractlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "fractlab/errors.hpp"

namespace fractlab {

Rational Rational::parse(const std::string& s) {
  auto caret = s.find('^');
  if (caret != std::string::npos) {
    std::int64_t base = std::stoll(s.substr(0, caret));
    int exp = std::stoi(s.substr(caret + 1));
    return Rational::pow(base, exp);
  }
  auto slash = s.find('/');
  if (slash != std::string::npos)
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  // plain decimal
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(std::stoll(s));
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  std::size_t frac = s.size() - dot - 1;
  if (frac > 17) throw ValidationError("Rational::parse: too many decimal places: " + s);
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac; ++i) den *= 10;
  return Rational(std::stoll(digits), den);
}

double CantorSpec::delta() const {
  return std::log(static_cast<double>(digits.size())) / std::log(static_cast<double>(base));
}

void CantorSpec::validate() const {
  if (base < 2) throw ValidationError("CantorSpec: base must be >= 2");
  if (digits.empty()) throw ValidationError("CantorSpec: digit set is empty");
  for (int d : digits)
    if (d < 0 || d >= base) throw ValidationError("CantorSpec: digit out of range");
  std::set<int> uniq(digits.begin(), digits.end());
  if (uniq.size() != digits.size()) throw ValidationError("CantorSpec: duplicate digits");
  if (levels < 1) throw ValidationError("CantorSpec: levels must be >= 1");
  // base^levels must stay well inside int64 so index arithmetic is exact
  double bits = levels * std::log2(static_cast<double>(base));
  if (bits > 40) throw SizeError("CantorSpec: base^levels exceeds size budget");
}

GridMeasure::GridMeasure(int dim, Rational step, std::array<Rational, 3> origin,
                         std::vector<std::pair<Idx, double>> cells, BoundingBox box)
    : dim_(dim), step_(step), origin_(origin), cells_(std::move(cells)), box_(box) {
  if (dim_ < 1 || dim_ > 3) throw ValidationError("GridMeasure: dim must be in {1,2,3}");
  if (!step_.positive()) throw ValidationError("GridMeasure: step must be > 0");
  std::sort(cells_.begin(), cells_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  total_mass_ = 0.0;
  const Idx* prev = nullptr;
  for (const auto& [i, m] : cells_) {
    if (m < 0.0) throw ValidationError("GridMeasure: negative mass");
    if (prev && *prev == i) throw ValidationError("GridMeasure: duplicate cell index");
    prev = &i;
    for (int a = dim_; a < 3; ++a)
      if (i[a] != 0) throw ValidationError("GridMeasure: index component beyond dim");
    total_mass_ += m;
  }
  for (const auto& [i, m] : cells_) {
    auto x = center(i);
    for (int a = 0; a < dim_; ++a) {
      // half-step slack: a cell whose center rounds onto the box face is fine
      double pad = 0.5 * step_.value() + 1e-12;
      if (x[a] < box_.lo[a] - pad || x[a] > box_.hi[a] + pad)
        throw ValidationError("GridMeasure: support outside bounding box");
    }
  }
}

GridFunction::GridFunction(int dim, Rational step, std::array<Rational, 3> origin,
                           std::vector<std::pair<Idx, std::complex<double>>> values)
    : dim_(dim), step_(step), origin_(origin), values_(std::move(values)) {
  if (dim_ < 1 || dim_ > 3) throw ValidationError("GridFunction: dim must be in {1,2,3}");
  if (!step_.positive()) throw ValidationError("GridFunction: step must be > 0");
  std::sort(values_.begin(), values_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
}

WindowSet::WindowSet(int dim, Rational step, std::vector<Idx> indices)
    : dim_(dim), step_(step), indices_(std::move(indices)) {
  if (!step_.positive()) throw ValidationError("WindowSet: step must be > 0");
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  Idx zero{0, 0, 0};
  if (!std::binary_search(indices_.begin(), indices_.end(), zero))
    throw ValidationError("WindowSet: must contain 0");
  for (const auto& i : indices_) {
    Idx neg{-i[0], -i[1], -i[2]};
    if (!std::binary_search(indices_.begin(), indices_.end(), neg))
      throw ValidationError("WindowSet: not symmetric");
  }
}

bool index_in_ball(const Idx& i, int dim, const Rational& step, const Rational& r) {
  if (!(r >= Rational(0))) return false;
  __int128 n2 = 0;
  for (int a = 0; a < dim; ++a) n2 += static_cast<__int128>(i[a]) * i[a];
  // |i| * step <= r  <=>  n2 * (step_num * r_den)^2 <= (r_num * step_den)^2
  __int128 lhs_f = static_cast<__int128>(step.num()) * r.den();
  __int128 rhs_f = static_cast<__int128>(r.num()) * step.den();
  return n2 * lhs_f * lhs_f <= rhs_f * rhs_f;
}

WindowSet rasterize_ball(int dim, const Rational& step, const Rational& r) {
  if (!(r >= Rational(0))) throw ValidationError("rasterize_ball: r must be >= 0");
  std::int64_t R = static_cast<std::int64_t>(std::floor(r.value() / step.value())) + 1;
  std::vector<Idx> out;
  auto push_if = [&](Idx i) {
    if (index_in_ball(i, dim, step, r)) out.push_back(i);
  };
  if (dim == 1) {
    for (std::int64_t a = -R; a <= R; ++a) push_if({a, 0, 0});
  } else if (dim == 2) {
    for (std::int64_t a = -R; a <= R; ++a)
      for (std::int64_t b = -R; b <= R; ++b) push_if({a, b, 0});
  } else {
    for (std::int64_t a = -R; a <= R; ++a)
      for (std::int64_t b = -R; b <= R; ++b)
        for (std::int64_t c = -R; c <= R; ++c) push_if({a, b, c});
  }
  return WindowSet(dim, step, std::move(out));
}

GridMeasure cantor_measure(const CantorSpec& spec) {
  spec.validate();
  const std::int64_t K = spec.base;
  std::vector<std::int64_t> nodes{0};
  std::mt19937_64 rng(spec.seed.value_or(0));
  std::vector<int> pool(spec.base);
  for (int lev = 0; lev < spec.levels; ++lev) {
    std::vector<std::int64_t> next;
    next.reserve(nodes.size() * spec.digits.size());
    for (std::int64_t a : nodes) {
      if (spec.seed) {
        // partial Fisher-Yates: uniformly random |digits|-subset per node
        for (int i = 0; i < spec.base; ++i) pool[i] = i;
        for (std::size_t i = 0; i < spec.digits.size(); ++i) {
          std::uint64_t j = i + rng() % (pool.size() - i);
          std::swap(pool[i], pool[j]);
        }
        std::vector<int> chosen(pool.begin(), pool.begin() + spec.digits.size());
        std::sort(chosen.begin(), chosen.end());
        for (int d : chosen) next.push_back(a * K + d);
      } else {
        for (int d : spec.digits) next.push_back(a * K + d);
      }
    }
    nodes = std::move(next);
    if (nodes.size() > (std::size_t{1} << 26))
      throw SizeError("cantor_measure: too many surviving cells");
  }
  std::sort(nodes.begin(), nodes.end());
  const double mass = 1.0 / static_cast<double>(nodes.size());
  std::vector<std::pair<Idx, double>> cells;
  cells.reserve(nodes.size());
  for (std::int64_t a : nodes) cells.push_back({{a, 0, 0}, mass});
  Rational step = Rational::pow(spec.base, -spec.levels);
  // centers at (a + 1/2) * step: the midpoints of the surviving digit intervals
  std::array<Rational, 3> origin{step * Rational(1, 2), Rational(0), Rational(0)};
  GridMeasure mu(1, step, origin, std::move(cells));
  mu.set_provenance(spec);
  return mu;
}

GridMeasure disk_measure(int dim, int delta_int, const Rational& step) {
  if (dim < 1 || dim > 3) throw ValidationError("disk_measure: dim must be in {1,2,3}");
  if (delta_int < 1 || delta_int > dim)
    throw ValidationError("disk_measure: need 1 <= delta_int <= dim");
  if (!(step < Rational(1)))
    throw ValidationError("disk_measure: step >= 1 gives a degenerate grid");
  if (!step.positive()) throw ValidationError("disk_measure: step must be > 0");
  std::int64_t R = step.den() / step.num();  // floor(1/step)
  std::vector<Idx> pts;
  Rational one(1);
  if (delta_int == 1) {
    for (std::int64_t a = -R; a <= R; ++a)
      if (index_in_ball({a, 0, 0}, 1, step, one)) pts.push_back({a, 0, 0});
  } else if (delta_int == 2) {
    for (std::int64_t a = -R; a <= R; ++a)
      for (std::int64_t b = -R; b <= R; ++b)
        if (index_in_ball({a, b, 0}, 2, step, one)) pts.push_back({a, b, 0});
  } else {
    for (std::int64_t a = -R; a <= R; ++a)
      for (std::int64_t b = -R; b <= R; ++b)
        for (std::int64_t c = -R; c <= R; ++c)
          if (index_in_ball({a, b, c}, 3, step, one)) pts.push_back({a, b, c});
  }
  const double mass = 1.0 / static_cast<double>(pts.size());
  std::vector<std::pair<Idx, double>> cells;
  cells.reserve(pts.size());
  for (const auto& p : pts) cells.push_back({p, mass});
  return GridMeasure(dim, step, {Rational(0), Rational(0), Rational(0)}, std::move(cells));
}

GridMeasure product_measure(const GridMeasure& a, const GridMeasure& b) {
  if (a.step() != b.step()) throw ValidationError("product_measure: mismatched steps");
  int dim = a.dim() + b.dim();
  if (dim > 3) throw ValidationError("product_measure: combined dim > 3");
  std::array<Rational, 3> origin{Rational(0), Rational(0), Rational(0)};
  for (int i = 0; i < a.dim(); ++i) origin[i] = a.origin()[i];
  for (int i = 0; i < b.dim(); ++i) origin[a.dim() + i] = b.origin()[i];
  std::vector<std::pair<Idx, double>> cells;
  cells.reserve(a.cells().size() * b.cells().size());
  for (const auto& [ia, ma] : a.cells())
    for (const auto& [ib, mb] : b.cells()) {
      Idx i{0, 0, 0};
      for (int k = 0; k < a.dim(); ++k) i[k] = ia[k];
      for (int k = 0; k < b.dim(); ++k) i[a.dim() + k] = ib[k];
      cells.push_back({i, ma * mb});
    }
  BoundingBox box;
  for (int k = 0; k < a.dim(); ++k) { box.lo[k] = a.box().lo[k]; box.hi[k] = a.box().hi[k]; }
  for (int k = 0; k < b.dim(); ++k) {
    box.lo[a.dim() + k] = b.box().lo[k];
    box.hi[a.dim() + k] = b.box().hi[k];
  }
  return GridMeasure(dim, a.step(), origin, std::move(cells), box);
}

std::vector<Idx> neighborhood_support(const GridMeasure& mu, const Rational& r) {
  if (r < mu.step()) throw ValidationError("neighborhood_support: r < step");
  WindowSet ball = rasterize_ball(mu.dim(), mu.step(), r);
  std::vector<Idx> out;
  out.reserve(mu.cells().size() * ball.indices().size());
  for (const auto& [i, m] : mu.cells())
    for (const auto& o : ball.indices())
      out.push_back({i[0] + o[0], i[1] + o[1], i[2] + o[2]});
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace fractlab

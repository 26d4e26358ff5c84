#include "fractlab/kadic.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "fractlab/dense.hpp"
#include "fractlab/energy.hpp"
#include "fractlab/errors.hpp"

namespace fractlab {

namespace {

std::int64_t int_pow(std::int64_t b, int e) {
  std::int64_t p = 1;
  for (int i = 0; i < e; ++i) {
    if (p > (std::int64_t{1} << 62) / b) throw SizeError("kadic: power overflow");
    p *= b;
  }
  return p;
}

std::int64_t isqrt_floor(std::int64_t k) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(k)));
  while ((r + 1) * (r + 1) <= k) ++r;
  while (r * r > k) --r;
  return r;
}

}  // namespace

KAdicTree::KAdicTree(const GridMeasure& mu, int K, int depth) : K_(K), depth_(depth) {
  if (mu.dim() != 1) throw ValidationError("KAdicTree: edges machinery is one-dimensional");
  if (K < 4) throw ValidationError("KAdicTree: base must be >= 4");
  if (depth < 0) throw ValidationError("KAdicTree: negative depth");
  Rational leaf = Rational::pow(K, -depth);
  if (leaf < mu.step()) throw ValidationError("KAdicTree: leaves finer than the grid step");

  active_.assign(depth + 1, {});
  mass_.assign(depth + 1, {});
  const std::int64_t Kd = int_pow(K, depth);
  for (const auto& [i, m] : mu.cells()) {
    Rational c = mu.center_rat(0, i[0]);
    // leaf index floor(c * K^depth), exact
    std::int64_t j = static_cast<std::int64_t>(
        floor_div128(static_cast<__int128>(c.num()) * Kd, static_cast<__int128>(c.den())));
    for (int lev = depth; lev >= 0; --lev) {
      auto& act = active_[lev];
      auto& ms = mass_[lev];
      if (!act.empty() && act.back() == j) {
        ms.back() += m;
      } else {
        act.push_back(j);  // cells sorted by index, so j is nondecreasing
        ms.push_back(m);
      }
      j = floor_div(j, K);
    }
  }
}

bool KAdicTree::active(int level, std::int64_t j) const {
  if (level < 0 || level > depth_) return false;
  const auto& a = active_[level];
  return std::binary_search(a.begin(), a.end(), j);
}

double KAdicTree::interval_mass(int level, std::int64_t j) const {
  const auto& a = active_[level];
  auto it = std::lower_bound(a.begin(), a.end(), j);
  if (it == a.end() || *it != j) return 0.0;
  return mass_[level][static_cast<std::size_t>(it - a.begin())];
}

bool KAdicTree::paper_regime() const {
  if (K_ < 1000 || K_ % 100 != 0) return false;
  std::int64_t r = isqrt_floor(K_);
  return r * r == K_;
}

KAdicTree build_tree(const GridMeasure& mu, int K, int depth) { return KAdicTree(mu, K, depth); }

std::vector<std::tuple<int, std::int64_t, std::int64_t>> porosity_violations(
    const KAdicTree& tree) {
  std::int64_t root = isqrt_floor(tree.base());
  std::int64_t threshold = (root * root == tree.base()) ? root : root + 1;  // ceil(sqrt K)
  std::vector<std::tuple<int, std::int64_t, std::int64_t>> out;
  for (int lev = 0; lev <= tree.depth(); ++lev) {
    const auto& act = tree.active_at(lev);
    std::size_t k = 0;
    while (k < act.size()) {
      std::size_t e = k;
      while (e + 1 < act.size() && act[e + 1] == act[e] + 1) ++e;
      std::int64_t len = static_cast<std::int64_t>(e - k + 1);
      if (len >= threshold) out.push_back({lev, act[k], len});
      k = e + 1;
    }
  }
  return out;
}

std::vector<std::int64_t> left_edges(const KAdicTree& tree, int n) {
  if (n < 1) throw ValidationError("left_edges: n must be >= 1");
  if (2 * n > tree.depth()) throw ValidationError("left_edges: 2n exceeds tree depth");
  const int lev = 2 * n;
  const std::int64_t K = tree.base();
  const auto& act = tree.active_at(lev);
  std::vector<std::int64_t> out;
  for (std::int64_t j : act) {
    std::int64_t parent = floor_div(j, K);
    // any active left sibling?  the active list is sorted, so the first
    // active index >= parent*K is either j itself or a left sibling
    auto it = std::lower_bound(act.begin(), act.end(), parent * K);
    if (it != act.end() && *it < j) continue;
    if (tree.active(lev - 1, parent - 1)) continue;  // parent's left shift
    out.push_back(j);
  }
  return out;
}

std::int64_t near_edge_cap(int K) {
  std::int64_t root = isqrt_floor(K);
  std::int64_t ceil_root = (root * root == K) ? root : root + 1;
  return std::max<std::int64_t>((K + 99) / 100, ceil_root + 1);
}

std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> near_edges(const KAdicTree& tree,
                                                                           int n) {
  const int lev = 2 * n;
  const std::int64_t cap = near_edge_cap(tree.base());
  std::vector<std::pair<std::int64_t, std::vector<std::int64_t>>> out;
  for (std::int64_t j : left_edges(tree, n)) {
    std::vector<std::int64_t> run{j};
    std::int64_t t = j + 1;
    while (static_cast<std::int64_t>(run.size()) < cap) {
      run.push_back(t);
      if (!tree.active(lev, t)) break;  // the rightmost near-edge may be inactive
      ++t;
    }
    out.push_back({j, std::move(run)});
  }
  return out;
}

std::vector<EdgeReport> exceptional_sets(const KAdicTree& tree, const GridMeasure& mu, int N) {
  if (N < 0) throw ValidationError("exceptional_sets: N must be >= 0");
  if (2 * N > tree.depth()) throw ValidationError("exceptional_sets: 2N exceeds tree depth");
  if (N > 16) throw SizeError("exceptional_sets: N > 16 exceeds the mask width");
  double tree_total = 0.0;
  for (auto j : tree.active_at(0)) tree_total += tree.interval_mass(0, j);
  if (std::abs(tree_total - mu.total_mass()) > 1e-9 * std::max(1.0, mu.total_mass()))
    throw ValidationError("exceptional_sets: tree does not belong to this measure");
  const std::int64_t K = tree.base();

  // near-edge index sets per scale
  std::vector<std::vector<std::int64_t>> ne(N + 1);
  std::vector<std::int64_t> le_count(N + 1, 0);
  for (int np = 1; np <= N; ++np) {
    auto lists = near_edges(tree, np);
    le_count[np] = static_cast<std::int64_t>(lists.size());
    for (const auto& [edge, run] : lists) ne[np].insert(ne[np].end(), run.begin(), run.end());
    std::sort(ne[np].begin(), ne[np].end());
    ne[np].erase(std::unique(ne[np].begin(), ne[np].end()), ne[np].end());
  }

  std::vector<EdgeReport> reports;
  for (int n = 0; n <= N; ++n) {
    const int lev = 2 * n;
    const auto& act = tree.active_at(lev);
    // coverage mask per active interval: bit n' set iff the level-2n'
    // ancestor is a near-edge at scale n'
    std::unordered_map<std::uint32_t, double> weight;
    for (std::size_t k = 0; k < act.size(); ++k) {
      std::uint32_t msk = 0;
      for (int np = 1; np <= n; ++np) {
        std::int64_t anc = floor_div(act[k], int_pow(K, 2 * (n - np)));
        if (std::binary_search(ne[np].begin(), ne[np].end(), anc)) msk |= (1u << np);
      }
      weight[msk] += tree.interval_mass(lev, act[k]);
    }
    double total = 0.0;
    for (const auto& [m1, w1] : weight)
      for (const auto& [m2, w2] : weight)
        if ((m1 & m2) == 0) total += w1 * w2;

    EdgeReport rep;
    rep.n = n;
    rep.interval_length = std::pow(static_cast<double>(K), -2.0 * n);
    rep.active_count = static_cast<std::int64_t>(act.size());
    if (n >= 1) {
      rep.left_edge_count = le_count[n];
      std::int64_t cnt = 0;
      for (const auto& [edge, run] : near_edges(tree, n))
        cnt += static_cast<std::int64_t>(run.size());
      rep.near_edge_count = cnt;
    }
    rep.exceptional_mass = total;
    reports.push_back(rep);
  }
  return reports;
}

double strip_mass(const GridMeasure& mu, double z, double r) {
  if (mu.dim() != 1) throw ValidationError("strip_mass: dim must be 1");
  if (r < 0) throw ValidationError("strip_mass: r must be >= 0");
  std::vector<std::pair<double, double>> pts;  // (center, mass), centers in [-1,1]
  for (const auto& [i, m] : mu.cells()) {
    Rational c = mu.center_rat(0, i[0]);
    if (Rational(-1) <= c && c <= Rational(1)) pts.push_back({c.value(), m});
  }
  double total = 0.0;
  for (const auto& [x, mx] : pts)
    for (const auto& [y, my] : pts)
      if (std::abs(x + y - z) <= r) total += mx * my;
  return total;
}

double energy_bound_via_strips(const GridMeasure& mu, double r) {
  if (mu.dim() != 1) throw ValidationError("energy_bound_via_strips: dim must be 1");
  if (!(r > 0)) throw ValidationError("energy_bound_via_strips: r must be > 0");
  if (mu.cells().empty()) return 0.0;
  // restrict to [-1,1] and form the sum distribution once
  std::vector<std::pair<Idx, double>> kept;
  for (const auto& [i, m] : mu.cells()) {
    Rational c = mu.center_rat(0, i[0]);
    if (Rational(-1) <= c && c <= Rational(1)) kept.push_back({i, m});
  }
  if (kept.empty()) return 0.0;
  GridMeasure restricted(1, mu.step(), mu.origin(), std::move(kept), mu.box());
  DenseD d = densify(restricted);
  DenseD s = self_convolve(d, restricted.support_size(), kDefaultFftBudget);
  std::vector<double> prefix(s.v.size() + 1, 0.0);
  for (std::size_t k = 0; k < s.v.size(); ++k) prefix[k + 1] = prefix[k] + s.v[k];
  const double o2 = 2.0 * restricted.origin()[0].value();
  const double step = restricted.step().value();
  // sum position of index a: o2 + a*step, a in [s.lo, s.lo+s.n)
  // strip membership shares one predicate with strip_mass so boundary ties
  // resolve identically on both routes
  auto inside = [&](std::int64_t a_abs, double z) {
    return std::abs(o2 + static_cast<double>(a_abs) * step - z) <= r;
  };
  double acc = 0.0;
  std::int64_t steps = static_cast<std::int64_t>(std::floor(6.0 / r));
  for (std::int64_t k = 0; k <= steps; ++k) {
    double z = -3.0 + static_cast<double>(k) * r;
    std::int64_t lo = static_cast<std::int64_t>(std::ceil((z - r - o2) / step)) - 1;
    std::int64_t hi = static_cast<std::int64_t>(std::floor((z + r - o2) / step)) + 1;
    lo = std::max(lo, s.lo[0]);
    hi = std::min(hi, s.lo[0] + s.n[0] - 1);
    while (lo <= hi && !inside(lo, z)) ++lo;
    while (hi >= lo && !inside(hi, z)) --hi;
    double m2 = (hi >= lo) ? prefix[hi - s.lo[0] + 1] - prefix[lo - s.lo[0]] : 0.0;
    acc += m2 * m2;
  }
  return acc;  // r^{-1} * sum * dz with dz = r
}

}  // namespace fractlab

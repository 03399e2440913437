#include "lfp/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "lfp/lp.hpp"

namespace lfp {

namespace {
constexpr double kSimplexTol = 1e-12;
constexpr double kCoreSlack = 1e-9;
constexpr double kAtomPrune = 1e-14;
}  // namespace

OutcomeSpace::OutcomeSpace(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  const int m = static_cast<int>(labels_.size());
  if (m < 2 || m > 20)
    throw std::invalid_argument("OutcomeSpace: need 2 <= m <= 20");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (labels_[i] == labels_[j])
        throw std::invalid_argument("OutcomeSpace: duplicate label " +
                                    labels_[i]);
}

int OutcomeSpace::index_of(const std::string& label) const {
  for (int i = 0; i < size(); ++i)
    if (labels_[i] == label) return i;
  return -1;
}

RandomSetDistribution::RandomSetDistribution(int m,
                                             std::vector<RandomSetAtom> atoms)
    : m_(m) {
  if (m < 1 || m > 20)
    throw std::invalid_argument("RandomSetDistribution: bad m");
  const Mask full = (Mask{1} << m) - 1;
  std::map<Mask, double> merged;
  for (const auto& a : atoms) {
    if (a.set == 0)
      throw std::invalid_argument("RandomSetDistribution: empty atom");
    if (a.set > full)
      throw std::invalid_argument("RandomSetDistribution: mask out of range");
    if (a.mass < -kAtomPrune)
      throw std::invalid_argument("RandomSetDistribution: negative mass");
    merged[a.set] += a.mass;
  }
  double total = 0.0;
  for (auto& [set, mass] : merged) {
    if (mass < kAtomPrune) continue;  // quadrature noise
    total += mass;
  }
  if (std::abs(total - 1.0) > 1e-6)
    throw std::invalid_argument("RandomSetDistribution: masses sum to " +
                                std::to_string(total));
  atoms_.reserve(merged.size());
  for (auto& [set, mass] : merged) {
    if (mass < kAtomPrune) continue;
    atoms_.push_back({set, mass / total});
  }
  if (atoms_.empty())
    throw std::invalid_argument("RandomSetDistribution: no atoms");
}

Capacity::Capacity(int m, std::vector<double> values)
    : m_(m), values_(std::move(values)) {
  if (m < 1 || m > 20) throw std::invalid_argument("Capacity: bad m");
  const std::size_t n = std::size_t{1} << m;
  if (values_.size() != n)
    throw std::invalid_argument("Capacity: wrong value count");
  if (std::abs(values_[0]) > kSimplexTol)
    throw std::invalid_argument("Capacity: nu(empty) != 0");
  if (std::abs(values_[n - 1] - 1.0) > 1e-9)
    throw std::invalid_argument("Capacity: nu(full) != 1");
  values_[0] = 0.0;
  values_[n - 1] = 1.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (values_[a] < -kCoreSlack || values_[a] > 1.0 + kCoreSlack)
      throw std::invalid_argument("Capacity: value outside [0,1]");
    // monotonicity: compare A against A with one element removed
    for (int y = 0; y < m; ++y) {
      if (!(a & (Mask{1} << y))) continue;
      if (values_[a & ~(Mask{1} << y)] > values_[a] + kCoreSlack)
        throw std::invalid_argument("Capacity: not monotone");
    }
  }
}

Density::Density(std::vector<double> p) : probs(std::move(p)) {
  double total = 0.0;
  for (double v : probs) {
    if (v < -kSimplexTol) throw std::invalid_argument("Density: negative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("Density: sums to " + std::to_string(total));
}

double Density::mass(Mask a) const {
  double s = 0.0;
  for (int y = 0; y < m(); ++y)
    if (a & (Mask{1} << y)) s += probs[y];
  return s;
}

Capacity containment_from_random_set(const RandomSetDistribution& d) {
  const std::size_t n = std::size_t{1} << d.m();
  std::vector<double> v(n, 0.0);
  for (const auto& atom : d.atoms())
    for (std::size_t a = 0; a < n; ++a)
      if ((atom.set & ~static_cast<Mask>(a)) == 0) v[a] += atom.mass;
  v[n - 1] = 1.0;
  return Capacity(d.m(), std::move(v));
}

Capacity conjugate(const Capacity& c) {
  const Mask full = c.full_mask();
  std::vector<double> v(std::size_t{1} << c.m());
  for (Mask a = 0; a <= full; ++a) v[a] = 1.0 - c(full & ~a);
  return Capacity(c.m(), std::move(v));
}

namespace {

bool k_monotone_holds(const Capacity& c, const std::vector<Mask>& tuple) {
  const int k = static_cast<int>(tuple.size());
  Mask uni = 0;
  for (Mask a : tuple) uni |= a;
  double rhs = 0.0;
  for (Mask sel = 1; sel < (Mask{1} << k); ++sel) {
    Mask inter = c.full_mask();
    for (int i = 0; i < k; ++i)
      if (sel & (Mask{1} << i)) inter &= tuple[i];
    rhs += (popcount(sel) % 2 == 1) ? c(inter) : -c(inter);
  }
  return c(uni) >= rhs - 1e-9;
}

// combinations with repetition over subset masks (the inequality is
// symmetric in the tuple)
bool k_monotone_exhaustive(const Capacity& c, int k) {
  const Mask n = Mask{1} << c.m();
  std::vector<Mask> tuple(k, 0);
  while (true) {
    if (!k_monotone_holds(c, tuple)) return false;
    int pos = k - 1;
    while (pos >= 0 && tuple[pos] == n - 1) --pos;
    if (pos < 0) return true;
    const Mask next = tuple[pos] + 1;
    for (int i = pos; i < k; ++i) tuple[i] = next;
  }
}

}  // namespace

bool check_k_monotone(const Capacity& c, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("check_k_monotone: k < 2");
  if (c.m() <= 5) return k_monotone_exhaustive(c, k);
  // splitmix64 sampling of tuples
  std::uint64_t s = seed;
  auto next = [&s]() {
    s += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  const Mask n = Mask{1} << c.m();
  std::vector<Mask> tuple(k);
  for (int trial = 0; trial < 10000; ++trial) {
    for (int i = 0; i < k; ++i) tuple[i] = static_cast<Mask>(next() % n);
    if (!k_monotone_holds(c, tuple)) return false;
  }
  return true;
}

bool core_membership(const Density& q, const Capacity& c) {
  if (q.m() != c.m())
    throw std::invalid_argument("core_membership: dimension mismatch");
  const Mask full = c.full_mask();
  for (Mask a = 1; a < full; ++a)
    if (q.mass(a) < c(a) - kCoreSlack) return false;
  return true;
}

double lower_envelope(const Capacity& c, Mask a) {
  const int m = c.m();
  const Mask full = c.full_mask();
  if (a > full) throw std::invalid_argument("lower_envelope: bad mask");
  LpProblem prob;
  prob.c.assign(m, 0.0);
  for (int y = 0; y < m; ++y)
    if (a & (Mask{1} << y)) prob.c[y] = 1.0;
  LpConstraint sum_row;
  sum_row.a.assign(m, 1.0);
  sum_row.rel = Relation::Eq;
  sum_row.b = 1.0;
  prob.rows.push_back(sum_row);
  for (Mask b = 1; b < full; ++b) {
    if (c(b) <= 0.0) continue;
    LpConstraint row;
    row.a.assign(m, 0.0);
    for (int y = 0; y < m; ++y)
      if (b & (Mask{1} << y)) row.a[y] = 1.0;
    row.rel = Relation::GreaterEq;
    row.b = c(b);
    prob.rows.push_back(row);
  }
  LpSolution sol = lp_solve(prob);
  if (sol.status == SolveStatus::Infeasible)
    throw CoreInfeasible("lower_envelope: empty core");
  return sol.objective;
}

double choquet_integral(const std::vector<double>& f, const Capacity& c) {
  const int m = c.m();
  if (static_cast<int>(f.size()) != m)
    throw std::invalid_argument("choquet_integral: dimension mismatch");
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&f](int i, int j) { return f[i] < f[j]; });
  // layer cake: f_(1) * nu(full) + sum (f_(i) - f_(i-1)) nu({f >= f_(i)})
  double total = f[order[0]];
  Mask level = c.full_mask();
  for (int i = 1; i < m; ++i) {
    level &= ~(Mask{1} << order[i - 1]);
    total += (f[order[i]] - f[order[i - 1]]) * c(level);
  }
  return total;
}

}  // namespace lfp

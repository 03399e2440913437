#include "lfp/capacity.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "lfp/solvers.hpp"

using namespace lfp;

namespace {

RandomSetDistribution random_rsd(int m, std::mt19937_64& rng) {
  std::uniform_int_distribution<Mask> pick_set(1, (Mask{1} << m) - 1);
  std::uniform_real_distribution<double> pick_mass(0.05, 1.0);
  const int n_atoms = 1 + static_cast<int>(rng() % 5);
  std::vector<RandomSetAtom> atoms;
  double total = 0.0;
  for (int i = 0; i < n_atoms; ++i) {
    atoms.push_back({pick_set(rng), pick_mass(rng)});
    total += atoms.back().mass;
  }
  for (auto& a : atoms) a.mass /= total;
  return RandomSetDistribution(m, atoms);
}

// brute-force core vertex enumeration: intersect the simplex affine hull with
// every (m-1)-subset of active core constraints and keep the feasible points
std::vector<std::vector<double>> core_vertices(const Capacity& c) {
  const int m = c.m();
  const Mask full = c.full_mask();
  std::vector<Mask> events;
  for (Mask a = 1; a < full; ++a) events.push_back(a);
  std::vector<std::vector<double>> verts;

  std::vector<int> pick(m - 1);
  auto try_combo = [&](const std::vector<int>& sel) {
    // solve: sum q = 1, Q(A_j) = nu(A_j) for the selected events
    const int n = m;
    std::vector<std::vector<double>> M(n, std::vector<double>(n + 1, 0.0));
    for (int j = 0; j < n; ++j) M[0][j] = 1.0;
    M[0][n] = 1.0;
    for (int r = 1; r < n; ++r) {
      const Mask a = events[sel[r - 1]];
      for (int y = 0; y < m; ++y)
        if (a & (Mask{1} << y)) M[r][y] = 1.0;
      M[r][n] = c(a);
    }
    // Gaussian elimination
    for (int col = 0, row = 0; col < n && row < n; ++col) {
      int piv = -1;
      for (int r = row; r < n; ++r)
        if (std::abs(M[r][col]) > 1e-9) { piv = r; break; }
      if (piv < 0) return;
      std::swap(M[piv], M[row]);
      for (int r = 0; r < n; ++r) {
        if (r == row) continue;
        const double f = M[r][col] / M[row][col];
        for (int c2 = col; c2 <= n; ++c2) M[r][c2] -= f * M[row][c2];
      }
      ++row;
    }
    std::vector<double> q(m);
    for (int r = 0; r < n; ++r) {
      int lead = -1;
      for (int c2 = 0; c2 < n; ++c2)
        if (std::abs(M[r][c2]) > 1e-9) { lead = c2; break; }
      if (lead < 0) {
        if (std::abs(M[r][n]) > 1e-9) return;  // inconsistent
        continue;
      }
      q[lead] = M[r][n] / M[r][lead];
    }
    for (double v : q)
      if (v < -1e-9) return;
    for (Mask a = 1; a < full; ++a) {
      double s = 0.0;
      for (int y = 0; y < m; ++y)
        if (a & (Mask{1} << y)) s += q[y];
      if (s < c(a) - 1e-9) return;
    }
    verts.push_back(q);
  };

  const int k = static_cast<int>(events.size());
  std::vector<int> sel(m - 1, 0);
  // all (m-1)-tuples with increasing indices
  auto rec = [&](auto&& self, int depth, int start) -> void {
    if (depth == m - 1) {
      try_combo(sel);
      return;
    }
    for (int i = start; i < k; ++i) {
      sel[depth] = i;
      self(self, depth + 1, i + 1);
    }
  };
  rec(rec, 0, 0);
  return verts;
}

}  // namespace

TEST_CASE("containment functional from atom list") {
  // atoms {({a},0.2),({b},0.3),({a,b},0.5)}
  RandomSetDistribution d(2, {{0b01, 0.2}, {0b10, 0.3}, {0b11, 0.5}});
  Capacity nu = containment_from_random_set(d);
  CHECK(nu(0b01) == doctest::Approx(0.2));
  CHECK(nu(0b10) == doctest::Approx(0.3));
  CHECK(nu(0b11) == doctest::Approx(1.0));
  CHECK(nu(0) == 0.0);
}

TEST_CASE("vacuous belief function") {
  RandomSetDistribution d(3, {{0b111, 1.0}});
  Capacity nu = containment_from_random_set(d);
  for (Mask a = 0; a < 7; ++a) CHECK(nu(a) == 0.0);
  CHECK(nu(7) == 1.0);
}

TEST_CASE("singleton atoms give an additive capacity") {
  RandomSetDistribution d(2, {{0b01, 0.1}, {0b10, 0.9}});
  Capacity nu = containment_from_random_set(d);
  CHECK(nu(0b01) == doctest::Approx(0.1));
  CHECK(nu(0b10) == doctest::Approx(0.9));
}

TEST_CASE("conjugate") {
  RandomSetDistribution d(2, {{0b01, 0.2}, {0b10, 0.3}, {0b11, 0.5}});
  Capacity nu = containment_from_random_set(d);
  Capacity star = conjugate(nu);
  CHECK(star(0b01) == doctest::Approx(0.7));  // 1 - nu({b})
  CHECK(star(0b10) == doctest::Approx(0.8));

  SUBCASE("involution") {
    Capacity back = conjugate(star);
    for (Mask a = 0; a <= 3; ++a) CHECK(back(a) == doctest::Approx(nu(a)));
  }
  SUBCASE("additive capacity is self-conjugate") {
    RandomSetDistribution add(2, {{0b01, 0.1}, {0b10, 0.9}});
    Capacity anu = containment_from_random_set(add);
    Capacity astar = conjugate(anu);
    for (Mask a = 0; a <= 3; ++a) CHECK(astar(a) == doctest::Approx(anu(a)));
  }
  SUBCASE("vacuous capacity conjugate is 1 on nonempty sets") {
    RandomSetDistribution vac(2, {{0b11, 1.0}});
    Capacity vstar = conjugate(containment_from_random_set(vac));
    CHECK(vstar(0b01) == doctest::Approx(1.0));
    CHECK(vstar(0b10) == doctest::Approx(1.0));
    CHECK(vstar(0) == 0.0);
  }
}

TEST_CASE("k-monotonicity oracle") {
  SUBCASE("rejects k < 2") {
    RandomSetDistribution d(2, {{0b11, 1.0}});
    Capacity nu = containment_from_random_set(d);
    CHECK_THROWS(check_k_monotone(nu, 1));
  }
  SUBCASE("belief functions are totally monotone (m <= 4 exhaustive)") {
    std::mt19937_64 rng(7);
    for (int m = 2; m <= 4; ++m) {
      for (int rep = 0; rep < 10; ++rep) {
        Capacity nu = containment_from_random_set(random_rsd(m, rng));
        for (int k = 2; k <= m; ++k) CHECK(check_k_monotone(nu, k));
      }
    }
  }
  SUBCASE("hand-built non-2-monotone capacity") {
    // nu({a}) = nu({b}) = 0.6, nu({a,b}) = 1:
    // nu(AuB) + nu(AnB) = 1 < 1.2 = nu(A) + nu(B)
    Capacity nu(2, {0.0, 0.6, 0.6, 1.0});
    CHECK_FALSE(check_k_monotone(nu, 2));
  }
  SUBCASE("additive capacity is k-monotone for any k") {
    RandomSetDistribution d(3, {{0b001, 0.2}, {0b010, 0.3}, {0b100, 0.5}});
    Capacity nu = containment_from_random_set(d);
    for (int k = 2; k <= 3; ++k) CHECK(check_k_monotone(nu, k));
  }
}

TEST_CASE("core membership") {
  RandomSetDistribution d(2, {{0b01, 0.2}, {0b10, 0.3}, {0b11, 0.5}});
  Capacity nu = containment_from_random_set(d);
  CHECK(core_membership(Density({0.45, 0.55}), nu));
  CHECK_FALSE(core_membership(Density({0.1, 0.9}), nu));

  RandomSetDistribution add(2, {{0b01, 0.1}, {0b10, 0.9}});
  Capacity anu = containment_from_random_set(add);
  CHECK(core_membership(Density({0.1, 0.9}), anu));
}

TEST_CASE("lower envelope equals the containment functional (exactness)") {
  RandomSetDistribution d(2, {{0b01, 0.2}, {0b10, 0.3}, {0b11, 0.5}});
  Capacity nu = containment_from_random_set(d);
  CHECK(lower_envelope(nu, 0b01) == doctest::Approx(0.2).epsilon(1e-7));
  CHECK(lower_envelope(nu, 0b11) == doctest::Approx(1.0));

  RandomSetDistribution add(2, {{0b01, 0.1}, {0b10, 0.9}});
  Capacity anu = containment_from_random_set(add);
  CHECK(lower_envelope(anu, 0b01) == doctest::Approx(0.1));

  SUBCASE("fuzz: exactness for m <= 4") {
    std::mt19937_64 rng(11);
    for (int m = 2; m <= 4; ++m) {
      for (int rep = 0; rep < 20; ++rep) {
        Capacity nu = containment_from_random_set(random_rsd(m, rng));
        for (Mask a = 1; a <= nu.full_mask(); ++a)
          CHECK(lower_envelope(nu, a) == doctest::Approx(nu(a)).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("Choquet integral") {
  RandomSetDistribution d(2, {{0b01, 0.2}, {0b10, 0.3}, {0b11, 0.5}});
  Capacity star = conjugate(containment_from_random_set(d));

  SUBCASE("normalization") {
    CHECK(choquet_integral({3.0, 3.0}, star) == doctest::Approx(3.0));
  }
  SUBCASE("single layer against the conjugate") {
    // f = (1, 0): integral = nu*({a}) = 0.7
    CHECK(choquet_integral({1.0, 0.0}, star) == doctest::Approx(0.7));
  }
  SUBCASE("additive capacity reduces to the ordinary expectation") {
    RandomSetDistribution add(3, {{0b001, 0.2}, {0b010, 0.3}, {0b100, 0.5}});
    Capacity anu = containment_from_random_set(add);
    std::vector<double> f = {1.5, -0.3, 2.0};
    const double expect = 1.5 * 0.2 - 0.3 * 0.3 + 2.0 * 0.5;
    CHECK(choquet_integral(f, anu) == doctest::Approx(expect));
  }
}

TEST_CASE("conjugate duality holds exactly") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    Capacity nu = containment_from_random_set(random_rsd(3, rng));
    Capacity star = conjugate(nu);
    const Mask full = nu.full_mask();
    for (Mask a = 0; a <= full; ++a)
      CHECK(nu(a) + star(full & ~a) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("Schmeidler identity: Choquet vs max over core vertices") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> fdist(0.0, 2.0);
  for (int m = 2; m <= 3; ++m) {
    for (int rep = 0; rep < 15; ++rep) {
      Capacity nu = containment_from_random_set(random_rsd(m, rng));
      Capacity star = conjugate(nu);
      auto verts = core_vertices(nu);
      REQUIRE(!verts.empty());
      std::vector<double> f(m);
      for (int y = 0; y < m; ++y) f[y] = fdist(rng);
      double best = -1.0;
      for (const auto& v : verts) {
        double s = 0.0;
        for (int y = 0; y < m; ++y) s += f[y] * v[y];
        best = std::max(best, s);
      }
      CHECK(choquet_integral(f, star) == doctest::Approx(best).epsilon(1e-6));
    }
  }
}

TEST_CASE("validation edge cases") {
  CHECK_THROWS(OutcomeSpace({"a"}));
  CHECK_THROWS(OutcomeSpace({"a", "a"}));
  CHECK_THROWS(RandomSetDistribution(2, {{0b00, 1.0}}));          // empty set
  CHECK_THROWS(RandomSetDistribution(2, {{0b01, 0.7}}));          // sum != 1
  // nu({a,b}) = 0.3 < nu({a}) = 0.5 is not monotone
  CHECK_THROWS(Capacity(3, {0.0, 0.5, 0.1, 0.3, 0.1, 0.6, 0.2, 1.0}));
  CHECK_THROWS(Density({0.5, 0.6}));

  // duplicate atom masks are merged, tiny masses pruned
  RandomSetDistribution d(2, {{0b01, 0.3}, {0b01, 0.3}, {0b10, 0.4},
                              {0b11, 1e-16}});
  CHECK(d.atoms().size() == 2);
  CHECK(d.atoms()[0].mass == doctest::Approx(0.6));
}

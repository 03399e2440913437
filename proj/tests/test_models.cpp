#include <cmath>
#include <map>

#include "doctest.h"
#include "lfp/models.hpp"
#include "lfp/normal.hpp"
#include "lfp/solvers.hpp"

using namespace lfp;

namespace {

double atom_mass(const RandomSetDistribution& d, Mask set) {
  for (const auto& atom : d.atoms())
    if (atom.set == set) return atom.mass;
  return 0.0;
}

}  // namespace

TEST_CASE("entry game masses: complete symmetric case") {
  EntryGameModel game;
  const GameMasses gm = game.masses({0.0, 0.0}, {});
  CHECK(gm.f00 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(gm.s01 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(gm.s10 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(gm.f11 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(gm.mult == 0.0);

  const RandomSetDistribution d = game.random_set({0.0, 0.0}, {});
  CHECK(d.atoms().size() == 4);  // multiplicity atom pruned
  for (const auto& atom : d.atoms()) CHECK(popcount(atom.set) == 1);
}

TEST_CASE("entry game masses: beta = (-1,-1) reference numbers") {
  EntryGameModel game;
  const GameMasses gm = game.masses({-1.0, -1.0}, {});
  const double phi1 = norm_cdf(1.0);  // 0.8413447460685429
  CHECK(gm.f00 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(gm.f11 == doctest::Approx((1 - phi1) * (1 - phi1)).epsilon(1e-12));
  CHECK(gm.mult ==
        doctest::Approx((phi1 - 0.5) * (phi1 - 0.5)).epsilon(1e-12));
  CHECK(gm.f11 == doctest::Approx(0.02517).epsilon(1e-3));
  CHECK(gm.s01 == doctest::Approx(0.30417).epsilon(1e-4));
  CHECK(gm.s10 == doctest::Approx(0.30417).epsilon(1e-4));
  CHECK(gm.mult == doctest::Approx(0.11651).epsilon(1e-4));

  const GameEtas e = game.etas(gm);
  CHECK(e.eta1 == doctest::Approx(0.72482).epsilon(1e-4));
  CHECK(e.eta2 == doctest::Approx(0.42068).epsilon(1e-4));
  CHECK(e.eta3 == doctest::Approx(0.30417).epsilon(1e-4));

  // containment bounds on {(1,0)}: nu = eta3, nu* = eta2
  const Capacity c = containment_from_random_set(game.random_set({-1, -1}, {}));
  CHECK(c(Mask{1} << 2) == doctest::Approx(e.eta3).epsilon(1e-12));
  CHECK(conjugate(c)(Mask{1} << 2) == doctest::Approx(e.eta2).epsilon(1e-12));
}

TEST_CASE("entry game masses partition the latent plane") {
  EntryGameModel game(1);
  for (double b1 : {0.0, -0.5, -1.5}) {
    for (double b2 : {-0.25, -2.0}) {
      for (double d1 : {-1.0, 0.5}) {
        for (double x1 : {-2.0, 1.0}) {
          const GameMasses gm =
              game.masses({b1, b2, d1, 0.75}, {x1, -1.0});
          CHECK(gm.f00 >= 0.0);
          CHECK(gm.s01 >= -1e-15);
          CHECK(gm.s10 >= -1e-15);
          CHECK(gm.f11 >= 0.0);
          CHECK(gm.mult >= 0.0);
          CHECK(gm.f00 + gm.s01 + gm.s10 + gm.f11 + gm.mult ==
                doctest::Approx(1.0).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("entry game: multiplicity mass weakly increases in |beta|") {
  EntryGameModel game;
  double prev = -1.0;
  for (double h = 0.0; h <= 2.0 + 1e-12; h += 0.1) {
    const double mult = game.masses({-h, -h}, {}).mult;
    CHECK(mult >= prev - 1e-12);
    prev = mult;
  }
}

TEST_CASE("entry game: quadrature latent approximates the closed form") {
  LatentSpec latent;
  latent.kind = LatentKind::FixedNodes;
  latent.nodes = gauss_hermite_normal(64, 2);
  EntryGameModel exact;
  EntryGameModel approx(0, latent);
  const GameMasses a = exact.masses({-1.0, -0.5}, {});
  const GameMasses b = approx.masses({-1.0, -0.5}, {});
  CHECK(b.f00 == doctest::Approx(a.f00).epsilon(0.02));
  CHECK(b.f11 == doctest::Approx(a.f11).epsilon(0.05));
  CHECK(b.mult == doctest::Approx(a.mult).epsilon(0.05));
  CHECK(b.f00 + b.s01 + b.s10 + b.f11 + b.mult ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entry game closed forms agree with the generic solvers") {
  EntryGameModel game;
  const std::vector<double> theta{-0.8, -1.3};
  const Capacity c = containment_from_random_set(game.random_set(theta, {}));
  const Density p{{0.2, 0.15, 0.45, 0.2}};

  const Density closed = game.lfp_closed_form(theta, {}, p);
  const Density barrier = lfp_density(c, p).first;
  for (int y = 0; y < 4; ++y)
    CHECK(closed[y] == doctest::Approx(barrier[y]).epsilon(1e-6));

  const Density kc = game.kl_closed_form(theta, {}, p);
  const Density kb = kl_projection(p, c).first;
  for (int y = 0; y < 4; ++y)
    CHECK(kc[y] == doctest::Approx(kb[y]).epsilon(1e-6));
}

TEST_CASE("entry game coarse classes count entrants") {
  EntryGameModel game;
  CHECK(game.coarse_class(0) == 0);  // (0,0)
  CHECK(game.coarse_class(1) == 1);  // (0,1)
  CHECK(game.coarse_class(2) == 1);  // (1,0)
  CHECK(game.coarse_class(3) == 2);  // (1,1)
  const auto probs = game.coarse_probs({-1.0, -1.0}, {});
  const GameMasses gm = game.masses({-1.0, -1.0}, {});
  CHECK(probs[0] == doctest::Approx(gm.f00));
  CHECK(probs[1] == doctest::Approx(1.0 - gm.f00 - gm.f11));
  CHECK(probs[2] == doctest::Approx(gm.f11));
}

TEST_CASE("entry game rejects positive strategic effects") {
  EntryGameModel game;
  CHECK_THROWS(game.masses({0.5, 0.0}, {}));
}

TEST_CASE("choice-set model: J=2 kappa=2 is complete") {
  LatentSpec latent;
  latent.kind = LatentKind::FixedNodes;
  latent.nodes = gauss_hermite_normal(8, 2);
  ChoiceSetModel model(2, 2, 1, latent);
  const RandomSetDistribution d =
      model.random_set({1.0}, {0.5, -0.5});
  double total = 0.0;
  for (const auto& atom : d.atoms()) {
    CHECK(popcount(atom.set) == 1);
    total += atom.mass;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("choice-set model: ordered utilities at a node give G = {0,1}") {
  LatentSpec latent;
  latent.kind = LatentKind::FixedNodes;
  latent.nodes.nodes = {{0.0, 0.0, 0.0}};
  latent.nodes.weights = {1.0};
  ChoiceSetModel model(3, 2, 1, latent);
  // utilities v = (3, 2, 1): alternative 0 wins {0,1} and {0,2},
  // alternative 1 wins {1,2}
  const RandomSetDistribution d =
      model.random_set({1.0}, {3.0, 2.0, 1.0});
  REQUIRE(d.atoms().size() == 1);
  CHECK(d.atoms()[0].set == Mask{0b011});
}

TEST_CASE("choice-set model validates its shape") {
  LatentSpec latent;
  latent.kind = LatentKind::FixedNodes;
  latent.nodes = gauss_hermite_normal(4, 3);
  CHECK_THROWS(ChoiceSetModel(13, 2, 1, latent));
  CHECK_THROWS(ChoiceSetModel(3, 1, 1, latent));
  CHECK_THROWS(ChoiceSetModel(3, 2, 1, LatentSpec{}));  // needs FixedNodes
}

TEST_CASE("panel model: breakpoint sweep enumerates the predicted paths") {
  LatentSpec latent;
  latent.kind = LatentKind::FixedNodes;
  latent.nodes.nodes = {{0.5, -0.5}};
  latent.nodes.weights = {1.0};
  PanelModel model(2, 1, latent);
  // theta = (coef, gamma) = (0, 0), x irrelevant: G = {(0,0),(1,0),(1,1)}
  const RandomSetDistribution d = model.random_set({0.0, 0.0}, {0.0, 0.0});
  REQUIRE(d.atoms().size() == 1);
  const Mask expected = (Mask{1} << 0) | (Mask{1} << 2) | (Mask{1} << 3);
  CHECK(d.atoms()[0].set == expected);
}

TEST_CASE("panel model: all-zeros and all-ones paths always predicted") {
  LatentSpec latent;
  latent.kind = LatentKind::FixedNodes;
  latent.nodes = gauss_hermite_normal(3, 3);
  PanelModel model(3, 1, latent);
  for (double gamma : {0.0, 0.4, 1.2}) {
    const RandomSetDistribution d =
        model.random_set({0.7, gamma}, {0.3, -0.2, 1.1});
    for (const auto& atom : d.atoms()) {
      CHECK(((atom.set >> 0) & 1) == 1);
      CHECK(((atom.set >> 7) & 1) == 1);
    }
  }
}

TEST_CASE("panel model validates its shape") {
  LatentSpec latent;
  latent.kind = LatentKind::FixedNodes;
  latent.nodes = gauss_hermite_normal(3, 5);
  CHECK_THROWS(PanelModel(5, 1, latent));  // outcome space 2^T > 20
  CHECK_THROWS(PanelModel(2, 1, LatentSpec{}));
}

TEST_CASE("model evaluations are deterministic") {
  LatentSpec latent;
  latent.kind = LatentKind::FixedNodes;
  latent.nodes = gauss_hermite_normal(16, 2);
  EntryGameModel a(0, latent), b(0, latent);
  const auto da = a.random_set({-0.6, -0.9}, {});
  const auto db = b.random_set({-0.6, -0.9}, {});
  REQUIRE(da.atoms().size() == db.atoms().size());
  for (std::size_t i = 0; i < da.atoms().size(); ++i) {
    CHECK(da.atoms()[i].set == db.atoms()[i].set);
    CHECK(da.atoms()[i].mass == db.atoms()[i].mass);
  }
  CHECK(atom_mass(da, Mask{0b0110}) > 0.0);
}

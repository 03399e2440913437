#include <array>
#include <cmath>

#include "doctest.h"
#include "lfp/models.hpp"
#include "lfp/normal.hpp"
#include "lfp/simulation.hpp"

using namespace lfp;

namespace {

std::array<double, 4> frequencies(const Dataset& data) {
  std::array<double, 4> freq{};
  for (const auto& obs : data.obs) freq[obs.y] += 1.0;
  for (double& f : freq) f /= data.n();
  return freq;
}

}  // namespace

TEST_CASE("simulate_dgp: complete model reproduces choice probabilities") {
  EntryGameModel game;
  const int n = 40000;
  const Dataset data = simulate_dgp(game, {0.0, 0.0}, {}, {}, n, 2024);
  const auto freq = frequencies(data);
  for (int y = 0; y < 4; ++y) CHECK(freq[y] == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("simulate_dgp: determinism and seed sensitivity") {
  EntryGameModel game;
  const Dataset a = simulate_dgp(game, {-1.0, -1.0}, {}, {}, 200, 7);
  const Dataset b = simulate_dgp(game, {-1.0, -1.0}, {}, {}, 200, 7);
  REQUIRE(a.n() == b.n());
  for (int i = 0; i < a.n(); ++i) CHECK(a.obs[i].y == b.obs[i].y);
  const Dataset c = simulate_dgp(game, {-1.0, -1.0}, {}, {}, 200, 8);
  bool same = true;
  for (int i = 0; i < a.n(); ++i) same = same && a.obs[i].y == c.obs[i].y;
  CHECK(!same);
}

TEST_CASE("selection policies agree when the prediction is a singleton") {
  EntryGameModel game;
  for (const SelectionKind kind :
       {SelectionKind::AlwaysFirst, SelectionKind::AlwaysSecond,
        SelectionKind::UnitAlternating}) {
    SelectionPolicy policy;
    policy.kind = kind;
    const Dataset data = simulate_dgp(game, {0.0, 0.0}, {}, policy, 2000, 3);
    const auto freq = frequencies(data);
    for (int y = 0; y < 4; ++y)
      CHECK(freq[y] == doctest::Approx(0.25).epsilon(0.15));
  }
}

TEST_CASE("selection policies split the multiplicity region differently") {
  EntryGameModel game;
  const Theta theta{-1.0, -1.0};
  const double mult = game.masses(theta, {}).mult;
  CHECK(mult == doctest::Approx(0.11651).epsilon(1e-3));

  const int n = 60000;
  SelectionPolicy first;   // always (0,1) on ties
  first.kind = SelectionKind::AlwaysFirst;
  SelectionPolicy second;  // always (1,0) on ties
  second.kind = SelectionKind::AlwaysSecond;
  const auto f1 = frequencies(simulate_dgp(game, theta, {}, first, n, 5));
  const auto f2 = frequencies(simulate_dgp(game, theta, {}, second, n, 5));
  CHECK(f2[2] - f1[2] == doctest::Approx(mult).epsilon(0.08));
  CHECK(f1[1] - f2[1] == doctest::Approx(mult).epsilon(0.08));
  // the deterministic regions are unaffected
  CHECK(f1[0] == doctest::Approx(f2[0]).epsilon(0.03));
  CHECK(f1[3] == doctest::Approx(f2[3]).epsilon(0.03));
}

TEST_CASE("covariate-dependent selection uses the latent score") {
  EntryGameModel game(1);
  XLaw law;
  law.dim = 2;
  law.support = {-1.0, 1.0};
  SelectionPolicy policy;
  policy.kind = SelectionKind::CovariateDependent;
  const Dataset data =
      simulate_dgp(game, {-1.0, -1.0, 0.3, 0.3}, law, policy, 500, 17);
  CHECK(data.n() == 500);
  for (const auto& obs : data.obs) {
    REQUIRE(obs.x.size() == 2);
    CHECK(std::abs(obs.x[0]) == 1.0);
  }
}

TEST_CASE("design_truth maps h onto the right coordinates") {
  McDesign t1 = table1_design(100, Criterion::MLE);
  const Theta beta = design_truth(t1, 0.345);
  CHECK(beta[0] == doctest::Approx(-0.345));
  CHECK(beta[1] == doctest::Approx(-0.345));
  CHECK(design_truth(t1, 0.0) == Theta{0.0, 0.0});

  McDesign t2 = table2_design(100);
  const Theta delta = design_truth(t2, 0.526);
  CHECK(delta[0] == doctest::Approx(-0.5));
  CHECK(delta[1] == doctest::Approx(-0.5));
  CHECK(delta[2] == doctest::Approx(0.526));
  CHECK(delta[3] == doctest::Approx(0.526));
  CHECK(t2.hyp.theta0_grid.size() == 81);
}

TEST_CASE("mc_table: determinism and worker invariance") {
  McDesign design = table1_design(30, Criterion::MLE);
  design.reps = 8;
  design.h_grid = {0.0, 0.69};
  EntryGameModel game;
  const auto rows1 = mc_table(design, game, 1);
  const auto rows2 = mc_table(design, game, 2);
  const auto rows3 = mc_table(design, game, 1);
  REQUIRE(rows1.size() == 2);
  for (std::size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows1[i].power == rows2[i].power);
    CHECK(rows1[i].power == rows3[i].power);
    CHECK(rows1[i].reps == 8);
    CHECK(rows1[i].power >= 0.0);
    CHECK(rows1[i].power <= 1.0);
  }
}

TEST_CASE("mc_replication: per-rep streams are independent of order") {
  McDesign design = table1_design(30, Criterion::MLE);
  EntryGameModel game;
  const TestRecord a = mc_replication(design, game, 0.69, 3);
  const TestRecord b = mc_replication(design, game, 0.69, 3);
  CHECK(a.log_s == b.log_s);
  const TestRecord c = mc_replication(design, game, 0.69, 4);
  CHECK(a.log_s != c.log_s);
}

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "lfp/inference.hpp"
#include "lfp/models.hpp"
#include "lfp/simulation.hpp"

using namespace lfp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Toy incomplete model on m = 2: atoms ({a}, w) and ({a,b}, 1-w), so
/// nu({a}) = w and nu({b}) = 0. theta = (w).
class ToyModel : public ModelSpec {
 public:
  ToyModel() : space_({"a", "b"}) {}
  const OutcomeSpace& space() const override { return space_; }
  int theta_dim() const override { return 1; }
  int covariate_dim() const override { return 0; }
  RandomSetDistribution random_set(const std::vector<double>& theta,
                                   const std::vector<double>&) const override {
    return RandomSetDistribution(
        2, {{Mask{0b01}, theta[0]}, {Mask{0b11}, 1.0 - theta[0]}});
  }
  SetDraw draw_set(const std::vector<double>& theta,
                   const std::vector<double>&, Rng& rng) const override {
    return {rng.uniform() < theta[0] ? Mask{0b01} : Mask{0b11}, 0.0};
  }

 private:
  OutcomeSpace space_;
};

std::vector<int> all_indices(const Dataset& data) {
  std::vector<int> idx(data.n());
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

Dataset game_counts(int n00, int n01, int n10, int n11) {
  Dataset data;
  for (int k = 0; k < n00; ++k) data.obs.push_back({0, {}});
  for (int k = 0; k < n01; ++k) data.obs.push_back({1, {}});
  for (int k = 0; k < n10; ++k) data.obs.push_back({2, {}});
  for (int k = 0; k < n11; ++k) data.obs.push_back({3, {}});
  return data;
}

}  // namespace

TEST_CASE("split_sample: sizes, disjointness, determinism") {
  Dataset data;
  for (int i = 0; i < 10; ++i) data.obs.push_back({0, {}});
  SplitPlan plan = split_sample(data, 7);
  CHECK(plan.d0.size() == 5);
  CHECK(plan.d1.size() == 5);

  data.obs.push_back({0, {}});
  plan = split_sample(data, 7);
  CHECK(plan.d0.size() == 6);  // ceil(11/2)
  CHECK(plan.d1.size() == 5);
  std::vector<int> all = plan.d0;
  all.insert(all.end(), plan.d1.begin(), plan.d1.end());
  std::sort(all.begin(), all.end());
  for (int i = 0; i < 11; ++i) CHECK(all[i] == i);

  const SplitPlan again = split_sample(data, 7);
  CHECK(again.d0 == plan.d0);
  CHECK(again.d1 == plan.d1);
  const SplitPlan other = split_sample(data, 8);
  CHECK(other.d0 != plan.d0);

  Dataset tiny;
  tiny.obs.push_back({0, {}});
  CHECK_THROWS(split_sample(tiny, 1));
}

TEST_CASE("moment criterion: single-cell hand value") {
  // nu({a}) = 0.6, Phat({a}) = 0.5, n = 100:
  // (0.6 - 0.5) / (sqrt(0.25/100) + 0.01) = 0.1 / 0.06
  ToyModel model;
  Dataset data;
  for (int i = 0; i < 50; ++i) data.obs.push_back({0, {}});
  for (int i = 0; i < 50; ++i) data.obs.push_back({1, {}});
  const auto cells = estimator_cells(data, all_indices(data), 2);
  CHECK(moment_criterion({0.6}, cells, model) ==
        doctest::Approx(0.1 / 0.06).epsilon(1e-12));
  // no violation when nu <= Phat everywhere
  CHECK(moment_criterion({0.4}, cells, model) == 0.0);
}

TEST_CASE("neg-loglik criterion: projection then plug-in") {
  ToyModel model;
  Dataset data;
  for (int i = 0; i < 50; ++i) data.obs.push_back({0, {}});
  for (int i = 0; i < 50; ++i) data.obs.push_back({1, {}});
  const auto cells = estimator_cells(data, all_indices(data), 2);
  // q = (0.6, 0.4): -50 ln 0.6 - 50 ln 0.4 = 71.355
  const double value = neg_loglik_criterion({0.6}, cells, model, false);
  CHECK(value == doctest::Approx(-50 * std::log(0.6) - 50 * std::log(0.4))
                     .epsilon(1e-7));
  CHECK(value == doctest::Approx(71.36).epsilon(1e-3));
  // Phat in the core: equals the empirical entropy
  CHECK(neg_loglik_criterion({0.3}, cells, model, false) ==
        doctest::Approx(-100 * std::log(0.5)).epsilon(1e-7));
}

TEST_CASE("entrants estimator: W-measurable and near truth in population") {
  EntryGameModel game;
  // exact complete-model frequencies at theta = 0: (0.25, 0.5, 0.25)
  Dataset data = game_counts(100, 100, 100, 100);
  const Box box{{-2.0, 0.0}, {-2.0, 0.0}};
  const Theta est =
      entrants_estimator(data, all_indices(data), game, box, 11);
  CHECK(est[0] == doctest::Approx(0.0).epsilon(0.05));
  CHECK(est[1] == doctest::Approx(0.0).epsilon(0.05));

  // permuting the (0,1)/(1,0) labels leaves the estimate unchanged
  Dataset permuted = game_counts(100, 130, 70, 100);
  Dataset original = game_counts(100, 70, 130, 100);
  const Theta a =
      entrants_estimator(original, all_indices(original), game, box, 11);
  const Theta b =
      entrants_estimator(permuted, all_indices(permuted), game, box, 11);
  CHECK(a[0] == b[0]);
  CHECK(a[1] == b[1]);
}

TEST_CASE("representative density drops impossible outcomes") {
  EntryGameModel game;
  // beta = (0,0): complete, p equals the closed-form choice probabilities
  const Density p = representative_density({0.0, 0.0}, game, {});
  for (int y = 0; y < 4; ++y)
    CHECK(p[y] == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("tailor-made log-likelihood at the reference instance") {
  EntryGameModel game;
  Dataset data = game_counts(0, 0, 1, 0);  // one observation y = (1,0)
  const auto idx = all_indices(data);
  DensityMap p_map;
  p_map.emplace(std::vector<double>{},
                Density{{0.25, 0.25, 0.25, 0.25}});  // p_rel = 0.5
  const double closed =
      tailor_made_loglik({-1.0, -1.0}, data, idx, p_map, game, true);
  const double generic =
      tailor_made_loglik({-1.0, -1.0}, data, idx, p_map, game, false);
  CHECK(closed == doctest::Approx(std::log(0.36241)).epsilon(1e-4));
  CHECK(generic == doctest::Approx(closed).epsilon(1e-6));

  // p in the core of theta: the LFP density equals p
  const Density p_core = representative_density({-1.0, -1.0}, game, {});
  DensityMap core_map;
  core_map.emplace(std::vector<double>{}, p_core);
  const double fixed =
      tailor_made_loglik({-1.0, -1.0}, data, idx, core_map, game, true);
  CHECK(fixed == doctest::Approx(std::log(p_core[2])).epsilon(1e-9));
}

TEST_CASE("restricted MLE: ties and support rule") {
  ToyModel model;
  Dataset data;
  data.obs.push_back({1, {}});  // observed y = b
  const auto idx = all_indices(data);
  DensityMap p_map;
  p_map.emplace(std::vector<double>{}, Density{{0.5, 0.5}});

  HypothesisSpec hyp;
  // theta = 1 pins q = (1,0): support excludes the observation
  hyp.theta0_grid = {{1.0}, {0.2}};
  auto [theta0, ll] = restricted_mle(hyp, data, idx, p_map, model);
  CHECK(theta0[0] == 0.2);
  CHECK(std::isfinite(ll));

  hyp.theta0_grid = {{1.0}};
  auto [theta_bad, ll_bad] = restricted_mle(hyp, data, idx, p_map, model);
  CHECK(theta_bad[0] == 1.0);
  CHECK(ll_bad == -kInf);
}

TEST_CASE("cross-fit statistic: T_n = 1 when the estimate is the null") {
  EntryGameModel game;
  const Dataset data = simulate_dgp(game, {0.0, 0.0}, {}, {}, 40, 99);
  const SplitPlan plan = split_sample(data, 5);
  HypothesisSpec hyp;
  hyp.theta0_grid = {{0.0, 0.0}};
  hyp.search_box = {{0.0, 0.0}, {0.0, 0.0}};  // singleton box: theta1 = null
  InferenceOptions opts;
  const TestRecord rec = crossfit_lr(data, plan, hyp, game, opts);
  CHECK(std::abs(rec.log_t) <= 1e-9);
  CHECK(std::abs(rec.log_t_swap) <= 1e-9);
  CHECK(std::abs(rec.log_s) <= 1e-9);
  CHECK(rec.decision == Decision::FailToReject);
}

TEST_CASE("cross-fit statistic: swap symmetry and decision rule") {
  EntryGameModel game;
  const Dataset data =
      simulate_dgp(game, {-0.9, -0.9}, {}, {}, 60, 1234);
  HypothesisSpec hyp;
  hyp.theta0_grid = {{0.0, 0.0}};
  hyp.search_box = {{-2.0, 0.0}, {-2.0, 0.0}};
  InferenceOptions opts;
  const SplitPlan plan = split_sample(data, 5);
  const TestRecord rec = crossfit_lr(data, plan, hyp, game, opts);

  SplitPlan exchanged;
  exchanged.seed = plan.seed;
  exchanged.d0 = plan.d1;
  exchanged.d1 = plan.d0;
  const TestRecord swapped = crossfit_lr(data, exchanged, hyp, game, opts);
  CHECK(swapped.log_t == rec.log_t_swap);
  CHECK(swapped.log_t_swap == rec.log_t);
  CHECK(swapped.log_s == rec.log_s);

  // decision depends on (S_n, alpha) only
  InferenceOptions lax = opts;
  lax.alpha = 0.999;
  const TestRecord easy = crossfit_lr(data, plan, hyp, game, lax);
  CHECK(easy.log_s == rec.log_s);
  CHECK((easy.decision == Decision::Reject) ==
        (easy.log_s > -std::log(lax.alpha)));
  CHECK((rec.decision == Decision::Reject) ==
        (rec.log_s > -std::log(opts.alpha)));
}

TEST_CASE("split LR equals the forward direction of the cross-fit") {
  EntryGameModel game;
  const Dataset data = simulate_dgp(game, {-0.5, -0.5}, {}, {}, 30, 77);
  HypothesisSpec hyp;
  hyp.theta0_grid = {{0.0, 0.0}};
  hyp.search_box = {{-2.0, 0.0}, {-2.0, 0.0}};
  InferenceOptions opts;
  const SplitPlan plan = split_sample(data, 3);
  CHECK(split_lr(data, plan, hyp, game, opts) ==
        crossfit_lr(data, plan, hyp, game, opts).log_t);
}

TEST_CASE("confidence set: threshold monotonicity and skipped points") {
  EntryGameModel game;
  const Dataset data = simulate_dgp(game, {0.0, 0.0}, {}, {}, 50, 42);
  std::vector<InversionPoint> grid;
  for (int k = 0; k <= 4; ++k) {
    InversionPoint point;
    point.phi_star = -0.25 * k;
    point.theta0_grid = {{point.phi_star, point.phi_star}};
    grid.push_back(point);
  }
  grid.push_back({0.5, {}});  // empty null set

  InferenceOptions opts;
  opts.alpha = 1e-9;  // threshold -> infinity: everything retained
  const Box box{{-2.0, 0.0}, {-2.0, 0.0}};
  const auto rows = confidence_set(data, game, grid, box, opts);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(!rows[i].skipped);
    CHECK(rows[i].retained);
  }
  CHECK(rows[5].skipped);
  CHECK(!rows[5].retained);
}

TEST_CASE("estimator cells: continuous covariates bin by sqrt(n)") {
  Dataset data;
  data.covariate_kind = CovariateKind::Continuous;
  for (int i = 0; i < 16; ++i)
    data.obs.push_back({i % 2, {static_cast<double>(i)}});
  const auto cells = estimator_cells(data, all_indices(data), 2);
  CHECK(cells.size() == 4);  // blocks of ceil(sqrt(16)) = 4
  for (const auto& cell : cells) CHECK(cell.total == 4.0);
  // distinct cells stay exact
  CHECK(distinct_cells(data, all_indices(data), 2).size() == 16);
}

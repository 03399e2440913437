#include "lfp/simulation.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "lfp/rng.hpp"

namespace lfp {

namespace {

int select_outcome(const std::vector<int>& members,
                   const SelectionPolicy& policy, double x_sum,
                   double latent_score, int unit, Rng& rng) {
  const int k = static_cast<int>(members.size());
  switch (policy.kind) {
    case SelectionKind::AlwaysFirst:
      return members.front();
    case SelectionKind::AlwaysSecond:
      return members[std::min(1, k - 1)];
    case SelectionKind::CovariateDependent:
      return x_sum + latent_score >= 0.0 ? members.back() : members.front();
    case SelectionKind::UnitAlternating:
      return members[unit % k];
    case SelectionKind::FixedProb:
    default: {
      const double u = rng.uniform();
      if (u < policy.p_sel) return members.back();
      // remaining mass uniform over the other members
      const int j = static_cast<int>((u - policy.p_sel) /
                                     (1.0 - policy.p_sel) * (k - 1));
      return members[std::min(j, k - 2)];
    }
  }
}

std::uint64_t h_stream(std::uint64_t seed, double h, int rep) {
  return mix_seed(seed, std::bit_cast<std::uint64_t>(h),
                  static_cast<std::uint64_t>(rep));
}

}  // namespace

Dataset simulate_dgp(const ModelSpec& model, const Theta& theta,
                     const XLaw& x_law, const SelectionPolicy& selection,
                     int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate_dgp: need n >= 1");
  if (x_law.dim > 0 && x_law.support.empty())
    throw std::invalid_argument("simulate_dgp: empty covariate support");
  if (x_law.dim != model.covariate_dim())
    throw std::invalid_argument("simulate_dgp: covariate dimension mismatch");
  Dataset data;
  data.covariate_kind = CovariateKind::Discrete;
  data.obs.reserve(n);
  Rng rng(mix_seed(seed, 0x44475020));
  for (int i = 0; i < n; ++i) {
    Observation o;
    o.x.resize(model.covariate_dim());
    double x_sum = 0.0;
    for (auto& v : o.x) {
      v = x_law.support[rng.below(
          static_cast<std::uint32_t>(x_law.support.size()))];
      x_sum += v;
    }
    const SetDraw draw = model.draw_set(theta, o.x, rng);
    std::vector<int> members;
    for (int y = 0; y < model.space().size(); ++y)
      if ((draw.set >> y) & 1) members.push_back(y);
    o.y = members.size() == 1
              ? members.front()
              : select_outcome(members, selection, x_sum, draw.latent_score,
                               i, rng);
    data.obs.push_back(std::move(o));
  }
  return data;
}

Theta design_truth(const McDesign& design, double h) {
  Theta theta = design.theta_null_base;
  if (design.alt == AlternativeKind::BetaShift) {
    theta[0] -= h;
    theta[1] -= h;
  } else {
    for (std::size_t j = 2; j < theta.size(); ++j) theta[j] += h;
  }
  return theta;
}

TestRecord mc_replication(const McDesign& design, const ModelSpec& model,
                          double h, int rep) {
  const std::uint64_t stream = h_stream(design.seed, h, rep);
  const Dataset data = simulate_dgp(model, design_truth(design, h),
                                    design.x_law, design.selection, design.n,
                                    mix_seed(stream, 0xD671));
  const SplitPlan plan = split_sample(data, mix_seed(stream, 0x5A11));
  InferenceOptions opts;
  opts.criterion = design.criterion;
  opts.alpha = design.alpha;
  opts.seed = mix_seed(stream, 0xE571);
  return crossfit_lr(data, plan, design.hyp, model, opts);
}

std::vector<McRow> mc_table(const McDesign& design, const ModelSpec& model,
                            int workers) {
  if (design.reps < 1) throw std::invalid_argument("mc_table: need reps >= 1");
  workers = std::max(1, workers);
  std::vector<McRow> rows;
  rows.reserve(design.h_grid.size());
  for (double h : design.h_grid) {
    std::vector<int> rejects(workers, 0);
    auto run_chunk = [&](int w) {
      int count = 0;
      for (int rep = w; rep < design.reps; rep += workers)
        if (mc_replication(design, model, h, rep).decision ==
            Decision::Reject)
          ++count;
      rejects[w] = count;
    };
    if (workers == 1) {
      run_chunk(0);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (int w = 0; w < workers; ++w) pool.emplace_back(run_chunk, w);
      for (auto& t : pool) t.join();
    }
    const int total = std::accumulate(rejects.begin(), rejects.end(), 0);
    McRow row;
    row.n = design.n;
    row.criterion = design.criterion;
    row.h = h;
    row.reps = design.reps;
    row.power = static_cast<double>(total) / design.reps;
    row.mc_se = std::sqrt(row.power * (1.0 - row.power) / design.reps);
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::pair<double, double>> power_curve(const McDesign& design,
                                                   const ModelSpec& model,
                                                   int workers) {
  std::vector<std::pair<double, double>> series;
  for (const McRow& row : mc_table(design, model, workers))
    series.emplace_back(row.h, row.power);
  return series;
}

McDesign table1_design(int n, Criterion criterion) {
  McDesign design;
  design.name = "table1";
  design.cov_dim = 0;
  design.alt = AlternativeKind::BetaShift;
  design.theta_null_base = {0.0, 0.0};
  design.hyp.theta0_grid = {{0.0, 0.0}};
  design.hyp.search_box = {{-2.0, 0.0}, {-2.0, 0.0}};
  design.n = n;
  design.criterion = criterion;
  return design;
}

McDesign table2_design(int n) {
  McDesign design;
  design.name = "table2";
  design.cov_dim = 1;
  design.x_law = {2, {-2.0, -1.0, 0.0, 1.0, 2.0}};
  design.alt = AlternativeKind::DeltaShift;
  design.theta_null_base = {-0.5, -0.5, 0.0, 0.0};
  // H0: delta = 0 with the strategic effects as nuisance parameters
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; j <= 8; ++j)
      design.hyp.theta0_grid.push_back(
          {-2.0 + 0.25 * i, -2.0 + 0.25 * j, 0.0, 0.0});
  design.hyp.search_box = {{-2.0, 0.0}, {-2.0, 0.0}, {-2.0, 2.0}, {-2.0, 2.0}};
  design.n = n;
  design.criterion = Criterion::Moment;
  return design;
}

}  // namespace lfp

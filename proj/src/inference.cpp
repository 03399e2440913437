#include "lfp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lfp/rng.hpp"
#include "lfp/solvers.hpp"

namespace lfp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Cell> group_by_key(const Dataset& data, const std::vector<int>& idx,
                               int m) {
  std::map<std::vector<double>, Cell> groups;
  for (int i : idx) {
    const auto& o = data.obs[i];
    auto [it, fresh] = groups.try_emplace(o.x);
    if (fresh) {
      it->second.x = o.x;
      it->second.counts.assign(m, 0.0);
    }
    it->second.counts[o.y] += 1.0;
    it->second.total += 1.0;
  }
  std::vector<Cell> cells;
  cells.reserve(groups.size());
  for (auto& [key, cell] : groups) cells.push_back(std::move(cell));
  return cells;
}

/// Plug-in log-likelihood of the representative density on the given cells.
double plugin_loglik(const std::vector<Cell>& cells,
                     const std::vector<const Density*>& p) {
  double total = 0.0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (int y = 0; y < static_cast<int>(cells[c].counts.size()); ++y) {
      const double cnt = cells[c].counts[y];
      if (cnt == 0.0) continue;
      const double q = (*p[c])[y];
      if (q <= 0.0) return -kInf;
      total += cnt * std::log(q);
    }
  }
  return total;
}

struct EvalContext {
  std::vector<Cell> cells;        // distinct x among the evaluation indices
  std::vector<const Density*> p;  // aligned representative densities
};

EvalContext make_context(const Dataset& data, const std::vector<int>& idx,
                         const DensityMap& p_map, int m) {
  EvalContext ctx;
  ctx.cells = distinct_cells(data, idx, m);
  ctx.p.reserve(ctx.cells.size());
  for (const auto& cell : ctx.cells) {
    auto it = p_map.find(cell.x);
    if (it == p_map.end())
      throw std::invalid_argument("missing representative density for a cell");
    ctx.p.push_back(&it->second);
  }
  return ctx;
}

/// ln L_0(theta) over prepared cells; -inf under the support rule.
double context_loglik(const Theta& theta, const EvalContext& ctx,
                      const ModelSpec& model, bool use_closed_form) {
  double total = 0.0;
  for (std::size_t c = 0; c < ctx.cells.size(); ++c) {
    const Cell& cell = ctx.cells[c];
    Density q{std::vector<double>{1.0}};
    try {
      if (use_closed_form && model.has_closed_form(theta)) {
        q = model.lfp_closed_form(theta, cell.x, *ctx.p[c]);
      } else {
        const Capacity cap =
            containment_from_random_set(model.random_set(theta, cell.x));
        q = lfp_density(cap, *ctx.p[c]).first;
      }
    } catch (const CoreInfeasible&) {
      return -kInf;
    }
    for (int y = 0; y < q.m(); ++y) {
      const double cnt = cell.counts[y];
      if (cnt == 0.0) continue;
      if (q[y] <= 0.0) return -kInf;
      total += cnt * std::log(q[y]);
    }
  }
  return total;
}

struct DirectionResult {
  Theta theta_hat1;
  Theta theta_hat0;
  double log_t = 0.0;
};

/// One direction: estimate on `train`, evaluate the LR on `eval`.
DirectionResult run_direction(const Dataset& data,
                              const std::vector<int>& train,
                              const std::vector<int>& eval_idx,
                              const HypothesisSpec& hyp,
                              const ModelSpec& model,
                              const InferenceOptions& opts) {
  DirectionResult out;
  out.theta_hat1 =
      unrestricted_estimate(data, train, opts.criterion, model, hyp.search_box,
                            mix_seed(opts.seed, 2), opts.nm,
                            opts.use_closed_form);
  const DensityMap p_map =
      representative_densities(out.theta_hat1, model, data, eval_idx);
  const EvalContext ctx =
      make_context(data, eval_idx, p_map, model.space().size());
  const double numerator = plugin_loglik(ctx.cells, ctx.p);

  double denom = -kInf;
  out.theta_hat0 = hyp.theta0_grid.front();
  for (const Theta& theta : hyp.theta0_grid) {
    const double ll = context_loglik(theta, ctx, model, opts.use_closed_form);
    if (ll > denom) {
      denom = ll;
      out.theta_hat0 = theta;
    }
  }
  if (denom == -kInf)
    out.log_t = kInf;  // no null parameter supports the data
  else if (numerator == -kInf)
    out.log_t = -kInf;
  else
    out.log_t = numerator - denom;
  return out;
}

double crossfit_log_s(double log_t, double log_t_swap) {
  if (log_t == kInf || log_t_swap == kInf) return kInf;
  const double a = std::max(log_t, log_t_swap);
  if (a == -kInf) return -kInf;
  return a + std::log(0.5 * (std::exp(log_t - a) + std::exp(log_t_swap - a)));
}

}  // namespace

SplitPlan split_sample(const Dataset& data, std::uint64_t seed) {
  const int n = data.n();
  if (n < 2) throw std::invalid_argument("split_sample: need n >= 2");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(mix_seed(seed, 0x53504c49));
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.below(i + 1)]);
  const int n0 = (n + 1) / 2;
  SplitPlan plan;
  plan.seed = seed;
  plan.d0.assign(perm.begin(), perm.begin() + n0);
  plan.d1.assign(perm.begin() + n0, perm.end());
  std::sort(plan.d0.begin(), plan.d0.end());
  std::sort(plan.d1.begin(), plan.d1.end());
  return plan;
}

std::vector<Cell> distinct_cells(const Dataset& data,
                                 const std::vector<int>& idx, int m) {
  return group_by_key(data, idx, m);
}

std::vector<Cell> estimator_cells(const Dataset& data,
                                  const std::vector<int>& idx, int m) {
  if (data.covariate_kind == CovariateKind::Discrete)
    return group_by_key(data, idx, m);

  // continuous covariates: sorted nearest-neighbor blocks of size
  // ceil(sqrt(n)), block-mean representative
  std::vector<int> order = idx;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (data.obs[a].x != data.obs[b].x) return data.obs[a].x < data.obs[b].x;
    return a < b;
  });
  const int n = static_cast<int>(order.size());
  const int block =
      std::max(1, static_cast<int>(std::ceil(std::sqrt(double(n)))));
  std::vector<Cell> cells;
  for (int start = 0; start < n; start += block) {
    const int stop = std::min(n, start + block);
    Cell cell;
    cell.counts.assign(m, 0.0);
    cell.x.assign(data.obs[order[start]].x.size(), 0.0);
    for (int k = start; k < stop; ++k) {
      const auto& o = data.obs[order[k]];
      cell.counts[o.y] += 1.0;
      cell.total += 1.0;
      for (std::size_t j = 0; j < cell.x.size(); ++j) cell.x[j] += o.x[j];
    }
    for (auto& v : cell.x) v /= cell.total;
    cells.push_back(std::move(cell));
  }
  return cells;
}

double moment_criterion(const Theta& theta, const std::vector<Cell>& cells,
                        const ModelSpec& model) {
  double crit = 0.0;
  for (const Cell& cell : cells) {
    if (cell.total == 0.0) continue;
    const Capacity cap =
        containment_from_random_set(model.random_set(theta, cell.x));
    const Mask full = cap.full_mask();
    for (Mask a = 1; a < full; ++a) {
      double phat = 0.0;
      for (int y = 0; y < cap.m(); ++y)
        if ((a >> y) & 1) phat += cell.counts[y];
      phat /= cell.total;
      const double gap = cap(a) - phat;
      if (gap <= 0.0) continue;
      const double shat = std::sqrt(phat * (1.0 - phat) / cell.total) + 0.01;
      crit = std::max(crit, gap / shat);
    }
  }
  return crit;
}

double neg_loglik_criterion(const Theta& theta, const std::vector<Cell>& cells,
                            const ModelSpec& model, bool use_closed_form) {
  double total = 0.0;
  for (const Cell& cell : cells) {
    if (cell.total == 0.0) continue;
    std::vector<double> freq(cell.counts);
    for (auto& v : freq) v /= cell.total;
    const Density p_hat{std::move(freq)};
    Density q{std::vector<double>{1.0}};
    try {
      if (use_closed_form && model.has_closed_form(theta)) {
        q = model.kl_closed_form(theta, cell.x, p_hat);
      } else {
        const Capacity cap =
            containment_from_random_set(model.random_set(theta, cell.x));
        q = kl_projection(p_hat, cap).first;
      }
    } catch (const CoreInfeasible&) {
      return kInf;
    }
    for (int y = 0; y < q.m(); ++y) {
      if (cell.counts[y] == 0.0) continue;
      if (q[y] <= 0.0) return kInf;
      total -= cell.counts[y] * std::log(q[y]);
    }
  }
  return total;
}

double coarse_loglik(const Theta& theta, const std::vector<Cell>& cells,
                     const ModelSpec& model) {
  double total = 0.0;
  for (const Cell& cell : cells) {
    const std::vector<double> probs = model.coarse_probs(theta, cell.x);
    std::vector<double> class_counts(probs.size(), 0.0);
    for (int y = 0; y < static_cast<int>(cell.counts.size()); ++y) {
      const int k = model.coarse_class(y);
      if (k < 0 || k >= static_cast<int>(probs.size()))
        throw std::logic_error("coarse class out of range");
      class_counts[k] += cell.counts[y];
    }
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (class_counts[k] == 0.0) continue;
      if (probs[k] <= 0.0) return -kInf;
      total += class_counts[k] * std::log(probs[k]);
    }
  }
  return total;
}

Theta entrants_estimator(const Dataset& data, const std::vector<int>& idx,
                         const ModelSpec& model, const Box& box,
                         std::uint64_t seed, const NmOptions& nm) {
  const std::vector<Cell> cells =
      estimator_cells(data, idx, model.space().size());
  auto objective = [&](const Theta& theta) {
    return -coarse_loglik(theta, cells, model);
  };
  return multistart_minimize(objective, box, seed, nm).x;
}

Theta unrestricted_estimate(const Dataset& data, const std::vector<int>& idx,
                            Criterion criterion, const ModelSpec& model,
                            const Box& box, std::uint64_t seed,
                            const NmOptions& nm, bool use_closed_form) {
  if (criterion == Criterion::Entrants)
    return entrants_estimator(data, idx, model, box, seed, nm);
  const std::vector<Cell> cells =
      estimator_cells(data, idx, model.space().size());
  auto objective = [&](const Theta& theta) {
    return criterion == Criterion::Moment
               ? moment_criterion(theta, cells, model)
               : neg_loglik_criterion(theta, cells, model, use_closed_form);
  };
  return multistart_minimize(objective, box, seed, nm).x;
}

Density representative_density(const Theta& theta_hat1, const ModelSpec& model,
                               const std::vector<double>& x) {
  const Capacity cap =
      containment_from_random_set(model.random_set(theta_hat1, x));
  try {
    return feasibility_density(cap);
  } catch (const CoreInfeasible&) {
    // outcomes with nu*({y}) = 0 cannot be produced by any selection: drop
    // them and solve on the remaining support
    return feasibility_density_on_support(cap,
                                          analyze_core(cap).zero_outcomes);
  }
}

DensityMap representative_densities(const Theta& theta_hat1,
                                    const ModelSpec& model,
                                    const Dataset& data,
                                    const std::vector<int>& idx) {
  DensityMap p_map;
  for (int i : idx) {
    const auto& x = data.obs[i].x;
    if (p_map.count(x)) continue;
    p_map.emplace(x, representative_density(theta_hat1, model, x));
  }
  return p_map;
}

double tailor_made_loglik(const Theta& theta, const Dataset& data,
                          const std::vector<int>& idx, const DensityMap& p_map,
                          const ModelSpec& model, bool use_closed_form) {
  const EvalContext ctx =
      make_context(data, idx, p_map, model.space().size());
  return context_loglik(theta, ctx, model, use_closed_form);
}

std::pair<Theta, double> restricted_mle(const HypothesisSpec& hyp,
                                        const Dataset& data,
                                        const std::vector<int>& idx,
                                        const DensityMap& p_map,
                                        const ModelSpec& model,
                                        bool use_closed_form) {
  if (hyp.theta0_grid.empty())
    throw std::invalid_argument("restricted_mle: empty null grid");
  const EvalContext ctx =
      make_context(data, idx, p_map, model.space().size());
  Theta best = hyp.theta0_grid.front();
  double best_ll = -kInf;
  for (const Theta& theta : hyp.theta0_grid) {
    const double ll = context_loglik(theta, ctx, model, use_closed_form);
    if (ll > best_ll) {
      best_ll = ll;
      best = theta;
    }
  }
  return {best, best_ll};
}

double split_lr(const Dataset& data, const SplitPlan& plan,
                const HypothesisSpec& hyp, const ModelSpec& model,
                const InferenceOptions& opts) {
  return run_direction(data, plan.d1, plan.d0, hyp, model, opts).log_t;
}

TestRecord crossfit_lr(const Dataset& data, const SplitPlan& plan,
                       const HypothesisSpec& hyp, const ModelSpec& model,
                       const InferenceOptions& opts) {
  TestRecord rec;
  rec.split = plan;
  rec.alpha = opts.alpha;

  const DirectionResult fwd =
      run_direction(data, plan.d1, plan.d0, hyp, model, opts);
  const DirectionResult swap =
      run_direction(data, plan.d0, plan.d1, hyp, model, opts);
  rec.theta_hat1 = fwd.theta_hat1;
  rec.theta_hat0 = fwd.theta_hat0;
  rec.theta_hat1_swap = swap.theta_hat1;
  rec.theta_hat0_swap = swap.theta_hat0;
  rec.log_t = fwd.log_t;
  rec.log_t_swap = swap.log_t;
  rec.log_s = crossfit_log_s(rec.log_t, rec.log_t_swap);
  rec.decision = rec.log_s > -std::log(opts.alpha) ? Decision::Reject
                                                   : Decision::FailToReject;
  return rec;
}

std::vector<ConfsetRow> confidence_set(const Dataset& data,
                                       const ModelSpec& model,
                                       const std::vector<InversionPoint>& grid,
                                       const Box& search_box,
                                       const InferenceOptions& opts) {
  const SplitPlan plan = split_sample(data, opts.seed);
  const double threshold = -std::log(opts.alpha);
  const int m = model.space().size();

  // the unrestricted side is shared across all phi*; the side owns its
  // density map because the eval context points into it
  struct OwnedSide {
    Theta theta_hat1;
    DensityMap p_map;
    EvalContext ctx;
    double numerator = 0.0;
  };
  auto build = [&](const std::vector<int>& train,
                   const std::vector<int>& eval_idx) {
    OwnedSide side;
    side.theta_hat1 = unrestricted_estimate(
        data, train, opts.criterion, model, search_box, mix_seed(opts.seed, 2),
        opts.nm, opts.use_closed_form);
    side.p_map =
        representative_densities(side.theta_hat1, model, data, eval_idx);
    side.ctx = make_context(data, eval_idx, side.p_map, m);
    side.numerator = plugin_loglik(side.ctx.cells, side.ctx.p);
    return side;
  };
  const OwnedSide fwd = build(plan.d1, plan.d0);
  const OwnedSide swap = build(plan.d0, plan.d1);

  auto direction_log_t = [&](const OwnedSide& side,
                             const std::vector<Theta>& null_grid) {
    double denom = -kInf;
    for (const Theta& theta : null_grid)
      denom = std::max(
          denom, context_loglik(theta, side.ctx, model, opts.use_closed_form));
    if (denom == -kInf) return kInf;
    if (side.numerator == -kInf) return -kInf;
    return side.numerator - denom;
  };

  std::vector<ConfsetRow> rows;
  rows.reserve(grid.size());
  for (const InversionPoint& point : grid) {
    ConfsetRow row;
    row.phi_star = point.phi_star;
    if (point.theta0_grid.empty()) {
      row.skipped = true;
      rows.push_back(row);
      continue;
    }
    const double log_t = direction_log_t(fwd, point.theta0_grid);
    const double log_t_swap = direction_log_t(swap, point.theta0_grid);
    row.log_s = crossfit_log_s(log_t, log_t_swap);
    row.retained = !(row.log_s > threshold);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace lfp

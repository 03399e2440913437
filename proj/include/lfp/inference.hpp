#ifndef LFP_INFERENCE_HPP
#define LFP_INFERENCE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lfp/capacity.hpp"
#include "lfp/models.hpp"
#include "lfp/nelder_mead.hpp"

// The universal test pipeline: sample splitting, unrestricted estimator
// theta_hat1, feasible representative density, restricted MLE theta_hat0,
// split and cross-fit LR statistics with the fixed 1/alpha threshold, and
// confidence sets by test inversion. Everything is deterministic given
// (data, seeds, options); all statistics are kept in log space with +-inf
// sentinels so that the support rule never over/underflows.

namespace lfp {

using Theta = std::vector<double>;

enum class Criterion { Moment, MLE, Entrants };
enum class CovariateKind { Discrete, Continuous };
enum class Decision { Reject, FailToReject };

struct Observation {
  int y = 0;
  std::vector<double> x;
};

struct Dataset {
  std::vector<Observation> obs;
  CovariateKind covariate_kind = CovariateKind::Discrete;

  int n() const { return static_cast<int>(obs.size()); }
};

struct SplitPlan {
  std::vector<int> d0;  // |d0| = ceil(n/2); evaluates the likelihood
  std::vector<int> d1;
  std::uint64_t seed = 0;
};

/// Uniformly random partition by seeded shuffle; requires n >= 2.
SplitPlan split_sample(const Dataset& data, std::uint64_t seed);

/// Theta_0 as a finite grid plus the unrestricted search box.
struct HypothesisSpec {
  std::vector<Theta> theta0_grid;
  Box search_box;
};

struct InferenceOptions {
  Criterion criterion = Criterion::MLE;
  double alpha = 0.05;
  std::uint64_t seed = 20240101;
  bool use_closed_form = true;  // false forces the generic barrier path
  NmOptions nm;
};

struct TestRecord {
  SplitPlan split;
  Theta theta_hat1;       // from D1, used against D0
  Theta theta_hat0;       // RMLE on D0
  Theta theta_hat1_swap;  // from D0, used against D1
  Theta theta_hat0_swap;  // RMLE on D1
  double log_t = 0.0;     // ln T_n, +-inf allowed
  double log_t_swap = 0.0;
  double log_s = 0.0;  // ln S_n = ln((T_n + T_n^swap)/2)
  double alpha = 0.05;
  Decision decision = Decision::FailToReject;
};

/// Empirical cell: a covariate value (or bin representative) with per-outcome
/// counts of the observations mapped to it.
struct Cell {
  std::vector<double> x;
  std::vector<double> counts;
  double total = 0.0;
};

/// Cells for the estimation criteria: exact distinct-x cells for discrete
/// covariates, sorted nearest-neighbor blocks of size ceil(sqrt(n)) for
/// continuous ones (block mean as representative).
std::vector<Cell> estimator_cells(const Dataset& data,
                                  const std::vector<int>& idx, int m);

/// Exact distinct-x cells (the solver programs condition on x pointwise).
std::vector<Cell> distinct_cells(const Dataset& data,
                                 const std::vector<int>& idx, int m);

/// sup over events and cells of (nu_theta(A|x) - Phat(A|x))_+ / shat with
/// shat = sqrt(Phat(1-Phat)/n_cell) + 0.01.
double moment_criterion(const Theta& theta, const std::vector<Cell>& cells,
                        const ModelSpec& model);

/// Sum_i -ln q_proj(Y_i|X_i) where q_proj is the KL projection of the cell
/// frequencies onto the core at theta; +inf under the support rule.
double neg_loglik_criterion(const Theta& theta, const std::vector<Cell>& cells,
                            const ModelSpec& model, bool use_closed_form);

/// Log-likelihood of the coarse classes W = phi(Y) (number of entrants for
/// the game); -inf under the support rule.
double coarse_loglik(const Theta& theta, const std::vector<Cell>& cells,
                     const ModelSpec& model);

/// Initial estimator maximizing coarse_loglik over the box.
Theta entrants_estimator(const Dataset& data, const std::vector<int>& idx,
                         const ModelSpec& model, const Box& box,
                         std::uint64_t seed, const NmOptions& nm = {});

/// Criterion-based estimator over the box via multistart Nelder-Mead.
Theta unrestricted_estimate(const Dataset& data, const std::vector<int>& idx,
                            Criterion criterion, const ModelSpec& model,
                            const Box& box, std::uint64_t seed,
                            const NmOptions& nm = {},
                            bool use_closed_form = true);

/// Strictly positive representative density q_{theta_hat1}(.|x) from the
/// feasibility program; outcomes with nu*({y}|x) = 0 are dropped (probability
/// zero) rather than failing.
Density representative_density(const Theta& theta_hat1, const ModelSpec& model,
                               const std::vector<double>& x);

using DensityMap = std::map<std::vector<double>, Density>;

/// representative_density per distinct x among the given observations.
DensityMap representative_densities(const Theta& theta_hat1,
                                    const ModelSpec& model,
                                    const Dataset& data,
                                    const std::vector<int>& idx);

/// ln L_0(theta) = sum over D0 of ln q_theta(Y_i|X_i) with q_theta the LFP
/// density against p(.|x); -inf under the support rule.
double tailor_made_loglik(const Theta& theta, const Dataset& data,
                          const std::vector<int>& idx, const DensityMap& p_map,
                          const ModelSpec& model, bool use_closed_form = true);

/// Restricted MLE over the grid; ties broken by lowest grid index. If every
/// grid point is -inf the first point is returned with loglik -inf (the
/// statistic then becomes +inf and forces rejection).
std::pair<Theta, double> restricted_mle(const HypothesisSpec& hyp,
                                        const Dataset& data,
                                        const std::vector<int>& idx,
                                        const DensityMap& p_map,
                                        const ModelSpec& model,
                                        bool use_closed_form = true);

/// ln T_n for one direction of the split.
double split_lr(const Dataset& data, const SplitPlan& plan,
                const HypothesisSpec& hyp, const ModelSpec& model,
                const InferenceOptions& opts);

/// Full cross-fit record: T_n, the role-swapped T_n^swap, S_n and the
/// decision S_n > 1/alpha.
TestRecord crossfit_lr(const Dataset& data, const SplitPlan& plan,
                       const HypothesisSpec& hyp, const ModelSpec& model,
                       const InferenceOptions& opts);

/// One candidate functional value with its null grid Theta_0(phi*).
struct InversionPoint {
  double phi_star = 0.0;
  std::vector<Theta> theta0_grid;
};

struct ConfsetRow {
  double phi_star = 0.0;
  double log_s = 0.0;
  bool retained = false;
  bool skipped = false;  // empty Theta_0(phi*)
};

/// Test inversion over the candidate functional values; one shared split
/// plan and one unrestricted estimate per direction across all phi*.
std::vector<ConfsetRow> confidence_set(const Dataset& data,
                                       const ModelSpec& model,
                                       const std::vector<InversionPoint>& grid,
                                       const Box& search_box,
                                       const InferenceOptions& opts);

}  // namespace lfp

#endif  // LFP_INFERENCE_HPP

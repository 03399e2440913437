#ifndef LFP_SIMULATION_HPP
#define LFP_SIMULATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "lfp/inference.hpp"
#include "lfp/models.hpp"

// Data-generating processes with explicit selection mechanisms and the
// Monte Carlo harness behind the size/power tables. Replications own
// independent RNG streams keyed by (master seed, h index, replication), so
// tables are bit-identical regardless of scheduling or worker count.

namespace lfp {

enum class SelectionKind {
  FixedProb,        // lowest-index member w.p. 1 - p_sel, else highest
  AlwaysFirst,      // lowest-index member of the multiplicity set
  AlwaysSecond,     // second member
  CovariateDependent,  // last member iff sum(x) + latent score >= 0
  UnitAlternating   // member chosen by unit-index parity
};

/// For the entry game the multiplicity set is {(0,1),(1,0)} in index order,
/// so FixedProb(p) realizes (1,0) with probability p.
struct SelectionPolicy {
  SelectionKind kind = SelectionKind::FixedProb;
  double p_sel = 0.5;
};

/// Covariate law: each of `dim` coordinates iid uniform on `support`;
/// dim = 0 means no covariates.
struct XLaw {
  int dim = 0;
  std::vector<double> support;
};

/// n units: draw x, draw the predicted set, emit the unique element or apply
/// the selection policy to the multiplicity set. Deterministic per seed.
Dataset simulate_dgp(const ModelSpec& model, const Theta& theta,
                     const XLaw& x_law, const SelectionPolicy& selection,
                     int n, std::uint64_t seed);

/// How the alternative strength h enters theta relative to theta_null_base.
enum class AlternativeKind {
  BetaShift,  // beta_j = base - h (strategic-interaction alternatives)
  DeltaShift  // delta_j = base + h (covariate-coefficient alternatives)
};

struct McDesign {
  std::string name = "custom";
  int cov_dim = 0;  // per-player covariate dimension of the entry game
  XLaw x_law;
  AlternativeKind alt = AlternativeKind::BetaShift;
  Theta theta_null_base;  // truth at h = 0
  std::vector<double> h_grid;
  HypothesisSpec hyp;
  int n = 100;
  int reps = 1000;
  double alpha = 0.05;
  Criterion criterion = Criterion::MLE;
  SelectionPolicy selection;
  std::uint64_t seed = 20240101;
};

/// Truth theta(h) for the design.
Theta design_truth(const McDesign& design, double h);

struct McRow {
  int n = 0;
  Criterion criterion = Criterion::MLE;
  double h = 0.0;
  double power = 0.0;
  double mc_se = 0.0;
  int reps = 0;
};

/// Rejection rate of the cross-fit test per h. `workers` threads split the
/// replication range; aggregation is order-independent count summation.
std::vector<McRow> mc_table(const McDesign& design, const ModelSpec& model,
                            int workers = 1);

/// mc_table projected to an ordered (h, power) series.
std::vector<std::pair<double, double>> power_curve(const McDesign& design,
                                                   const ModelSpec& model,
                                                   int workers = 1);

/// One replication's cross-fit record (used by the e-value diagnostics).
TestRecord mc_replication(const McDesign& design, const ModelSpec& model,
                          double h, int rep);

/// Table 1 design: no-covariate game, H0: theta = 0, truth (-h,-h).
McDesign table1_design(int n, Criterion criterion);
/// Table 2 design: discrete-covariate game, H0: delta = 0 with beta
/// nuisance grid, truth beta = -0.5, delta = (h,h).
McDesign table2_design(int n);

}  // namespace lfp

#endif  // LFP_SIMULATION_HPP

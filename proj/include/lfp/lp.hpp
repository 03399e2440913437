#ifndef LFP_LP_HPP
#define LFP_LP_HPP

#include <stdexcept>
#include <vector>

// Dense two-phase primal simplex with Bland's rule. Problems here are tiny
// (at most 2^m + m variables) so no sparsity or numerical pivoting tricks.

namespace lfp {

class CoreInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolveStatus { Converged, MaxIter, Infeasible };

struct SolveReport {
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::Converged;
};

enum class Relation { LessEq, GreaterEq, Eq };

struct LpConstraint {
  std::vector<double> a;
  Relation rel = Relation::LessEq;
  double b = 0.0;
};

/// minimize c'x  s.t. constraints, x >= 0.
struct LpProblem {
  std::vector<double> c;
  std::vector<LpConstraint> rows;
};

struct LpSolution {
  std::vector<double> x;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Converged;
  int iterations = 0;
};

LpSolution lp_solve(const LpProblem& prob, int max_iter = 10000);

}  // namespace lfp

#endif  // LFP_LP_HPP

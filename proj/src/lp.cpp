#include "lfp/lp.hpp"

#include <cmath>
#include <cstddef>

namespace lfp {

namespace {

constexpr double kTol = 1e-10;

// Tableau with basis bookkeeping; Bland's rule (lowest index enters/leaves)
// keeps the pivot order deterministic and cycle-free.
struct Tableau {
  int rows = 0;  // constraints
  int cols = 0;  // structural + slack + artificial
  int enterable = 0;  // columns past this never enter the basis
  std::vector<double> t;  // (rows+1) x (cols+1), last row objective,
                          // last column rhs
  std::vector<int> basis;

  double& at(int r, int c) { return t[static_cast<std::size_t>(r) * (cols + 1) + c]; }
  double at(int r, int c) const { return t[static_cast<std::size_t>(r) * (cols + 1) + c]; }

  void pivot(int pr, int pc) {
    const double pv = at(pr, pc);
    for (int c = 0; c <= cols; ++c) at(pr, c) /= pv;
    for (int r = 0; r <= rows; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (int c = 0; c <= cols; ++c) at(r, c) -= f * at(pr, c);
    }
    basis[pr] = pc;
  }

  // returns iterations used, or -1 if iteration cap hit
  int run(int max_iter) {
    int it = 0;
    while (it < max_iter) {
      int pc = -1;
      for (int c = 0; c < enterable; ++c) {
        if (at(rows, c) < -kTol) {  // reduced cost (minimization tableau)
          pc = c;
          break;
        }
      }
      if (pc < 0) return it;
      int pr = -1;
      double best = 0.0;
      for (int r = 0; r < rows; ++r) {
        const double a = at(r, pc);
        if (a > kTol) {
          const double ratio = at(r, cols) / a;
          if (pr < 0 || ratio < best - kTol ||
              (ratio < best + kTol && basis[r] < basis[pr])) {
            pr = r;
            best = ratio;
          }
        }
      }
      if (pr < 0) return it;  // unbounded; caller inspects reduced costs
      pivot(pr, pc);
      ++it;
    }
    return -1;
  }
};

}  // namespace

LpSolution lp_solve(const LpProblem& prob, int max_iter) {
  const int n = static_cast<int>(prob.c.size());
  const int m = static_cast<int>(prob.rows.size());

  // count slacks
  int n_slack = 0;
  for (const auto& row : prob.rows)
    if (row.rel != Relation::Eq) ++n_slack;

  Tableau tab;
  tab.rows = m;
  tab.cols = n + n_slack + m;  // artificials for every row
  tab.t.assign(static_cast<std::size_t>(m + 1) * (tab.cols + 1), 0.0);
  tab.basis.assign(m, -1);

  int slack_ix = n;
  for (int r = 0; r < m; ++r) {
    const auto& row = prob.rows[r];
    double sign = 1.0;
    if (row.b < 0.0) sign = -1.0;  // keep rhs nonnegative
    for (int c = 0; c < n; ++c) tab.at(r, c) = sign * row.a[c];
    tab.at(r, tab.cols) = sign * row.b;
    if (row.rel != Relation::Eq) {
      const double s = (row.rel == Relation::LessEq) ? 1.0 : -1.0;
      tab.at(r, slack_ix) = sign * s;
      ++slack_ix;
    }
  }

  // phase 1: minimize sum of artificials
  for (int r = 0; r < m; ++r) {
    const int art = n + n_slack + r;
    // if the slack enters with +1 it can start in the basis instead
    bool used_slack = false;
    for (int c = n; c < n + n_slack; ++c) {
      if (tab.at(r, c) == 1.0) {
        bool clean = true;
        for (int r2 = 0; r2 < m; ++r2)
          if (r2 != r && tab.at(r2, c) != 0.0) clean = false;
        if (clean) {
          tab.basis[r] = c;
          used_slack = true;
          break;
        }
      }
    }
    if (!used_slack) {
      tab.at(r, art) = 1.0;
      tab.basis[r] = art;
      for (int c = 0; c <= tab.cols; ++c)
        if (c != art) tab.at(m, c) -= tab.at(r, c);
    }
  }

  LpSolution sol;
  tab.enterable = tab.cols;
  int it1 = tab.run(max_iter);
  if (it1 < 0) {
    sol.status = SolveStatus::MaxIter;
    return sol;
  }
  if (tab.at(m, tab.cols) < -1e-7) {
    sol.status = SolveStatus::Infeasible;
    sol.iterations = it1;
    return sol;
  }
  // drive leftover artificials out of the basis where possible
  for (int r = 0; r < m; ++r) {
    if (tab.basis[r] >= n + n_slack) {
      for (int c = 0; c < n + n_slack; ++c) {
        if (std::abs(tab.at(r, c)) > kTol) {
          tab.pivot(r, c);
          break;
        }
      }
    }
  }

  // phase 2: artificial columns are frozen (a leftover basic artificial sits
  // at value zero in a redundant row)
  tab.enterable = n + n_slack;
  for (int c = 0; c <= tab.cols; ++c) tab.at(m, c) = 0.0;
  for (int c = 0; c < n; ++c) tab.at(m, c) = prob.c[c];
  for (int r = 0; r < m; ++r) {
    const int b = tab.basis[r];
    const double cb = tab.at(m, b);
    if (cb != 0.0)
      for (int c = 0; c <= tab.cols; ++c) tab.at(m, c) -= cb * tab.at(r, c);
  }

  int it2 = tab.run(max_iter);
  if (it2 < 0) {
    sol.status = SolveStatus::MaxIter;
    return sol;
  }

  sol.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r)
    if (tab.basis[r] < n) sol.x[tab.basis[r]] = tab.at(r, tab.cols);
  sol.objective = 0.0;
  for (int c = 0; c < n; ++c) sol.objective += prob.c[c] * sol.x[c];
  sol.status = SolveStatus::Converged;
  sol.iterations = it1 + it2;
  return sol;
}

}  // namespace lfp

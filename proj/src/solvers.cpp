#include "lfp/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lfp {

namespace {

constexpr double kPinTol = 1e-12;
constexpr double kMuFloor = 1e-12;
constexpr double kRidge = 1e-11;

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<int> mask_members(Mask a, int m) {
  std::vector<int> out;
  for (int y = 0; y < m; ++y)
    if (a & (Mask{1} << y)) out.push_back(y);
  return out;
}

// Smooth objective on the free coordinates; diagonal Hessians cover the
// single-density programs, the pair program overrides with 2x2 blocks.
struct Objective {
  virtual ~Objective() = default;
  virtual double value(const VectorXd& q) const = 0;
  virtual VectorXd grad(const VectorXd& q) const = 0;
  virtual MatrixXd hess(const VectorXd& q) const = 0;
};

struct BarrierResult {
  VectorXd x;
  SolveReport report;
};

// Log-barrier Newton over {A_in x >= b_in, E x = e}. The start point must
// satisfy the equalities and have strictly positive inequality slacks.
// mu schedule: 1.0 down to 1e-10 by factors of 10, Armijo backtracking
// (c = 1e-4, halving). Deterministic for fixed inputs.
BarrierResult barrier_newton(const Objective& obj, const MatrixXd& A_in,
                             const VectorXd& b_in, const MatrixXd& E,
                             const VectorXd& e, VectorXd x) {
  const int n = static_cast<int>(x.size());
  const int ni = static_cast<int>(b_in.size());
  const int ne = static_cast<int>(e.size());
  BarrierResult res;
  res.report.status = SolveStatus::Converged;

  auto slacks = [&](const VectorXd& q) -> VectorXd {
    if (ni == 0) return VectorXd();
    return A_in * q - b_in;
  };
  auto barrier_value = [&](const VectorXd& q, double mu) {
    double v = obj.value(q);
    const VectorXd s = slacks(q);
    for (int j = 0; j < ni; ++j) {
      if (s[j] <= 0.0) return std::numeric_limits<double>::infinity();
      v -= mu * std::log(s[j]);
    }
    return v;
  };

  int total_iter = 0;
  double mu = 1.0;
  double prev_outer_obj = std::numeric_limits<double>::infinity();
  while (true) {
    for (int it = 0; it < 50; ++it) {
      const VectorXd s = slacks(x);
      VectorXd g = obj.grad(x);
      MatrixXd H = obj.hess(x);
      for (int i = 0; i < n; ++i) H(i, i) += kRidge;
      for (int j = 0; j < ni; ++j) {
        g -= (mu / s[j]) * A_in.row(j).transpose();
        H += (mu / (s[j] * s[j])) * A_in.row(j).transpose() * A_in.row(j);
      }
      MatrixXd kkt = MatrixXd::Zero(n + ne, n + ne);
      kkt.topLeftCorner(n, n) = H;
      if (ne > 0) {
        kkt.topRightCorner(n, ne) = E.transpose();
        kkt.bottomLeftCorner(ne, n) = E;
      }
      VectorXd rhs = VectorXd::Zero(n + ne);
      rhs.head(n) = -g;
      const VectorXd sol = kkt.fullPivLu().solve(rhs);
      const VectorXd dx = sol.head(n);
      ++total_iter;
      const double decrement = -g.dot(dx);
      if (!(decrement > 1e-24) || dx.lpNorm<Eigen::Infinity>() < 1e-14) break;

      // keep iterates strictly inside the inequality region
      double t_max = 1.0;
      if (ni > 0) {
        const VectorXd ds = A_in * dx;
        for (int j = 0; j < ni; ++j)
          if (ds[j] < 0.0) t_max = std::min(t_max, -0.99 * s[j] / ds[j]);
      }
      double t = std::min(1.0, t_max);
      const double f0 = barrier_value(x, mu);
      const double slope = g.dot(dx);
      int halvings = 0;
      while (halvings < 60) {
        const double f1 = barrier_value(x + t * dx, mu);
        if (f1 <= f0 + 1e-4 * t * slope) break;
        t *= 0.5;
        ++halvings;
      }
      if (halvings >= 60) break;
      x += t * dx;
      if (total_iter > 5000) {
        res.report.status = SolveStatus::MaxIter;
        break;
      }
    }
    // bookkeeping only; the central path keeps this monotone
    prev_outer_obj = std::min(prev_outer_obj, obj.value(x));
    if (mu <= kMuFloor * 1.0000001 || res.report.status == SolveStatus::MaxIter)
      break;
    mu *= 0.1;
    if (mu < kMuFloor) mu = kMuFloor;
  }

  // KKT residual of the original program: lambda_j = mu/s_j,
  // stationarity projected onto the equality multipliers by least squares,
  // complementarity lambda_j s_j = mu.
  VectorXd r = obj.grad(x);
  if (ni > 0) {
    const VectorXd s = slacks(x);
    for (int j = 0; j < ni; ++j) r -= (mu / s[j]) * A_in.row(j).transpose();
  }
  if (ne > 0) {
    const VectorXd nu_eq =
        E.transpose().colPivHouseholderQr().solve(r);
    r -= E.transpose() * nu_eq;
  }
  res.report.kkt_residual =
      std::max(ni > 0 ? mu : 0.0, r.lpNorm<Eigen::Infinity>());
  res.report.objective = obj.value(x);
  res.report.iterations = total_iter;
  res.x = std::move(x);
  return res;
}

// --- core facial structure -------------------------------------------------

// Equality system on the free coordinates of a core, with rows deduplicated
// by Gram-Schmidt.
struct ReducedCore {
  std::vector<int> free_ix;        // outcomes not pinned as singletons
  std::vector<double> fixed;       // fixed value per outcome (free ones 0)
  Mask fixed_mask = 0;
  MatrixXd E;                      // equalities on free coords (incl. sum row)
  VectorXd e;
  MatrixXd A;                      // inequalities on free coords
  VectorXd b;
  std::vector<Mask> ineq_events;
};

ReducedCore reduce_core(const Capacity& c, const CoreGeometry& geo) {
  const int m = c.m();
  ReducedCore rc;
  rc.fixed.assign(m, 0.0);

  // singleton pins fix coordinates outright
  std::vector<bool> is_fixed(m, false);
  for (std::size_t i = 0; i < geo.pinned.size(); ++i) {
    if (popcount(geo.pinned[i]) == 1) {
      const int y = mask_members(geo.pinned[i], m)[0];
      is_fixed[y] = true;
      rc.fixed[y] = geo.pin_values[i];
      rc.fixed_mask |= geo.pinned[i];
    }
  }
  for (int y = 0; y < m; ++y)
    if (!is_fixed[y]) rc.free_ix.push_back(y);
  const int nf = static_cast<int>(rc.free_ix.size());
  if (nf == 0) return rc;

  std::vector<int> pos(m, -1);
  for (int i = 0; i < nf; ++i) pos[rc.free_ix[i]] = i;

  double fixed_total = 0.0;
  for (int y = 0; y < m; ++y) fixed_total += rc.fixed[y];

  std::vector<VectorXd> eq_rows;
  std::vector<double> eq_vals;
  {
    VectorXd row = VectorXd::Ones(nf);
    eq_rows.push_back(row);
    eq_vals.push_back(1.0 - fixed_total);
  }
  for (std::size_t i = 0; i < geo.pinned.size(); ++i) {
    if (popcount(geo.pinned[i]) == 1) continue;
    VectorXd row = VectorXd::Zero(nf);
    double rhs = geo.pin_values[i];
    for (int y : mask_members(geo.pinned[i], m)) {
      if (pos[y] >= 0)
        row[pos[y]] = 1.0;
      else
        rhs -= rc.fixed[y];
    }
    eq_rows.push_back(row);
    eq_vals.push_back(rhs);
  }
  // Gram-Schmidt dedup of equality rows
  std::vector<VectorXd> basis;
  std::vector<int> kept;
  for (std::size_t i = 0; i < eq_rows.size(); ++i) {
    VectorXd v = eq_rows[i];
    for (const auto& u : basis) v -= u.dot(eq_rows[i]) * u;
    if (v.norm() > 1e-10) {
      basis.push_back(v / v.norm());
      kept.push_back(static_cast<int>(i));
    }
  }
  rc.E.resize(kept.size(), nf);
  rc.e.resize(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    rc.E.row(i) = eq_rows[kept[i]].transpose();
    rc.e[i] = eq_vals[kept[i]];
  }

  rc.A.resize(geo.free_events.size(), nf);
  rc.b.resize(geo.free_events.size());
  rc.ineq_events = geo.free_events;
  for (std::size_t j = 0; j < geo.free_events.size(); ++j) {
    VectorXd row = VectorXd::Zero(nf);
    double rhs = c(geo.free_events[j]);
    for (int y : mask_members(geo.free_events[j], m)) {
      if (pos[y] >= 0)
        row[pos[y]] = 1.0;
      else
        rhs -= rc.fixed[y];
    }
    rc.A.row(j) = row.transpose();
    rc.b[j] = rhs;
  }
  return rc;
}

Density assemble(const ReducedCore& rc, const VectorXd& qfree, int /*m*/) {
  std::vector<double> q = rc.fixed;
  for (std::size_t i = 0; i < rc.free_ix.size(); ++i)
    q[rc.free_ix[i]] = std::max(0.0, qfree[static_cast<int>(i)]);
  return Density(std::move(q));
}

}  // namespace

GameEtas::GameEtas(double e1, double e2, double e3)
    : eta1(e1), eta2(e2), eta3(e3) {
  const double tol = 1e-9;
  if (e3 < -tol || e3 > e2 + tol || e2 > e1 + tol || e1 > 1.0 + tol)
    throw std::invalid_argument("GameEtas: need 0 <= eta3 <= eta2 <= eta1 <= 1");
}

CoreGeometry analyze_core(const Capacity& c) {
  const int m = c.m();
  const Mask full = c.full_mask();
  CoreGeometry geo;
  for (Mask a = 1; a < full; ++a) {
    const double gap = 1.0 - c(a) - c(full & ~a);  // nu*(A) - nu(A)
    if (gap <= kPinTol) {
      geo.pinned.push_back(a);
      geo.pin_values.push_back(c(a));
    } else {
      geo.free_events.push_back(a);
    }
  }
  for (int y = 0; y < m; ++y) {
    const Mask sing = Mask{1} << y;
    if (1.0 - c(full & ~sing) <= kPinTol && c(sing) <= kPinTol)
      geo.zero_outcomes |= sing;
  }

  // lexicographic max-min-slack interior point: pins as equalities, a common
  // slack variable on the free events
  const ReducedCore rc = reduce_core(c, geo);
  const int nf = static_cast<int>(rc.free_ix.size());
  if (nf == 0) {
    geo.interior = rc.fixed;
    geo.min_slack = 0.0;
    return geo;
  }
  LpProblem prob;
  prob.c.assign(nf + 1, 0.0);
  prob.c[nf] = -1.0;  // max eps
  for (int r = 0; r < rc.E.rows(); ++r) {
    LpConstraint row;
    row.a.assign(nf + 1, 0.0);
    for (int i = 0; i < nf; ++i) row.a[i] = rc.E(r, i);
    row.rel = Relation::Eq;
    row.b = rc.e[r];
    prob.rows.push_back(row);
  }
  for (int r = 0; r < rc.A.rows(); ++r) {
    LpConstraint row;
    row.a.assign(nf + 1, 0.0);
    for (int i = 0; i < nf; ++i) row.a[i] = rc.A(r, i);
    row.a[nf] = -1.0;
    row.rel = Relation::GreaterEq;
    row.b = rc.b[r];
    prob.rows.push_back(row);
  }
  const LpSolution sol = lp_solve(prob);
  if (sol.status != SolveStatus::Converged)
    throw CoreInfeasible("analyze_core: empty core");
  geo.interior = rc.fixed;
  for (int i = 0; i < nf; ++i) geo.interior[rc.free_ix[i]] = sol.x[i];
  geo.min_slack = sol.x[nf];
  return geo;
}

Density feasibility_density(const Capacity& c) {
  return feasibility_density_on_support(c, 0);
}

Density feasibility_density_on_support(const Capacity& c, Mask dropped) {
  const CoreGeometry geo = analyze_core(c);
  Density p(geo.interior);
  for (int y = 0; y < c.m(); ++y) {
    if (dropped & (Mask{1} << y)) continue;
    if (p[y] <= kPinTol)
      throw CoreInfeasible(
          "feasibility_density: nu*({y}) = 0, no strictly positive density");
  }
  return p;
}

namespace {

struct LfpObjective final : Objective {
  std::vector<double> p;  // representative density on the free coordinates

  double value(const VectorXd& q) const override {
    double v = 0.0;
    for (int i = 0; i < q.size(); ++i) {
      if (p[i] <= 0.0) continue;
      if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
      v += (q[i] + p[i]) * std::log((q[i] + p[i]) / q[i]);
    }
    return v;
  }
  VectorXd grad(const VectorXd& q) const override {
    VectorXd g = VectorXd::Zero(q.size());
    for (int i = 0; i < q.size(); ++i) {
      if (p[i] <= 0.0) continue;
      const double r = p[i] / q[i];
      g[i] = std::log1p(r) - r;
    }
    return g;
  }
  MatrixXd hess(const VectorXd& q) const override {
    MatrixXd h = MatrixXd::Zero(q.size(), q.size());
    for (int i = 0; i < q.size(); ++i) {
      if (p[i] <= 0.0) continue;
      h(i, i) = p[i] * p[i] / (q[i] * q[i] * (q[i] + p[i]));
    }
    return h;
  }
};

struct KlObjective final : Objective {
  std::vector<double> p_hat;

  double value(const VectorXd& q) const override {
    double v = 0.0;
    for (int i = 0; i < q.size(); ++i) {
      if (p_hat[i] <= 0.0) continue;  // 0 ln 0 = 0
      if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
      v += p_hat[i] * std::log(p_hat[i] / q[i]);
    }
    return v;
  }
  VectorXd grad(const VectorXd& q) const override {
    VectorXd g = VectorXd::Zero(q.size());
    for (int i = 0; i < q.size(); ++i)
      if (p_hat[i] > 0.0) g[i] = -p_hat[i] / q[i];
    return g;
  }
  MatrixXd hess(const VectorXd& q) const override {
    MatrixXd h = MatrixXd::Zero(q.size(), q.size());
    for (int i = 0; i < q.size(); ++i)
      if (p_hat[i] > 0.0) h(i, i) = p_hat[i] / (q[i] * q[i]);
    return h;
  }
};

// Joint pair objective; variables are the free coordinates of core 0
// followed by the free coordinates of core 1. Fixed coordinates of either
// block enter as constants.
struct PairObjective final : Objective {
  int m = 0;
  std::vector<double> fixed0, fixed1;  // full-length, 0 on free coords
  std::vector<int> var0, var1;         // per outcome: variable index or -1

  double term(double a, double b) const {  // (a+b) ln((a+b)/a)
    if (b <= 0.0) return 0.0;
    if (a <= 0.0) return std::numeric_limits<double>::infinity();
    return (a + b) * std::log((a + b) / a);
  }
  void expand(const VectorXd& q, std::vector<double>& q0,
              std::vector<double>& q1) const {
    q0 = fixed0;
    q1 = fixed1;
    for (int y = 0; y < m; ++y) {
      if (var0[y] >= 0) q0[y] = q[var0[y]];
      if (var1[y] >= 0) q1[y] = q[var1[y]];
    }
  }
  double value(const VectorXd& q) const override {
    std::vector<double> q0, q1;
    expand(q, q0, q1);
    double v = 0.0;
    for (int y = 0; y < m; ++y) v += term(q0[y], q1[y]);
    return v;
  }
  VectorXd grad(const VectorXd& q) const override {
    std::vector<double> q0, q1;
    expand(q, q0, q1);
    VectorXd g = VectorXd::Zero(q.size());
    for (int y = 0; y < m; ++y) {
      const double a = q0[y], b = q1[y];
      if (a <= 0.0) continue;
      const double l = std::log1p(b / a);
      if (var0[y] >= 0) g[var0[y]] = l - b / a;
      if (var1[y] >= 0) g[var1[y]] = l + 1.0;
    }
    return g;
  }
  MatrixXd hess(const VectorXd& q) const override {
    std::vector<double> q0, q1;
    expand(q, q0, q1);
    MatrixXd h = MatrixXd::Zero(q.size(), q.size());
    for (int y = 0; y < m; ++y) {
      const double a = q0[y], b = q1[y];
      if (a <= 0.0) continue;
      const double s = a + b;
      const double h00 = b * b / (s * a * a);
      const double h01 = -b / (s * a);
      const double h11 = 1.0 / s;
      if (var0[y] >= 0) h(var0[y], var0[y]) = h00;
      if (var1[y] >= 0) h(var1[y], var1[y]) = h11;
      if (var0[y] >= 0 && var1[y] >= 0) {
        h(var0[y], var1[y]) = h01;
        h(var1[y], var0[y]) = h01;
      }
    }
    return h;
  }
};

VectorXd interior_start(const ReducedCore& rc, const CoreGeometry& geo) {
  const int nf = static_cast<int>(rc.free_ix.size());
  VectorXd x(nf);
  for (int i = 0; i < nf; ++i) x[i] = geo.interior[rc.free_ix[i]];
  // snap onto the equality set exactly
  if (rc.E.rows() > 0) {
    const VectorXd resid = rc.e - rc.E * x;
    x += rc.E.transpose() *
         (rc.E * rc.E.transpose()).ldlt().solve(resid);
  }
  return x;
}

}  // namespace

std::pair<Density, SolveReport> lfp_density(const Capacity& c_theta,
                                            const Density& p) {
  const int m = c_theta.m();
  if (p.m() != m) throw std::invalid_argument("lfp_density: dim mismatch");
  const CoreGeometry geo = analyze_core(c_theta);
  const ReducedCore rc = reduce_core(c_theta, geo);
  const int nf = static_cast<int>(rc.free_ix.size());
  if (nf == 0) {
    SolveReport rep;
    rep.status = SolveStatus::Converged;
    Density q(rc.fixed);
    LfpObjective full;
    full.p = p.probs;
    VectorXd qv(m);
    for (int y = 0; y < m; ++y) qv[y] = q[y];
    rep.objective = full.value(qv);
    return {q, rep};
  }
  LfpObjective obj;
  obj.p.resize(nf);
  for (int i = 0; i < nf; ++i) obj.p[i] = p[rc.free_ix[i]];
  BarrierResult br = barrier_newton(obj, rc.A, rc.b, rc.E, rc.e,
                                    interior_start(rc, geo));
  return {assemble(rc, br.x, m), br.report};
}

std::pair<Density, SolveReport> kl_projection(const Density& p_hat,
                                              const Capacity& c_theta) {
  const int m = c_theta.m();
  if (p_hat.m() != m) throw std::invalid_argument("kl_projection: dim mismatch");
  const CoreGeometry geo = analyze_core(c_theta);
  const ReducedCore rc = reduce_core(c_theta, geo);
  const int nf = static_cast<int>(rc.free_ix.size());
  if (nf == 0) {
    SolveReport rep;
    rep.status = SolveStatus::Converged;
    return {Density(rc.fixed), rep};
  }
  KlObjective obj;
  obj.p_hat.resize(nf);
  for (int i = 0; i < nf; ++i) obj.p_hat[i] = p_hat[rc.free_ix[i]];
  BarrierResult br = barrier_newton(obj, rc.A, rc.b, rc.E, rc.e,
                                    interior_start(rc, geo));
  return {assemble(rc, br.x, m), br.report};
}

LfpPair lfp_pair(const Capacity& c0, const Capacity& c1) {
  const int m = c0.m();
  if (c1.m() != m) throw std::invalid_argument("lfp_pair: dim mismatch");
  const CoreGeometry g0 = analyze_core(c0);
  const CoreGeometry g1 = analyze_core(c1);
  const ReducedCore r0 = reduce_core(c0, g0);
  const ReducedCore r1 = reduce_core(c1, g1);
  const int n0 = static_cast<int>(r0.free_ix.size());
  const int n1 = static_cast<int>(r1.free_ix.size());

  PairObjective obj;
  obj.m = m;
  obj.fixed0 = r0.fixed;
  obj.fixed1 = r1.fixed;
  obj.var0.assign(m, -1);
  obj.var1.assign(m, -1);
  for (int i = 0; i < n0; ++i) obj.var0[r0.free_ix[i]] = i;
  for (int i = 0; i < n1; ++i) obj.var1[r1.free_ix[i]] = n0 + i;

  const int n = n0 + n1;
  MatrixXd A = MatrixXd::Zero(r0.A.rows() + r1.A.rows(), n);
  VectorXd b(r0.A.rows() + r1.A.rows());
  A.topLeftCorner(r0.A.rows(), n0) = r0.A;
  b.head(r0.A.rows()) = r0.b;
  A.bottomRightCorner(r1.A.rows(), n1) = r1.A;
  b.tail(r1.A.rows()) = r1.b;
  MatrixXd E = MatrixXd::Zero(r0.E.rows() + r1.E.rows(), n);
  VectorXd e(r0.E.rows() + r1.E.rows());
  E.topLeftCorner(r0.E.rows(), n0) = r0.E;
  e.head(r0.E.rows()) = r0.e;
  E.bottomRightCorner(r1.E.rows(), n1) = r1.E;
  e.tail(r1.E.rows()) = r1.e;

  VectorXd x(n);
  x.head(n0) = interior_start(r0, g0);
  x.tail(n1) = interior_start(r1, g1);

  if (n == 0) {
    SolveReport rep;
    rep.status = SolveStatus::Converged;
    Density q0(r0.fixed), q1(r1.fixed);
    VectorXd empty(0);
    rep.objective = obj.value(empty);
    return {q0, q1, rep};
  }
  BarrierResult br = barrier_newton(obj, A, b, E, e, x);
  return {assemble(r0, br.x.head(n0), m), assemble(r1, br.x.tail(n1), m),
          br.report};
}

Density entry_game_lfp(const GameEtas& e, const Density& p, double f00,
                       double f11) {
  if (p.m() != 4) throw std::invalid_argument("entry_game_lfp: need m = 4");
  if (std::abs(f00 + f11 + e.eta1 - 1.0) > 1e-9)
    throw std::invalid_argument("entry_game_lfp: f00 + f11 + eta1 != 1");
  if (p[1] <= 0.0 || p[2] <= 0.0)
    throw std::invalid_argument(
        "entry_game_lfp: p must be positive on (0,1) and (1,0)");
  const double p_rel = p[2] / (p[2] + p[1]);
  const double zbe = p_rel * e.eta1;
  double q10;
  if (zbe > e.eta2)
    q10 = e.eta2;
  else if (zbe < e.eta3)
    q10 = e.eta3;
  else
    q10 = zbe;  // proportional regime, boundary ties included
  return Density({f00, e.eta1 - q10, q10, f11});
}

}  // namespace lfp

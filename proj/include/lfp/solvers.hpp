#ifndef LFP_SOLVERS_HPP
#define LFP_SOLVERS_HPP

#include <utility>
#include <vector>

#include "lfp/capacity.hpp"
#include "lfp/lp.hpp"

// Convex programs over core polytopes: the feasibility density, the
// LFP density and pair programs, and the KL projection, all driven by a
// log-barrier Newton method on the non-pinned core constraints. Exactness of
// containment functionals gives the facial structure directly: the event A is
// an implicit equality of the core iff nu(A) + nu(A^c) = 1.

namespace lfp {

/// eta_1: mass not pinned to (0,0)/(1,1); eta_2/eta_3: upper/lower bound on
/// the probability of (1,0).
struct GameEtas {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;

  GameEtas(double e1, double e2, double e3);
};

/// Facial structure of a core polytope plus a strictly relative-interior
/// point, shared by the feasibility LP and the barrier solvers.
struct CoreGeometry {
  std::vector<Mask> pinned;        // events with nu(A) + nu(A^c) = 1
  std::vector<double> pin_values;  // the common Q(A) on those events
  std::vector<Mask> free_events;   // proper nonempty events, not pinned
  Mask zero_outcomes = 0;          // outcomes with nu*({y}) = 0
  std::vector<double> interior;    // lexicographic max-min-slack point
  double min_slack = 0.0;          // slack of the free events at `interior`
};

CoreGeometry analyze_core(const Capacity& c);

/// Max-min-slack density: max eps s.t. core constraints with slack >= eps and
/// p_y >= eps. Throws CoreInfeasible if no strictly positive density exists
/// (i.e. nu*({y}) = 0 for some outcome y).
Density feasibility_density(const Capacity& c);

/// As above but with the outcomes in `dropped` fixed at probability zero and
/// excluded from the positivity requirement.
Density feasibility_density_on_support(const Capacity& c, Mask dropped);

/// LFP density per the convex program
///   min sum_y (q_y + p_y) ln((q_y + p_y)/q_y)  s.t.  q in core(c_theta).
std::pair<Density, SolveReport> lfp_density(const Capacity& c_theta,
                                            const Density& p);

/// General LFP pair program: both densities free, each in its own core,
/// joint objective sum_y (q0_y + q1_y) ln((q0_y + q1_y)/q0_y).
struct LfpPair {
  Density q0;
  Density q1;
  SolveReport report;
};
LfpPair lfp_pair(const Capacity& c0, const Capacity& c1);

/// KL projection: min sum_y phat_y ln(phat_y / q_y) over the core
/// (0 ln 0 = 0 convention).
std::pair<Density, SolveReport> kl_projection(const Density& p_hat,
                                              const Capacity& c_theta);

/// Closed-form LFP density for the two-player entry game. Outcomes are
/// indexed ((0,0), (0,1), (1,0), (1,1)); p must be strictly positive on
/// (0,1) and (1,0); f00 + f11 + eta1 = 1 is required within 1e-9.
/// Regime ties resolve to the proportional branch.
Density entry_game_lfp(const GameEtas& e, const Density& p, double f00,
                       double f11);

}  // namespace lfp

#endif  // LFP_SOLVERS_HPP

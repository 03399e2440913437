#ifndef LFP_CAPACITY_HPP
#define LFP_CAPACITY_HPP

#include <cstdint>
#include <string>
#include <vector>

// Finite outcome spaces, subset algebra, containment functionals, cores,
// conjugates, Choquet integrals and monotonicity oracles.
//
// Subsets of the outcome space are m-bit masks; capacities are dense arrays
// of length 2^m. All types are immutable values after construction and all
// operations are pure functions.

namespace lfp {

using Mask = std::uint32_t;

inline int popcount(Mask m) { return __builtin_popcount(m); }

/// Ordered finite outcome space with distinct string labels, 2 <= m <= 20.
class OutcomeSpace {
 public:
  explicit OutcomeSpace(std::vector<std::string> labels);

  int size() const { return static_cast<int>(labels_.size()); }
  Mask full_mask() const { return (Mask{1} << size()) - 1; }
  const std::string& label(int y) const { return labels_[y]; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Index of a label, or -1 if absent.
  int index_of(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
};

struct RandomSetAtom {
  Mask set = 0;
  double mass = 0.0;
};

/// Finite distribution of a random set: atoms (nonempty subset, mass).
/// Duplicate masks are merged, masses below 1e-14 pruned, then the
/// distribution is renormalized.
class RandomSetDistribution {
 public:
  RandomSetDistribution(int m, std::vector<RandomSetAtom> atoms);

  int m() const { return m_; }
  const std::vector<RandomSetAtom>& atoms() const { return atoms_; }

 private:
  int m_;
  std::vector<RandomSetAtom> atoms_;
};

/// Normalized monotone set function on the 2^m subsets of an m-element space.
class Capacity {
 public:
  Capacity(int m, std::vector<double> values);

  int m() const { return m_; }
  Mask full_mask() const { return (Mask{1} << m_) - 1; }
  double operator()(Mask a) const { return values_[a]; }
  const std::vector<double>& values() const { return values_; }

 private:
  int m_;
  std::vector<double> values_;
};

struct Density {
  std::vector<double> probs;

  explicit Density(std::vector<double> p);
  int m() const { return static_cast<int>(probs.size()); }
  double operator[](int y) const { return probs[y]; }

  /// Q(A) = sum of probs over the members of the mask.
  double mass(Mask a) const;
};

/// Containment functional nu(A) = sum of masses of atoms K with K subset A.
Capacity containment_from_random_set(const RandomSetDistribution& d);

/// Conjugate capacity nu*(A) = 1 - nu(A^c).
Capacity conjugate(const Capacity& c);

/// Order-k monotonicity check. Exhaustive over subset tuples for m <= 5,
/// randomized sampling of 10^4 tuples above (fixed default seed).
bool check_k_monotone(const Capacity& c, int k, std::uint64_t seed = 20240101);

/// True iff Q(A) >= nu(A) - 1e-9 for every subset A.
bool core_membership(const Density& q, const Capacity& c);

/// min_{Q in core} Q(A), by linear programming over the core polytope.
/// For a containment functional this equals c(A) (exactness).
/// Throws CoreInfeasible if the core is empty.
double lower_envelope(const Capacity& c, Mask a);

/// Choquet integral of the per-outcome values f against c, via the finite
/// layer-cake sum (two-term formula for general-signed f).
double choquet_integral(const std::vector<double>& f, const Capacity& c);

}  // namespace lfp

#endif  // LFP_CAPACITY_HPP

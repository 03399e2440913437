#ifndef LFP_NELDER_MEAD_HPP
#define LFP_NELDER_MEAD_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace lfp {

using Box = std::vector<std::pair<double, double>>;

struct NmOptions {
  int max_iter = 500;
  double tol = 1e-6;
  int multistarts = 5;
};

struct NmResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
};

/// Derivative-free simplex minimization clamped to the box. Deterministic:
/// fixed coefficients, no randomized restarts.
NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& start, const Box& box,
                     const NmOptions& opts = {});

/// Multistart wrapper: starts on a seeded Latin hypercube over the box,
/// ties broken by start index.
NmResult multistart_minimize(
    const std::function<double(const std::vector<double>&)>& f, const Box& box,
    std::uint64_t seed, const NmOptions& opts = {});

}  // namespace lfp

#endif  // LFP_NELDER_MEAD_HPP

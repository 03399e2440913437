#ifndef LFP_QUADRATURE_HPP
#define LFP_QUADRATURE_HPP

#include <vector>

namespace lfp {

struct QuadratureRule {
  std::vector<std::vector<double>> nodes;  // one latent point per row
  std::vector<double> weights;             // sum to 1
};

/// Gauss-Hermite rule rescaled so that it integrates against the standard
/// normal density: sum_i w_i f(x_i) ~ E[f(Z)], Z ~ N(0,1).
QuadratureRule gauss_hermite_normal(int n);

/// Tensor product of the one-dimensional rule across `dim` independent
/// standard normal coordinates.
QuadratureRule gauss_hermite_normal(int n, int dim);

}  // namespace lfp

#endif  // LFP_QUADRATURE_HPP

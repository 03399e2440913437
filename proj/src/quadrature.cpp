#include "lfp/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace lfp {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the Hermite
// recurrence, weights come from the first eigenvector components. Rescaling
// x -> sqrt(2) x and w -> w / sqrt(pi) turns the e^{-x^2} weight into the
// standard normal density.
QuadratureRule gauss_hermite_normal(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    double off = std::sqrt(i / 2.0);
    jac(i, i - 1) = off;
    jac(i - 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = {es.eigenvalues()(i) * std::sqrt(2.0)};
    double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;
    total += rule.weights[i];
  }
  for (auto& w : rule.weights) w /= total;
  return rule;
}

QuadratureRule gauss_hermite_normal(int n, int dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  QuadratureRule one = gauss_hermite_normal(n);
  QuadratureRule rule;
  rule.nodes.assign(1, {});
  rule.weights.assign(1, 1.0);
  for (int d = 0; d < dim; ++d) {
    std::vector<std::vector<double>> nodes;
    std::vector<double> weights;
    nodes.reserve(rule.nodes.size() * one.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      for (std::size_t j = 0; j < one.nodes.size(); ++j) {
        auto point = rule.nodes[i];
        point.push_back(one.nodes[j][0]);
        nodes.push_back(std::move(point));
        weights.push_back(rule.weights[i] * one.weights[j]);
      }
    }
    rule.nodes = std::move(nodes);
    rule.weights = std::move(weights);
  }
  return rule;
}

}  // namespace lfp

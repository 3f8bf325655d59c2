#include "gsi/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "gsi/error.hpp"

namespace gsi {

namespace {

// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix of the
// orthogonal polynomial family (zero diagonal for symmetric weights).
QuadratureRule golub_welsch(const Vector& off_diagonal, double total_mass) {
  const Eigen::Index n = off_diagonal.size() + 1;
  Vector diagonal = Vector::Zero(n);
  Eigen::SelfAdjointEigenSolver<Matrix> solver;
  solver.computeFromTridiagonal(diagonal, off_diagonal, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) fail(ErrorKind::resource, "quadrature eigen-solve did not converge");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    rule.weights[static_cast<std::size_t>(i)] = total_mass * v0 * v0;
  }
  // Symmetrize: the exact rule is symmetric about zero.
  for (std::size_t i = 0, j = rule.nodes.size() - 1; i < j; ++i, --j) {
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (rule.nodes.size() % 2 == 1) rule.nodes[rule.nodes.size() / 2] = 0.0;
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) fail(ErrorKind::contract, "quadrature needs at least one node");
  if (n == 1) return {{0.0}, {1.0}};
  Vector beta(static_cast<Eigen::Index>(n - 1));
  for (Eigen::Index j = 1; j < static_cast<Eigen::Index>(n); ++j) {
    const double jj = static_cast<double>(j);
    beta(j - 1) = jj / std::sqrt(4.0 * jj * jj - 1.0);
  }
  return golub_welsch(beta, 1.0);
}

QuadratureRule gauss_hermite(std::size_t n) {
  if (n == 0) fail(ErrorKind::contract, "quadrature needs at least one node");
  if (n == 1) return {{0.0}, {1.0}};
  Vector beta(static_cast<Eigen::Index>(n - 1));
  for (Eigen::Index j = 1; j < static_cast<Eigen::Index>(n); ++j) beta(j - 1) = std::sqrt(static_cast<double>(j));
  return golub_welsch(beta, 1.0);
}

QuadratureRule rule_for(const Marginal& m, std::size_t nodes_per_dim) {
  if (const auto* u = std::get_if<Uniform>(&m)) {
    QuadratureRule r = gauss_legendre(nodes_per_dim);
    const double mid = 0.5 * (u->a + u->b), half = 0.5 * (u->b - u->a);
    for (double& x : r.nodes) x = mid + half * x;
    return r;
  }
  if (const auto* g = std::get_if<Normal>(&m)) {
    QuadratureRule r = gauss_hermite(nodes_per_dim);
    for (double& x : r.nodes) x = g->mean + g->sd * x;
    return r;
  }
  const auto& d = std::get<Discrete>(m);
  return {d.support, d.probabilities};
}

}  // namespace gsi

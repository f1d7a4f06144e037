#include "kaclab/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "kaclab/errors.hpp"

namespace kaclab {

namespace {

/// Nodes are the eigenvalues of the symmetric Jacobi matrix; weights are
/// mass * (first eigenvector component)^2.
QuadratureRule golub_welsch(const Eigen::VectorXd& off_diagonal, double mass)
{
  const auto n = off_diagonal.size() + 1;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = off_diagonal(k);
    jacobi(k + 1, k) = off_diagonal(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    const double c = solver.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = mass * c * c;
  }
  // Exact symmetry of the weight function: average mirrored pairs.
  for (Eigen::Index i = 0; i < n / 2; ++i) {
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(n - 1 - i);
    const double x = 0.5 * (rule.nodes[b] - rule.nodes[a]);
    const double w = 0.5 * (rule.weights[a] + rule.weights[b]);
    rule.nodes[a] = -x;
    rule.nodes[b] = x;
    rule.weights[a] = rule.weights[b] = w;
  }
  if (n % 2 == 1)
    rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace

QuadratureRule gauss_hermite(int n)
{
  if (n < 1)
    throw DomainError("gauss_hermite: need at least one node");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k)
    off(k - 1) = std::sqrt(static_cast<double>(k));
  return golub_welsch(off, 1.0);
}

QuadratureRule gauss_legendre(int n)
{
  if (n < 1)
    throw DomainError("gauss_legendre: need at least one node");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k)
    off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(off, 2.0);
}

double lagrange(const double* x, const double* y, int count, double t)
{
  double total = 0.0;
  for (int i = 0; i < count; ++i) {
    double basis = 1.0;
    for (int j = 0; j < count; ++j)
      if (j != i)
        basis *= (t - x[j]) / (x[i] - x[j]);
    total += basis * y[i];
  }
  return total;
}

}  // namespace kaclab

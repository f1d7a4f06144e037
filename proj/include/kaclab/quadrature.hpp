#pragma once

#include <vector>

namespace kaclab {

struct QuadratureRule
{
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss rule for the standard normal weight (probabilists' Hermite),
/// computed with the Golub-Welsch eigenvalue method. Weights sum to 1.
QuadratureRule gauss_hermite(int n);

/// Gauss-Legendre rule on [-1, 1]; weights sum to 2.
QuadratureRule gauss_legendre(int n);

/// Lagrange interpolation through (x[i], y[i]) evaluated at t.
double lagrange(const double* x, const double* y, int count, double t);

}  // namespace kaclab

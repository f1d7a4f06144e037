#pragma once

#include <vector>

#include "kaclab/core.hpp"

namespace kaclab {

class InitialCondition;

/// Moments m_0..m_K of a one-particle density at a given time.
struct MomentVector
{
  double time = 0.0;
  std::vector<double> m;

  int order() const { return static_cast<int>(m.size()) - 1; }
  double operator[](int k) const { return m[static_cast<std::size_t>(k)]; }

  /// Moments of Gaussian(mean, temperature).
  static MomentVector gaussian(int order, double temperature, double mean = 0.0);
  /// Moments of the one-particle law of a product initial condition.
  /// Throws DomainError for families without closed-form moments.
  static MomentVector from_initial(const InitialCondition& initial, int order);
};

/// Right-hand side of the closed moment hierarchy of the limiting equation.
/// Entry n depends only on m_0..m_n.
std::vector<double> moment_rhs(const MomentVector& m, const Params& params);

struct MomentIntegration
{
  /// One entry per output time 0, dt, 2 dt, ..., horizon.
  std::vector<MomentVector> samples;
  /// Sum over accepted steps of the step-halving error estimate.
  double error_estimate = 0.0;
  int steps = 0;
};

struct MomentOptions
{
  /// Allowed local error per unit time, relative to max(1, |m_n|).
  double tolerance = 1e-10;
  /// Hankel positivity tolerance on the diagonally scaled moment matrix.
  double hankel_tolerance = 1e-8;
};

/// Classical RK4 with step halving and Richardson extrapolation. Checks
/// Hankel positivity at each output time; throws IntegrationFailure when it
/// fails or the step size collapses.
MomentIntegration integrate_moments(const MomentVector& m0,
                                    const Params& params,
                                    double horizon,
                                    double dt,
                                    const MomentOptions& options = {});

/// Smallest eigenvalue of the diagonally scaled Hankel matrix [m_{i+j}].
double hankel_min_eigenvalue(const MomentVector& m);

/// 2 lambda (1 - 2 s_n) + mu (1 - s_n).
double linearized_eigenvalue(int n, const Params& params);

}  // namespace kaclab

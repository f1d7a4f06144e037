#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kaclab/core.hpp"

namespace kaclab {

class InitialCondition;

enum class GridKind
{
  Density,  // values are f(v)
  Ratio     // values are G(v) = f(v) / g(v)
};

/// Function sampled on the uniform grid v_i = -L + i h, i = 0..n-1,
/// h = 2L/(n-1). The reference Gaussian g has variance 1/beta.
class DensityGrid
{
 public:
  DensityGrid(double half_width, std::vector<double> values, GridKind kind, double beta);

  /// Samples fn on the default grid (n = 2048, L = 8/sqrt(beta)) unless
  /// points / half_width are given.
  static DensityGrid sample(const std::function<double(double)>& fn,
                            GridKind kind,
                            double beta,
                            int points = 2048,
                            double half_width = 0.0);

  int size() const { return static_cast<int>(values_.size()); }
  double half_width() const { return half_width_; }
  double spacing() const { return 2.0 * half_width_ / (size() - 1); }
  double node(int i) const { return -half_width_ + i * spacing(); }
  double value(int i) const { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return values_; }
  GridKind kind() const { return kind_; }
  double beta() const { return beta_; }

  /// Reference Gaussian density at v.
  double gaussian(double v) const;

  /// Cubic interpolation; in log space when every value is positive, which
  /// is exact for Gaussian ratios. Outside the grid the end behaviour is
  /// continued from widely spaced end nodes.
  double at(double v) const;

  /// Trapezoid integral of f (of g G for a ratio).
  double integral() const;

  DensityGrid as_ratio() const;
  DensityGrid as_density() const;
  /// Copy with the represented density scaled to unit mass.
  DensityGrid normalized() const;

 private:
  double half_width_;
  std::vector<double> values_;
  /// Interpolation ordinates: log of the values when all are positive.
  std::vector<double> ordinates_;
  GridKind kind_;
  double beta_;
  bool positive_ = true;
};

/// S(f | g) = int f log(f/g) for a normalized grid density (ratio grids are
/// accepted). 0 log 0 = 0. Throws DomainError on negative values and
/// NormalizationError if the mass differs from 1 by more than 1e-8.
double relative_entropy_grid(const DensityGrid& f);

/// int g G log G for a ratio grid, without a normalization requirement.
double entropy_functional(const DensityGrid& ratio);

struct SampleEntropy
{
  double estimate = 0.0;
  /// Bootstrap standard deviation.
  double error = 0.0;
  int bins = 0;
  std::size_t samples = 0;
};

struct SampleEntropyOptions
{
  int bootstrap = 64;
  std::uint64_t seed = 0x5eed;
  /// 0 selects a Freedman-Diaconis bin width.
  int bins = 0;
};

/// Histogram plug-in estimate of S(f | g) from iid samples, with the
/// Miller-Madow correction; the Gaussian part uses the sample mean of v^2.
/// Throws EstimatorUnreliable below 1000 samples, DomainError when the
/// samples are degenerate.
SampleEntropy relative_entropy_samples(std::span<const double> samples,
                                       double beta,
                                       const SampleEntropyOptions& options = {});

/// Ornstein-Uhlenbeck (Mehler) semigroup on a ratio grid.
DensityGrid ou_apply(const DensityGrid& ratio, double s, int nodes = 32);

/// Thermostat averaging operator T on a ratio grid (periodic rule in theta,
/// Gauss-Hermite in w).
DensityGrid t_apply(const DensityGrid& ratio, int theta_nodes = 256, int w_nodes = 32);

/// Quarter-period version of T (average over theta in [0, pi/2], Gauss-
/// Legendre in theta). Coincides with T on even functions.
DensityGrid t_quarter_apply(const DensityGrid& ratio, int theta_nodes = 64, int w_nodes = 32);

/// The same three operators applied to a function known in closed form,
/// evaluated at the given points. The grid versions call these with the
/// grid interpolant, so these isolate the quadrature error.
using RealFunction = std::function<double(double)>;
std::vector<double> ou_apply_at(const RealFunction& G, std::span<const double> points, double beta, double s, int nodes = 32);
std::vector<double> t_apply_at(const RealFunction& G,
                               std::span<const double> points,
                               double beta,
                               int theta_nodes = 256,
                               int w_nodes = 32);
std::vector<double> t_quarter_apply_at(const RealFunction& G,
                                       std::span<const double> points,
                                       double beta,
                                       int theta_nodes = 64,
                                       int w_nodes = 32);

struct ThermostatInequalityReport
{
  /// int g T[G] log G
  double lhs = 0.0;
  /// (1/2) int g G log G
  double rhs = 0.0;
  double margin = 0.0;
  /// int g T[G] log T[G]
  double strong_lhs = 0.0;
  double strong_margin = 0.0;
  bool holds = false;
};

/// Both one-particle thermostat inequalities by quadrature; holds means
/// margin >= -1e-8 and strong_margin >= -1e-8. Throws NormalizationError
/// if int g G differs from 1 by more than 1e-8.
ThermostatInequalityReport check_thermostat_entropy_inequality(const DensityGrid& ratio);

/// Probability table on a product grid, row-major over `shape`.
struct DiscreteJoint
{
  std::vector<int> shape;
  std::vector<double> p;

  int variables() const { return static_cast<int>(shape.size()); }
  /// Product of one-dimensional laws.
  static DiscreteJoint product(const std::vector<std::vector<double>>& factors);
};

struct MarginalInequalityReport
{
  /// sum_j sum f_j log f_j over the single-variable-dropped marginals
  double lhs = 0.0;
  /// (N - 1) sum f log f
  double rhs = 0.0;
  double margin = 0.0;
  bool holds = false;
};

/// Marginal entropy inequality for N in {2, 3, 4}; holds means
/// margin >= -1e-12. Throws NormalizationError on mass != 1 (1e-12) and
/// DomainError on negative entries or unsupported N.
MarginalInequalityReport check_marginal_entropy_inequality(const DiscreteJoint& f);

/// S(f_0 | gamma) for product initial data: N times the one-particle
/// relative entropy, by quadrature of the closed-form density.
double initial_relative_entropy(const InitialCondition& initial, const Params& params);

struct EntropyPoint
{
  double t = 0.0;
  double estimate = 0.0;
  double error = 0.0;
  double bound = 0.0;
};

struct EntropyDecay
{
  std::vector<EntropyPoint> points;
  double initial_entropy = 0.0;
  /// Log-linear fit of the resolved estimates; NaN when fewer than three
  /// points exceed three error bars.
  double decay_exponent = 0.0;
};

struct EntropyExperimentOptions
{
  int intervals = 12;
  std::uint64_t seed = 1;
  SampleEntropyOptions estimator;
};

/// Simulates M replicas, estimates the proxy N S(f_1 | g) from the pooled
/// one-particle samples at each time, and pairs it with the bound
/// exp(-mu t / 2) S(f_0 | gamma).
EntropyDecay entropy_decay_experiment(const Params& params,
                                      const InitialCondition& initial,
                                      double horizon,
                                      std::size_t replicas,
                                      const EntropyExperimentOptions& options = {});

}  // namespace kaclab

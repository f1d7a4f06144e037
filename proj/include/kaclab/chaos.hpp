#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "kaclab/boltzmann.hpp"
#include "kaclab/core.hpp"

namespace kaclab {

class Ensemble;
class InitialCondition;

/// Histogram estimate of the one- or two-particle marginal, pooled over all
/// particles (k = 1) or ordered pairs of distinct particles (k = 2) of every
/// replica. Samples outside [lo, hi) are clamped into the edge bins, so the
/// total mass is exactly 1.
struct MarginalSet
{
  int k = 1;
  int bins = 0;
  double lo = 0.0;
  double hi = 0.0;
  /// bins^k masses, row-major for k = 2.
  std::vector<double> mass;
  /// The same estimate restricted to contiguous replica batches; used for
  /// batch-means error bars.
  std::vector<std::vector<double>> batch_mass;
  int n_particles = 0;
  double t = 0.0;
  std::size_t replicas = 0;

  double width() const { return (hi - lo) / bins; }
  double center(int i) const { return lo + (i + 0.5) * width(); }
  double total_mass() const;
};

struct MarginalOptions
{
  /// 0 selects 64 bins (k = 2) or 256 bins (k = 1).
  int bins = 0;
  /// 0 selects 8 / sqrt(beta).
  double half_width = 0.0;
  int batches = 16;
};

/// Marginal estimate from the current state of the ensemble. k must be 1 or
/// 2; k = 2 needs N >= 2 and at least as many replicas as batches.
MarginalSet extract_marginals(const Ensemble& ensemble, int k, const MarginalOptions& options = {});

/// Damped Hermite function He_k(sqrt(beta) v) exp(-beta v^2 / 4); bounded.
double chaos_test_function(int k, double v, double beta);

/// The twelve test-function index pairs (i, j) of the chaos dictionary:
/// 1 <= i <= j <= 4, plus (0, 2) and (0, 4).
const std::array<std::pair<int, int>, 12>& chaos_dictionary();

struct ChaosMetric
{
  /// max over the dictionary of |<phi_i x phi_j, f2> - <phi_i, f1><phi_j, f1>|
  double value = 0.0;
  /// Batch-means standard error of the maximizing term.
  double standard_error = 0.0;
  std::array<double, 12> terms{};
  std::array<double, 12> term_standard_error{};
  int argmax = 0;
};

/// Weak-convergence distance of f2 from f1 x f1 over the dictionary.
/// Throws DomainError unless the grids, batch counts and orders match.
ChaosMetric chaos_metric(const MarginalSet& f1, const MarginalSet& f2, double beta);

struct ChaosPoint
{
  int n_particles = 0;
  double t = 0.0;
  double metric = 0.0;
  double standard_error = 0.0;
};

/// Simulates `replicas` copies for each N in the ladder and measures the
/// chaos metric at time t. Ladder entries run one after another; each uses
/// the same master seed.
std::vector<ChaosPoint> chaos_ladder(const Params& params,
                                     const InitialCondition& initial,
                                     const std::vector<int>& ladder,
                                     double t,
                                     std::size_t replicas,
                                     std::uint64_t seed,
                                     const MarginalOptions& options = {});

struct BoltzmannLevel
{
  int n_particles = 0;
  std::vector<double> times;
  /// Simulated pooled moments m_1..m_6 and their standard errors.
  std::vector<std::array<double, 6>> simulated;
  std::vector<std::array<double, 6>> standard_error;
  /// Limiting-equation moments m_1..m_6.
  std::vector<std::array<double, 6>> predicted;
  /// max over times and moments of |simulated - predicted| / standard error;
  /// moments with zero standard error are skipped unless they disagree.
  double max_discrepancy = 0.0;
};

struct BoltzmannComparison
{
  std::vector<BoltzmannLevel> levels;
};

struct BoltzmannComparisonOptions
{
  std::vector<int> ladder{50, 500};
  std::size_t replicas = 2000;
  int intervals = 8;
  std::uint64_t seed = 1;
};

/// Runs the particle system at each N of the ladder and compares the pooled
/// one-particle moments with the limiting moment hierarchy started from the
/// closed-form moments of `initial`. The result is a report; no contract is
/// asserted here.
BoltzmannComparison compare_to_boltzmann(const Params& params,
                                         const InitialCondition& initial,
                                         double horizon,
                                         const BoltzmannComparisonOptions& options = {});

struct McKeanRadius
{
  /// The convergence horizon stated for the series: 1 / (4 lambda + mu).
  double stated = std::numeric_limits<double>::infinity();
  /// Horizon from the ratio test on the term bound: 1 / (4 lambda + 2 mu).
  double ratio_test = std::numeric_limits<double>::infinity();
  /// Term bounds C(m + l - 1, l) ((4 lambda + 2 mu) t)^l for l = 0..terms-1.
  std::vector<double> term_bounds;
};

/// Convergence horizon of the series expansion of the evolved m-particle
/// test-function integral, and its term bounds at time t. Both horizons are
/// infinite when lambda = mu = 0. Throws DomainError for m < 1.
McKeanRadius mckean_series_radius(const Params& params, int m, double t = 0.0, int terms = 0);

}  // namespace kaclab

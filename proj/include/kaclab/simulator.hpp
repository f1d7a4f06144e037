#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kaclab/core.hpp"
#include "kaclab/rng.hpp"

namespace kaclab {

/// Initial N-particle distribution. Built-in families are products of
/// identical one-particle laws, so they are exchangeable and chaotic.
class InitialCondition
{
 public:
  /// Draws the velocity of `particle` (0-based).
  using Sampler = std::function<double(StreamRng&, int particle)>;

  /// Every particle Gaussian with the given mean and variance (temperature).
  static InitialCondition gaussian(double temperature, double mean = 0.0);
  /// Each particle independently hot with probability hot_fraction.
  static InitialCondition two_temperature(double hot_fraction, double hot_temperature, double cold_temperature);
  /// User-supplied per-particle sampler; no closed-form moments.
  static InitialCondition custom(Sampler sampler, std::string label = "custom");

  void sample(std::span<double> v, StreamRng& rng) const;

  /// One-particle moment E[v^k], when the family has a closed form.
  std::optional<double> moment(int k) const;
  /// One-particle density at v, when the family has a closed form.
  std::optional<double> density(double v) const;

  const std::string& label() const { return label_; }

 private:
  enum class Kind
  {
    Gaussian,
    TwoTemperature,
    Custom
  };
  Kind kind_ = Kind::Gaussian;
  double temperature_ = 1.0;
  double mean_ = 0.0;
  double hot_fraction_ = 0.0;
  double hot_temperature_ = 1.0;
  Sampler sampler_;
  std::string label_;
};

enum class EventKind
{
  Kac,
  Thermostat
};

/// Rotates the pair (v_i, v_j) by angle theta.
void kac_collide(std::span<double> v, int i, int j, double theta);
/// v_j <- v_j cos(theta) + w sin(theta).
void thermostat_collide(std::span<double> v, int j, double w, double theta);

/// Holding time of the jump process: Exponential(lambda N + mu N).
/// Throws NoEventError if both rates vanish.
double draw_waiting_time(const Params& params, StreamRng& rng);
/// Applies one event, chosen with probabilities proportional to the rates.
EventKind apply_event(std::span<double> v, const Params& params, StreamRng& rng);

struct StepResult
{
  double waiting_time = 0.0;
  EventKind kind = EventKind::Kac;
};

/// One jump: draws the holding time, then applies the event in place.
StepResult step(std::span<double> v, const Params& params, StreamRng& rng);

/// One-dimensional histogram with separate under/overflow counters.
class Histogram
{
 public:
  Histogram() = default;
  Histogram(double lo, double hi, int bins);
  /// Default range for inverse temperature beta: +-8/sqrt(beta), 256 bins.
  static Histogram for_beta(double beta, int bins = 256);

  void add(double x);
  void merge(const Histogram& other);

  int bins() const { return static_cast<int>(counts_.size()); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return (hi_ - lo_) / bins(); }
  double bin_left(int i) const { return lo_ + i * width(); }
  double bin_right(int i) const { return lo_ + (i + 1) * width(); }
  /// Bin index of x, or -1 / bins() outside the range.
  int locate(double x) const;

  std::uint64_t count(int i) const { return counts_[static_cast<std::size_t>(i)]; }
  std::uint64_t underflow() const { return underflow_; }
  std::uint64_t overflow() const { return overflow_; }
  std::uint64_t total() const { return total_; }
  /// Fraction of all samples in bin i.
  double mass(int i) const;
  double underflow_mass() const;
  double overflow_mass() const;

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<std::uint64_t> counts_;
  std::uint64_t underflow_ = 0;
  std::uint64_t overflow_ = 0;
  std::uint64_t total_ = 0;
};

/// M independent replicas of the N-particle system. Replica r uses stream r
/// of the master seed both for its initial draw and for its dynamics, so the
/// trajectories do not depend on the thread count or on the sample grid.
class Ensemble
{
 public:
  Ensemble(const Params& params, std::size_t replicas, std::uint64_t seed, const InitialCondition& initial);

  /// Evolves every replica through all events up to time t (>= time()).
  void advance_to(double t);

  double time() const { return time_; }
  const Params& params() const { return params_; }
  std::size_t replicas() const { return replicas_; }
  int particles() const { return params_.n_particles; }
  std::span<const double> replica(std::size_t r) const;
  std::span<double> replica(std::size_t r);
  std::uint64_t events() const;

 private:
  Params params_;
  std::size_t replicas_;
  double time_ = 0.0;
  std::vector<double> state_;
  std::vector<StreamRng> rngs_;
  std::vector<double> next_event_;
  std::vector<std::uint64_t> events_;
};

/// Ensemble observables on a sample grid.
struct ObservableSeries
{
  Params params;
  std::size_t replicas = 0;
  std::vector<double> times;
  /// Ensemble mean of (1/2) sum v_i^2 and its standard error over replicas.
  std::vector<double> kinetic_energy;
  std::vector<double> kinetic_energy_stderr;
  /// 2K/N.
  std::vector<double> temperature;
  /// Pooled one-particle moments m_1..m_6; errors from replica-level means.
  std::vector<std::array<double, 6>> moments;
  std::vector<std::array<double, 6>> moments_stderr;
  /// Excess kurtosis of the one-particle marginal (diagnostic only).
  std::vector<double> excess_kurtosis;
  std::vector<Histogram> histograms;
};

/// Called after the ensemble reaches times[index].
using SampleObserver = std::function<void(std::size_t index, const Ensemble&)>;

struct RunOptions
{
  int histogram_bins = 256;
  /// Extra per-sample hook, for observables the series does not carry.
  SampleObserver observer;
};

/// Evolves M replicas and records observables at each grid time (sorted,
/// non-negative, last entry = horizon).
ObservableSeries run(const Params& params,
                     const InitialCondition& initial,
                     std::size_t replicas,
                     const std::vector<double>& times,
                     std::uint64_t seed,
                     const RunOptions& options = {});

/// count + 1 equally spaced times on [0, horizon].
std::vector<double> uniform_grid(double horizon, int count);

/// Weighted log-linear fit of K(t) - N/(2 beta); returns the decay rate.
/// Throws IllConditionedFitError when the excess energy is not resolved at
/// enough sample times.
double fit_cooling_rate(const ObservableSeries& series, const Params& params);

/// N/(2 beta) + (K0 - N/(2 beta)) exp(-mu t / 2).
double cooling_curve(double k0, const Params& params, double t);

}  // namespace kaclab

#include "kaclab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kaclab/errors.hpp"
#include "kaclab/parallel.hpp"

namespace kaclab {

namespace {

double shifted_gaussian_moment(double mean, double variance, int k)
{
  // E[(m + s Z)^k] = sum_j C(k, j) m^{k-j} s^j E[Z^j]
  const double s = std::sqrt(variance);
  double total = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    if (j > 0)
      binom = binom * (k - j + 1) / j;
    total += binom * std::pow(mean, k - j) * std::pow(s, j) * gaussian_moment(j);
  }
  return total;
}

double gaussian_density(double v, double mean, double variance)
{
  const double d = v - mean;
  return std::exp(-d * d / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
}

void require_positive(double x, const char* what)
{
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError(std::string("initial condition: ") + what + " must be positive");
}

}  // namespace

InitialCondition InitialCondition::gaussian(double temperature, double mean)
{
  require_positive(temperature, "temperature");
  if (!std::isfinite(mean))
    throw DomainError("initial condition: mean must be finite");
  InitialCondition ic;
  ic.kind_ = Kind::Gaussian;
  ic.temperature_ = temperature;
  ic.mean_ = mean;
  ic.label_ = "gaussian";
  return ic;
}

InitialCondition InitialCondition::two_temperature(double hot_fraction, double hot_temperature, double cold_temperature)
{
  if (!(hot_fraction >= 0.0 && hot_fraction <= 1.0))
    throw DomainError("initial condition: hot fraction must lie in [0, 1]");
  require_positive(hot_temperature, "hot temperature");
  require_positive(cold_temperature, "cold temperature");
  InitialCondition ic;
  ic.kind_ = Kind::TwoTemperature;
  ic.hot_fraction_ = hot_fraction;
  ic.hot_temperature_ = hot_temperature;
  ic.temperature_ = cold_temperature;
  ic.label_ = "two-temperature";
  return ic;
}

InitialCondition InitialCondition::custom(Sampler sampler, std::string label)
{
  if (!sampler)
    throw DomainError("initial condition: empty sampler");
  InitialCondition ic;
  ic.kind_ = Kind::Custom;
  ic.sampler_ = std::move(sampler);
  ic.label_ = std::move(label);
  return ic;
}

void InitialCondition::sample(std::span<double> v, StreamRng& rng) const
{
  switch (kind_) {
    case Kind::Gaussian: {
      const double s = std::sqrt(temperature_);
      for (double& x : v)
        x = mean_ + s * rng.normal();
      break;
    }
    case Kind::TwoTemperature: {
      const double hot = std::sqrt(hot_temperature_);
      const double cold = std::sqrt(temperature_);
      for (double& x : v) {
        const bool is_hot = rng.uniform() < hot_fraction_;
        x = (is_hot ? hot : cold) * rng.normal();
      }
      break;
    }
    case Kind::Custom:
      for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = sampler_(rng, static_cast<int>(i));
      break;
  }
}

std::optional<double> InitialCondition::moment(int k) const
{
  if (k < 0)
    throw DomainError("moment: negative order");
  switch (kind_) {
    case Kind::Gaussian:
      return shifted_gaussian_moment(mean_, temperature_, k);
    case Kind::TwoTemperature:
      return hot_fraction_ * shifted_gaussian_moment(0.0, hot_temperature_, k) +
             (1.0 - hot_fraction_) * shifted_gaussian_moment(0.0, temperature_, k);
    case Kind::Custom:
      break;
  }
  return std::nullopt;
}

std::optional<double> InitialCondition::density(double v) const
{
  switch (kind_) {
    case Kind::Gaussian:
      return gaussian_density(v, mean_, temperature_);
    case Kind::TwoTemperature:
      return hot_fraction_ * gaussian_density(v, 0.0, hot_temperature_) +
             (1.0 - hot_fraction_) * gaussian_density(v, 0.0, temperature_);
    case Kind::Custom:
      break;
  }
  return std::nullopt;
}

void kac_collide(std::span<double> v, int i, int j, double theta)
{
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double vi = v[static_cast<std::size_t>(i)];
  const double vj = v[static_cast<std::size_t>(j)];
  v[static_cast<std::size_t>(i)] = vi * c + vj * s;
  v[static_cast<std::size_t>(j)] = -vi * s + vj * c;
}

void thermostat_collide(std::span<double> v, int j, double w, double theta)
{
  double& vj = v[static_cast<std::size_t>(j)];
  vj = vj * std::cos(theta) + w * std::sin(theta);
}

double draw_waiting_time(const Params& params, StreamRng& rng)
{
  const double rate = (params.lambda + params.mu) * params.n_particles;
  if (!(rate > 0.0))
    throw NoEventError("jump process: lambda = mu = 0, no events occur");
  return rng.exponential(rate);
}

EventKind apply_event(std::span<double> v, const Params& params, StreamRng& rng)
{
  const auto n = static_cast<std::uint64_t>(v.size());
  const double kac_share = params.lambda / (params.lambda + params.mu);
  if (rng.uniform() < kac_share) {
    if (n < 2)
      throw DomainError("jump process: a Kac event needs N >= 2");
    const auto i = rng.below(n);
    auto j = rng.below(n - 1);
    if (j >= i)
      ++j;
    kac_collide(v, static_cast<int>(i), static_cast<int>(j), 2.0 * std::numbers::pi * rng.uniform());
    return EventKind::Kac;
  }
  const auto j = rng.below(n);
  const double w = rng.normal() / std::sqrt(params.beta);
  thermostat_collide(v, static_cast<int>(j), w, 2.0 * std::numbers::pi * rng.uniform());
  return EventKind::Thermostat;
}

StepResult step(std::span<double> v, const Params& params, StreamRng& rng)
{
  StepResult r;
  r.waiting_time = draw_waiting_time(params, rng);
  r.kind = apply_event(v, params, rng);
  return r;
}

Histogram::Histogram(double lo, double hi, int bins) : lo_(lo), hi_(hi)
{
  if (!(hi > lo) || bins < 1)
    throw DomainError("histogram: need lo < hi and at least one bin");
  counts_.assign(static_cast<std::size_t>(bins), 0);
}

Histogram Histogram::for_beta(double beta, int bins)
{
  const double l = 8.0 / std::sqrt(beta);
  return Histogram(-l, l, bins);
}

int Histogram::locate(double x) const
{
  if (x < lo_)
    return -1;
  if (x >= hi_)
    return bins();
  const int i = static_cast<int>((x - lo_) / width());
  return std::min(i, bins() - 1);
}

void Histogram::add(double x)
{
  const int i = locate(x);
  if (i < 0)
    ++underflow_;
  else if (i >= bins())
    ++overflow_;
  else
    ++counts_[static_cast<std::size_t>(i)];
  ++total_;
}

void Histogram::merge(const Histogram& other)
{
  if (other.bins() != bins() || other.lo_ != lo_ || other.hi_ != hi_)
    throw DomainError("histogram merge: mismatched grids");
  for (std::size_t i = 0; i < counts_.size(); ++i)
    counts_[i] += other.counts_[i];
  underflow_ += other.underflow_;
  overflow_ += other.overflow_;
  total_ += other.total_;
}

double Histogram::mass(int i) const
{
  return total_ == 0 ? 0.0 : static_cast<double>(count(i)) / static_cast<double>(total_);
}

double Histogram::underflow_mass() const
{
  return total_ == 0 ? 0.0 : static_cast<double>(underflow_) / static_cast<double>(total_);
}

double Histogram::overflow_mass() const
{
  return total_ == 0 ? 0.0 : static_cast<double>(overflow_) / static_cast<double>(total_);
}

Ensemble::Ensemble(const Params& params, std::size_t replicas, std::uint64_t seed, const InitialCondition& initial)
    : params_(params), replicas_(replicas)
{
  params.validate();
  if (replicas == 0)
    throw DomainError("ensemble: need at least one replica");
  if (params.lambda > 0.0 && params.n_particles < 2)
    throw DomainError("ensemble: N >= 2 required when lambda > 0");
  if (!(params.lambda + params.mu > 0.0))
    throw NoEventError("ensemble: lambda = mu = 0, no events occur");

  const auto n = static_cast<std::size_t>(params.n_particles);
  state_.resize(replicas * n);
  rngs_.reserve(replicas);
  next_event_.resize(replicas);
  events_.assign(replicas, 0);
  for (std::size_t r = 0; r < replicas; ++r) {
    rngs_.emplace_back(seed, r);
    initial.sample(replica(r), rngs_[r]);
    next_event_[r] = draw_waiting_time(params_, rngs_[r]);
  }
}

std::span<const double> Ensemble::replica(std::size_t r) const
{
  const auto n = static_cast<std::size_t>(params_.n_particles);
  return {state_.data() + r * n, n};
}

std::span<double> Ensemble::replica(std::size_t r)
{
  const auto n = static_cast<std::size_t>(params_.n_particles);
  return {state_.data() + r * n, n};
}

std::uint64_t Ensemble::events() const
{
  std::uint64_t total = 0;
  for (auto e : events_)
    total += e;
  return total;
}

void Ensemble::advance_to(double t)
{
  if (t < time_)
    throw DomainError("ensemble: cannot advance backwards in time");
  parallel_for(replicas_, [&](std::size_t r) {
    auto v = replica(r);
    auto& rng = rngs_[r];
    double next = next_event_[r];
    std::uint64_t count = 0;
    while (next <= t) {
      apply_event(v, params_, rng);
      next += draw_waiting_time(params_, rng);
      ++count;
    }
    next_event_[r] = next;
    events_[r] += count;
  });
  time_ = t;
}

namespace {

struct MeanAccumulator
{
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double x)
  {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  double mean() const { return sum / static_cast<double>(count); }
  double stderr_of_mean() const
  {
    if (count < 2)
      return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sum_sq - count * m * m) / (count - 1.0));
    return std::sqrt(var / static_cast<double>(count));
  }
};

void record(const Ensemble& e, int bins, ObservableSeries& out)
{
  const std::size_t m = e.replicas();
  const int n = e.particles();
  MeanAccumulator energy;
  std::array<MeanAccumulator, 6> moment;
  Histogram hist = Histogram::for_beta(e.params().beta, bins);

  // Replica-level means are iid across replicas, so their spread gives the
  // Monte Carlo error even though particles within a replica are correlated.
  for (std::size_t r = 0; r < m; ++r) {
    std::array<double, 6> local{};
    for (double x : e.replica(r)) {
      double p = 1.0;
      for (auto& l : local) {
        p *= x;
        l += p;
      }
      hist.add(x);
    }
    energy.add(0.5 * local[1]);
    for (std::size_t k = 0; k < 6; ++k)
      moment[k].add(local[k] / n);
  }

  out.kinetic_energy.push_back(energy.mean());
  out.kinetic_energy_stderr.push_back(energy.stderr_of_mean());
  out.temperature.push_back(2.0 * energy.mean() / n);
  std::array<double, 6> mean{};
  std::array<double, 6> err{};
  for (std::size_t k = 0; k < 6; ++k) {
    mean[k] = moment[k].mean();
    err[k] = moment[k].stderr_of_mean();
  }
  out.moments.push_back(mean);
  out.moments_stderr.push_back(err);

  const double m1 = mean[0];
  const double c2 = mean[1] - m1 * m1;
  const double c4 = mean[3] - 4.0 * m1 * mean[2] + 6.0 * m1 * m1 * mean[1] - 3.0 * std::pow(m1, 4);
  out.excess_kurtosis.push_back(c2 > 0.0 ? c4 / (c2 * c2) - 3.0 : 0.0);
  out.histograms.push_back(std::move(hist));
}

}  // namespace

ObservableSeries run(const Params& params,
                     const InitialCondition& initial,
                     std::size_t replicas,
                     const std::vector<double>& times,
                     std::uint64_t seed,
                     const RunOptions& options)
{
  if (times.empty())
    throw DomainError("run: empty sample grid");
  if (!(times.back() > 0.0))
    throw DomainError("run: horizon must be positive");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1]))
      throw DomainError("run: sample grid must be non-negative and sorted");
  }

  Ensemble ensemble(params, replicas, seed, initial);
  ObservableSeries out;
  out.params = params;
  out.replicas = replicas;
  out.times = times;
  for (std::size_t i = 0; i < times.size(); ++i) {
    ensemble.advance_to(times[i]);
    record(ensemble, options.histogram_bins, out);
    if (options.observer)
      options.observer(i, ensemble);
  }
  return out;
}

std::vector<double> uniform_grid(double horizon, int count)
{
  if (!(horizon > 0.0) || count < 1)
    throw DomainError("uniform_grid: need horizon > 0 and count >= 1");
  std::vector<double> t(static_cast<std::size_t>(count) + 1);
  for (int i = 0; i <= count; ++i)
    t[static_cast<std::size_t>(i)] = horizon * i / count;
  return t;
}

double cooling_curve(double k0, const Params& params, double t)
{
  const double k_inf = params.n_particles / (2.0 * params.beta);
  return k_inf + (k0 - k_inf) * std::exp(-0.5 * params.mu * t);
}

double fit_cooling_rate(const ObservableSeries& series, const Params& params)
{
  const double k_inf = params.n_particles / (2.0 * params.beta);
  if (series.times.size() < 3)
    throw IllConditionedFitError("fit_cooling_rate: need at least three samples");

  auto resolved = [&](std::size_t i, double sign) {
    const double d = sign * (series.kinetic_energy[i] - k_inf);
    const double err = series.kinetic_energy_stderr[i];
    return d > std::max(3.0 * err, 1e-9 * k_inf);
  };
  const double d0 = series.kinetic_energy.front() - k_inf;
  const double sign = d0 >= 0.0 ? 1.0 : -1.0;
  if (!resolved(0, sign))
    throw IllConditionedFitError("fit_cooling_rate: initial energy indistinguishable from equilibrium");

  // Weighted least squares on log|K - K_inf|; the variance of the log is
  // (stderr / excess)^2.
  double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
  double y_first = 0.0, y_last = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (!resolved(i, sign))
      break;
    const double d = sign * (series.kinetic_energy[i] - k_inf);
    const double err = series.kinetic_energy_stderr[i];
    const double w = err > 0.0 ? (d / err) * (d / err) : 1.0;
    const double t = series.times[i];
    const double y = std::log(d);
    if (used == 0)
      y_first = y;
    y_last = y;
    sw += w;
    st += w * t;
    sy += w * y;
    stt += w * t * t;
    sty += w * t * y;
    ++used;
  }
  if (used < 3)
    throw IllConditionedFitError("fit_cooling_rate: fewer than three resolved samples");
  if (y_first - y_last < 2.0)
    throw IllConditionedFitError("fit_cooling_rate: series covers fewer than two e-foldings");
  const double denom = sw * stt - st * st;
  if (!(denom > 0.0))
    throw IllConditionedFitError("fit_cooling_rate: degenerate time grid");
  const double slope = (sw * sty - st * sy) / denom;
  return -slope;
}

}  // namespace kaclab

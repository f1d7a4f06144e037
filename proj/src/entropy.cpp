#include "kaclab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "kaclab/errors.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/simulator.hpp"

namespace kaclab {

namespace {

constexpr double kLogFloor = 1e-300;

double xlogx(double x)
{
  return x > 0.0 ? x * std::log(std::max(x, kLogFloor)) : 0.0;
}

double trapezoid_weight(int i, int n, double h)
{
  return (i == 0 || i == n - 1) ? 0.5 * h : h;
}

}  // namespace

DensityGrid::DensityGrid(double half_width, std::vector<double> values, GridKind kind, double beta)
    : half_width_(half_width), values_(std::move(values)), kind_(kind), beta_(beta)
{
  if (!(half_width > 0.0))
    throw DomainError("density grid: half width must be positive");
  if (values_.size() < 8)
    throw DomainError("density grid: need at least 8 nodes");
  if (!(beta > 0.0))
    throw DomainError("density grid: beta must be positive");
  positive_ = std::all_of(values_.begin(), values_.end(), [](double x) { return x > 0.0; });
  ordinates_.resize(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i)
    ordinates_[i] = positive_ ? std::log(values_[i]) : values_[i];
}

DensityGrid DensityGrid::sample(const std::function<double(double)>& fn,
                                GridKind kind,
                                double beta,
                                int points,
                                double half_width)
{
  if (!(beta > 0.0))
    throw DomainError("density grid: beta must be positive");
  const double l = half_width > 0.0 ? half_width : 8.0 / std::sqrt(beta);
  if (points < 8)
    throw DomainError("density grid: need at least 8 nodes");
  std::vector<double> v(static_cast<std::size_t>(points));
  const double h = 2.0 * l / (points - 1);
  for (int i = 0; i < points; ++i)
    v[static_cast<std::size_t>(i)] = fn(-l + i * h);
  return DensityGrid(l, std::move(v), kind, beta);
}

double DensityGrid::gaussian(double v) const
{
  return std::sqrt(beta_ / (2.0 * std::numbers::pi)) * std::exp(-0.5 * beta_ * v * v);
}

double DensityGrid::at(double v) const
{
  const int n = size();
  const double h = spacing();
  const double u = (v + half_width_) / h;
  double x[4];
  double y[4];
  int count = 4;
  if (u >= 0.0 && u <= n - 1.0) {
    const int i = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, n - 4);
    for (int k = 0; k < 4; ++k) {
      x[k] = i + k;
      y[k] = ordinates_[static_cast<std::size_t>(i + k)];
    }
  } else {
    // Widely spaced end nodes keep the continuation well conditioned;
    // quadratic in log space, cubic otherwise.
    const int stride = std::max(1, n / 32);
    count = positive_ ? 3 : 4;
    const bool right = u > n - 1.0;
    for (int k = 0; k < count; ++k) {
      const int idx = right ? n - 1 - k * stride : k * stride;
      x[k] = idx;
      y[k] = ordinates_[static_cast<std::size_t>(idx)];
    }
  }
  const double r = lagrange(x, y, count, u);
  return positive_ ? std::exp(r) : r;
}

double DensityGrid::integral() const
{
  const int n = size();
  const double h = spacing();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = kind_ == GridKind::Density ? value(i) : value(i) * gaussian(node(i));
    total += trapezoid_weight(i, n, h) * f;
  }
  return total;
}

DensityGrid DensityGrid::as_ratio() const
{
  if (kind_ == GridKind::Ratio)
    return *this;
  std::vector<double> g(values_.size());
  for (int i = 0; i < size(); ++i)
    g[static_cast<std::size_t>(i)] = value(i) / gaussian(node(i));
  return DensityGrid(half_width_, std::move(g), GridKind::Ratio, beta_);
}

DensityGrid DensityGrid::as_density() const
{
  if (kind_ == GridKind::Density)
    return *this;
  std::vector<double> f(values_.size());
  for (int i = 0; i < size(); ++i)
    f[static_cast<std::size_t>(i)] = value(i) * gaussian(node(i));
  return DensityGrid(half_width_, std::move(f), GridKind::Density, beta_);
}

DensityGrid DensityGrid::normalized() const
{
  const double mass = integral();
  if (!(mass > 0.0))
    throw NormalizationError("density grid: non-positive mass");
  std::vector<double> v(values_);
  for (double& x : v)
    x /= mass;
  return DensityGrid(half_width_, std::move(v), kind_, beta_);
}

double relative_entropy_grid(const DensityGrid& f)
{
  for (double x : f.values())
    if (x < 0.0)
      throw DomainError("relative_entropy_grid: negative density value");
  const double mass = f.integral();
  if (std::abs(mass - 1.0) > 1e-8)
    throw NormalizationError("relative_entropy_grid: mass " + std::to_string(mass) + " differs from 1");
  const auto ratio = f.as_ratio();
  return entropy_functional(ratio);
}

double entropy_functional(const DensityGrid& ratio)
{
  if (ratio.kind() != GridKind::Ratio)
    return entropy_functional(ratio.as_ratio());
  const int n = ratio.size();
  const double h = ratio.spacing();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double gi = ratio.value(i);
    if (gi < 0.0)
      throw DomainError("entropy_functional: negative ratio value");
    total += trapezoid_weight(i, n, h) * ratio.gaussian(ratio.node(i)) * xlogx(gi);
  }
  return total;
}

SampleEntropy relative_entropy_samples(std::span<const double> samples, double beta, const SampleEntropyOptions& options)
{
  if (!(beta > 0.0))
    throw DomainError("relative_entropy_samples: beta must be positive");
  const std::size_t n = samples.size();
  if (n < 1000)
    throw EstimatorUnreliable("relative_entropy_samples: need at least 1000 samples, got " + std::to_string(n));

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double iqr = sorted[3 * n / 4] - sorted[n / 4];
  if (!(hi > lo) || !(iqr > 0.0))
    throw DomainError("relative_entropy_samples: degenerate samples, histogram has no spread");

  int bins = options.bins;
  if (bins <= 0) {
    const double fd = 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(n));
    bins = static_cast<int>(std::clamp(std::ceil((hi - lo) / fd), 8.0, 65536.0));
  }
  const double width = (hi - lo) / bins;

  std::vector<int> bin_of(n);
  std::vector<double> square(n);
  for (std::size_t i = 0; i < n; ++i) {
    bin_of[i] = std::min(static_cast<int>((samples[i] - lo) / width), bins - 1);
    square[i] = samples[i] * samples[i];
  }

  // -int f log g = (1/2) log(2 pi / beta) + beta <v^2> / 2, exact per sample.
  const double gaussian_constant = 0.5 * std::log(2.0 * std::numbers::pi / beta);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins));
  auto evaluate = [&](double sum_square) {
    double plug_in = 0.0;
    int occupied = 0;
    for (auto c : counts) {
      if (c == 0)
        continue;
      const double p = static_cast<double>(c) / static_cast<double>(n);
      plug_in += p * std::log(p);
      ++occupied;
    }
    const double miller_madow = (occupied - 1) / (2.0 * static_cast<double>(n));
    return plug_in - miller_madow - std::log(width) + gaussian_constant +
           0.5 * beta * sum_square / static_cast<double>(n);
  };

  double sum_square = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ++counts[static_cast<std::size_t>(bin_of[i])];
    sum_square += square[i];
  }
  SampleEntropy out;
  out.estimate = evaluate(sum_square);
  out.bins = bins;
  out.samples = n;

  if (options.bootstrap >= 2) {
    double mean = 0.0, m2 = 0.0;
    for (int b = 0; b < options.bootstrap; ++b) {
      StreamRng rng(options.seed, static_cast<std::uint64_t>(b));
      std::fill(counts.begin(), counts.end(), 0);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto k = rng.below(n);
        ++counts[static_cast<std::size_t>(bin_of[k])];
        s += square[k];
      }
      const double e = evaluate(s);
      const double delta = e - mean;
      mean += delta / (b + 1);
      m2 += delta * (e - mean);
    }
    out.error = std::sqrt(m2 / (options.bootstrap - 1));
  }
  return out;
}

std::vector<double> ou_apply_at(const RealFunction& G, std::span<const double> points, double beta, double s, int nodes)
{
  if (!(s >= 0.0))
    throw DomainError("ou_apply: s must be non-negative");
  if (!(beta > 0.0))
    throw DomainError("ou_apply: beta must be positive");
  std::vector<double> out(points.size());
  if (s == 0.0) {
    for (std::size_t i = 0; i < points.size(); ++i)
      out[i] = G(points[i]);
    return out;
  }
  const auto rule = gauss_hermite(nodes);
  const double a = std::exp(-s);
  const double b = std::sqrt(-std::expm1(-2.0 * s)) / std::sqrt(beta);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double total = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
      total += rule.weights[k] * G(a * points[i] + b * rule.nodes[k]);
    out[i] = total;
  }
  return out;
}

namespace {

std::vector<double> average_over_angles(const RealFunction& G,
                                        std::span<const double> points,
                                        double beta,
                                        const std::vector<double>& angles,
                                        const std::vector<double>& angle_weights,
                                        int w_nodes)
{
  if (!(beta > 0.0))
    throw DomainError("thermostat operator: beta must be positive");
  const auto rule = gauss_hermite(w_nodes);
  const double scale = 1.0 / std::sqrt(beta);
  std::vector<double> cosines(angles.size()), sines(angles.size());
  for (std::size_t j = 0; j < angles.size(); ++j) {
    cosines[j] = std::cos(angles[j]);
    sines[j] = std::sin(angles[j]);
  }
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double v = points[i];
    double total = 0.0;
    for (std::size_t j = 0; j < angles.size(); ++j) {
      double inner = 0.0;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        inner += rule.weights[k] * G(v * cosines[j] + scale * rule.nodes[k] * sines[j]);
      total += angle_weights[j] * inner;
    }
    out[i] = total;
  }
  return out;
}

std::vector<double> nodes_of(const DensityGrid& grid)
{
  std::vector<double> v(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i < grid.size(); ++i)
    v[static_cast<std::size_t>(i)] = grid.node(i);
  return v;
}

void require_ratio(const DensityGrid& grid, const char* who)
{
  if (grid.kind() != GridKind::Ratio)
    throw DomainError(std::string(who) + ": expects a ratio grid G = f/g");
}

}  // namespace

std::vector<double> t_apply_at(const RealFunction& G, std::span<const double> points, double beta, int theta_nodes, int w_nodes)
{
  if (theta_nodes < 1)
    throw DomainError("t_apply: need at least one angle");
  std::vector<double> angles(static_cast<std::size_t>(theta_nodes));
  std::vector<double> weights(angles.size(), 1.0 / theta_nodes);
  for (int j = 0; j < theta_nodes; ++j)
    angles[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * j / theta_nodes;
  return average_over_angles(G, points, beta, angles, weights, w_nodes);
}

std::vector<double> t_quarter_apply_at(const RealFunction& G,
                                       std::span<const double> points,
                                       double beta,
                                       int theta_nodes,
                                       int w_nodes)
{
  const auto rule = gauss_legendre(theta_nodes);
  std::vector<double> angles(rule.nodes.size());
  std::vector<double> weights(rule.nodes.size());
  for (std::size_t j = 0; j < angles.size(); ++j) {
    angles[j] = 0.25 * std::numbers::pi * (1.0 + rule.nodes[j]);
    weights[j] = 0.5 * rule.weights[j];
  }
  return average_over_angles(G, points, beta, angles, weights, w_nodes);
}

DensityGrid ou_apply(const DensityGrid& ratio, double s, int nodes)
{
  require_ratio(ratio, "ou_apply");
  if (s == 0.0)
    return ratio;
  auto values = ou_apply_at([&](double x) { return ratio.at(x); }, nodes_of(ratio), ratio.beta(), s, nodes);
  return DensityGrid(ratio.half_width(), std::move(values), GridKind::Ratio, ratio.beta());
}

DensityGrid t_apply(const DensityGrid& ratio, int theta_nodes, int w_nodes)
{
  require_ratio(ratio, "t_apply");
  auto values = t_apply_at([&](double x) { return ratio.at(x); }, nodes_of(ratio), ratio.beta(), theta_nodes, w_nodes);
  return DensityGrid(ratio.half_width(), std::move(values), GridKind::Ratio, ratio.beta());
}

DensityGrid t_quarter_apply(const DensityGrid& ratio, int theta_nodes, int w_nodes)
{
  require_ratio(ratio, "t_quarter_apply");
  auto values =
      t_quarter_apply_at([&](double x) { return ratio.at(x); }, nodes_of(ratio), ratio.beta(), theta_nodes, w_nodes);
  return DensityGrid(ratio.half_width(), std::move(values), GridKind::Ratio, ratio.beta());
}

ThermostatInequalityReport check_thermostat_entropy_inequality(const DensityGrid& grid)
{
  const DensityGrid g = grid.as_ratio();
  const double mass = g.integral();
  if (std::abs(mass - 1.0) > 1e-8)
    throw NormalizationError("thermostat inequality: int g G = " + std::to_string(mass) + ", expected 1");
  for (double x : g.values())
    if (x < 0.0)
      throw DomainError("thermostat inequality: negative ratio value");

  const DensityGrid tg = t_apply(g);
  const int n = g.size();
  const double h = g.spacing();
  ThermostatInequalityReport r;
  for (int i = 0; i < n; ++i) {
    const double w = trapezoid_weight(i, n, h) * g.gaussian(g.node(i));
    r.lhs += w * tg.value(i) * std::log(std::max(g.value(i), kLogFloor));
    r.strong_lhs += w * xlogx(tg.value(i));
  }
  r.rhs = 0.5 * entropy_functional(g);
  r.margin = r.rhs - r.lhs;
  r.strong_margin = r.rhs - r.strong_lhs;
  r.holds = r.margin >= -1e-8 && r.strong_margin >= -1e-8;
  return r;
}

DiscreteJoint DiscreteJoint::product(const std::vector<std::vector<double>>& factors)
{
  DiscreteJoint out;
  out.p = {1.0};
  for (const auto& f : factors) {
    out.shape.push_back(static_cast<int>(f.size()));
    std::vector<double> next;
    next.reserve(out.p.size() * f.size());
    for (double a : out.p)
      for (double b : f)
        next.push_back(a * b);
    out.p = std::move(next);
  }
  return out;
}

MarginalInequalityReport check_marginal_entropy_inequality(const DiscreteJoint& f)
{
  const int n = f.variables();
  if (n < 2 || n > 4)
    throw DomainError("marginal inequality: N must be 2, 3 or 4");
  std::size_t total = 1;
  for (int s : f.shape) {
    if (s < 1)
      throw DomainError("marginal inequality: empty axis");
    total *= static_cast<std::size_t>(s);
  }
  if (total != f.p.size())
    throw DomainError("marginal inequality: table size does not match shape");
  double mass = 0.0;
  for (double x : f.p) {
    if (x < 0.0)
      throw DomainError("marginal inequality: negative probability");
    mass += x;
  }
  if (std::abs(mass - 1.0) > 1e-12)
    throw NormalizationError("marginal inequality: mass " + std::to_string(mass) + " differs from 1");

  // Row-major strides.
  std::vector<std::size_t> stride(static_cast<std::size_t>(n), 1);
  for (int j = n - 2; j >= 0; --j)
    stride[static_cast<std::size_t>(j)] = stride[static_cast<std::size_t>(j) + 1] * static_cast<std::size_t>(f.shape[static_cast<std::size_t>(j) + 1]);

  MarginalInequalityReport r;
  for (int j = 0; j < n; ++j) {
    const auto sj = static_cast<std::size_t>(f.shape[static_cast<std::size_t>(j)]);
    const std::size_t step = stride[static_cast<std::size_t>(j)];
    // Index of the marginal entry: drop digit j.
    std::vector<double> marginal(total / sj, 0.0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      const std::size_t high = idx / (step * sj);
      const std::size_t low = idx % step;
      marginal[high * step + low] += f.p[idx];
    }
    for (double x : marginal)
      r.lhs += xlogx(x);
  }
  for (double x : f.p)
    r.rhs += xlogx(x);
  r.rhs *= (n - 1);
  r.margin = r.rhs - r.lhs;
  r.holds = r.margin >= -1e-12;
  return r;
}

double initial_relative_entropy(const InitialCondition& initial, const Params& params)
{
  params.validate();
  const auto m1 = initial.moment(1);
  const auto m2 = initial.moment(2);
  const auto m4 = initial.moment(4);
  if (!m1 || !m2 || !m4 || !initial.density(0.0))
    throw DomainError("initial_relative_entropy: initial condition '" + initial.label() + "' has no closed-form density");
  const double spread = std::max({std::pow(*m4 / 3.0, 0.25), std::abs(*m1) + std::sqrt(*m2), 1.0 / std::sqrt(params.beta)});
  const double l = std::abs(*m1) + 14.0 * spread;
  const auto grid = DensityGrid::sample([&](double v) { return *initial.density(v); }, GridKind::Density, params.beta, 8193, l);
  return params.n_particles * relative_entropy_grid(grid);
}

EntropyDecay entropy_decay_experiment(const Params& params,
                                      const InitialCondition& initial,
                                      double horizon,
                                      std::size_t replicas,
                                      const EntropyExperimentOptions& options)
{
  EntropyDecay out;
  out.initial_entropy = initial_relative_entropy(initial, params);
  const auto times = uniform_grid(horizon, options.intervals);
  const int n = params.n_particles;

  std::vector<double> pooled;
  RunOptions run_options;
  run_options.histogram_bins = 16;
  run_options.observer = [&](std::size_t index, const Ensemble& e) {
    pooled.clear();
    pooled.reserve(e.replicas() * static_cast<std::size_t>(n));
    for (std::size_t r = 0; r < e.replicas(); ++r)
      for (double x : e.replica(r))
        pooled.push_back(x);
    SampleEntropyOptions est = options.estimator;
    est.seed = options.estimator.seed + index;
    const auto s = relative_entropy_samples(pooled, params.beta, est);
    EntropyPoint p;
    p.t = times[index];
    p.estimate = n * s.estimate;
    p.error = n * s.error;
    p.bound = std::exp(-0.5 * params.mu * p.t) * out.initial_entropy;
    out.points.push_back(p);
  };
  run(params, initial, replicas, times, options.seed, run_options);

  double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
  int used = 0;
  for (const auto& p : out.points) {
    if (!(p.estimate > 3.0 * p.error && p.estimate > 0.0))
      continue;
    const double y = std::log(p.estimate);
    sw += 1.0;
    st += p.t;
    sy += y;
    stt += p.t * p.t;
    sty += p.t * y;
    ++used;
  }
  const double denom = sw * stt - st * st;
  out.decay_exponent = (used >= 3 && denom > 0.0) ? -(sw * sty - st * sy) / denom
                                                  : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace kaclab

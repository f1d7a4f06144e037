#include "kaclab/chaos.hpp"

#include <algorithm>
#include <cmath>

#include "kaclab/errors.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/simulator.hpp"

namespace kaclab {

namespace {

int clamped_bin(double x, double lo, double width, int bins)
{
  const double pos = (x - lo) / width;
  if (!(pos >= 0.0))
    return 0;
  if (pos >= bins)
    return bins - 1;
  return static_cast<int>(pos);
}

double hermite_poly(int k, double x)
{
  double h0 = 1.0;
  if (k == 0)
    return h0;
  double h1 = x;
  for (int n = 1; n < k; ++n) {
    const double h2 = x * h1 - n * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

constexpr int kMaxDegree = 4;

using Expectations = std::array<std::array<double, kMaxDegree + 1>, kMaxDegree + 1>;

/// phi_k at the bin centres, k = 0..4.
std::vector<std::array<double, kMaxDegree + 1>> tabulate(const MarginalSet& m, double beta)
{
  std::vector<std::array<double, kMaxDegree + 1>> phi(static_cast<std::size_t>(m.bins));
  for (int a = 0; a < m.bins; ++a)
    for (int k = 0; k <= kMaxDegree; ++k)
      phi[static_cast<std::size_t>(a)][static_cast<std::size_t>(k)] = chaos_test_function(k, m.center(a), beta);
  return phi;
}

std::array<double, kMaxDegree + 1> one_particle(const std::vector<double>& mass,
                                                const std::vector<std::array<double, kMaxDegree + 1>>& phi)
{
  std::array<double, kMaxDegree + 1> e{};
  for (std::size_t a = 0; a < phi.size(); ++a)
    for (std::size_t k = 0; k < e.size(); ++k)
      e[k] += mass[a] * phi[a][k];
  return e;
}

Expectations two_particle(const std::vector<double>& mass, const std::vector<std::array<double, kMaxDegree + 1>>& phi)
{
  const std::size_t bins = phi.size();
  Expectations e{};
  for (std::size_t a = 0; a < bins; ++a) {
    // Inner sums over b first: row_k = sum_b f2(a, b) phi_k(b).
    std::array<double, kMaxDegree + 1> row{};
    for (std::size_t b = 0; b < bins; ++b) {
      const double w = mass[a * bins + b];
      if (w == 0.0)
        continue;
      for (std::size_t k = 0; k < row.size(); ++k)
        row[k] += w * phi[b][k];
    }
    for (std::size_t i = 0; i < row.size(); ++i)
      for (std::size_t j = 0; j < row.size(); ++j)
        e[i][j] += phi[a][i] * row[j];
  }
  return e;
}

std::array<double, 12> dictionary_terms(const std::array<double, kMaxDegree + 1>& e1, const Expectations& e2)
{
  std::array<double, 12> d{};
  const auto& dict = chaos_dictionary();
  for (std::size_t n = 0; n < dict.size(); ++n) {
    const auto [i, j] = dict[n];
    const auto ui = static_cast<std::size_t>(i);
    const auto uj = static_cast<std::size_t>(j);
    d[n] = e2[ui][uj] - e1[ui] * e1[uj];
  }
  return d;
}

}  // namespace

double MarginalSet::total_mass() const
{
  double s = 0.0;
  for (double x : mass)
    s += x;
  return s;
}

MarginalSet extract_marginals(const Ensemble& ensemble, int k, const MarginalOptions& options)
{
  if (k != 1 && k != 2)
    throw DomainError("extract_marginals: order must be 1 or 2");
  const int n = ensemble.particles();
  if (k == 2 && n < 2)
    throw DomainError("extract_marginals: two-particle marginal needs N >= 2");
  if (options.batches < 1 || ensemble.replicas() < static_cast<std::size_t>(options.batches))
    throw DomainError("extract_marginals: need at least one replica per batch");
  const int bins = options.bins > 0 ? options.bins : (k == 2 ? 64 : 256);
  const double half = options.half_width > 0.0 ? options.half_width : 8.0 / std::sqrt(ensemble.params().beta);

  MarginalSet out;
  out.k = k;
  out.bins = bins;
  out.lo = -half;
  out.hi = half;
  out.n_particles = n;
  out.t = ensemble.time();
  out.replicas = ensemble.replicas();
  const double width = out.width();
  const std::size_t cells = k == 1 ? static_cast<std::size_t>(bins) : static_cast<std::size_t>(bins) * bins;
  const auto batches = static_cast<std::size_t>(options.batches);
  const std::size_t m = ensemble.replicas();

  // Integer counts keep the result independent of particle order and of
  // the batch scheduling.
  std::vector<std::vector<std::uint64_t>> counts(batches, std::vector<std::uint64_t>(cells, 0));
  parallel_for(batches, [&](std::size_t b) {
    auto& total = counts[b];
    std::vector<std::uint64_t> c(static_cast<std::size_t>(bins));
    std::vector<std::size_t> occupied;
    for (std::size_t r = b * m / batches; r < (b + 1) * m / batches; ++r) {
      std::fill(c.begin(), c.end(), 0);
      occupied.clear();
      for (double x : ensemble.replica(r)) {
        const auto a = static_cast<std::size_t>(clamped_bin(x, out.lo, width, bins));
        if (c[a]++ == 0)
          occupied.push_back(a);
      }
      if (k == 1) {
        for (std::size_t a : occupied)
          total[a] += c[a];
        continue;
      }
      // Ordered pairs of distinct particles: c c^T - diag(c).
      for (std::size_t a : occupied)
        for (std::size_t bb : occupied)
          total[a * static_cast<std::size_t>(bins) + bb] += c[a] * c[bb] - (a == bb ? c[a] : 0);
    }
  });

  const double per_replica = k == 1 ? n : static_cast<double>(n) * (n - 1);
  std::vector<std::uint64_t> all(cells, 0);
  out.batch_mass.resize(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const double denom = per_replica * static_cast<double>((b + 1) * m / batches - b * m / batches);
    auto& bm = out.batch_mass[b];
    bm.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      bm[i] = static_cast<double>(counts[b][i]) / denom;
      all[i] += counts[b][i];
    }
  }
  out.mass.resize(cells);
  const double denom = per_replica * static_cast<double>(m);
  for (std::size_t i = 0; i < cells; ++i)
    out.mass[i] = static_cast<double>(all[i]) / denom;
  return out;
}

double chaos_test_function(int k, double v, double beta)
{
  if (k < 0)
    throw DomainError("chaos_test_function: negative degree");
  const double x = std::sqrt(beta) * v;
  return hermite_poly(k, x) * std::exp(-0.25 * x * x);
}

const std::array<std::pair<int, int>, 12>& chaos_dictionary()
{
  static const std::array<std::pair<int, int>, 12> dict{{{1, 1},
                                                         {1, 2},
                                                         {1, 3},
                                                         {1, 4},
                                                         {2, 2},
                                                         {2, 3},
                                                         {2, 4},
                                                         {3, 3},
                                                         {3, 4},
                                                         {4, 4},
                                                         {0, 2},
                                                         {0, 4}}};
  return dict;
}

ChaosMetric chaos_metric(const MarginalSet& f1, const MarginalSet& f2, double beta)
{
  if (f1.k != 1 || f2.k != 2)
    throw DomainError("chaos_metric: expected a one-particle and a two-particle marginal");
  if (f1.bins != f2.bins || f1.lo != f2.lo || f1.hi != f2.hi)
    throw DomainError("chaos_metric: marginal grids differ");
  if (f1.batch_mass.size() != f2.batch_mass.size() || f1.batch_mass.size() < 2)
    throw DomainError("chaos_metric: need matching batch counts of at least 2");
  if (!(beta > 0.0))
    throw DomainError("chaos_metric: beta must be positive");

  const auto phi = tabulate(f1, beta);
  ChaosMetric out;
  out.terms = dictionary_terms(one_particle(f1.mass, phi), two_particle(f2.mass, phi));

  const std::size_t batches = f1.batch_mass.size();
  std::array<double, 12> sum{}, sum_sq{};
  for (std::size_t b = 0; b < batches; ++b) {
    const auto d = dictionary_terms(one_particle(f1.batch_mass[b], phi), two_particle(f2.batch_mass[b], phi));
    for (std::size_t n = 0; n < d.size(); ++n) {
      sum[n] += d[n];
      sum_sq[n] += d[n] * d[n];
    }
  }
  const double bn = static_cast<double>(batches);
  for (std::size_t n = 0; n < sum.size(); ++n) {
    const double mean = sum[n] / bn;
    const double var = std::max(0.0, (sum_sq[n] - bn * mean * mean) / (bn - 1.0));
    out.term_standard_error[n] = std::sqrt(var / bn);
  }
  for (std::size_t n = 0; n < out.terms.size(); ++n) {
    if (std::abs(out.terms[n]) > out.value) {
      out.value = std::abs(out.terms[n]);
      out.argmax = static_cast<int>(n);
    }
  }
  out.standard_error = out.term_standard_error[static_cast<std::size_t>(out.argmax)];
  return out;
}

std::vector<ChaosPoint> chaos_ladder(const Params& params,
                                     const InitialCondition& initial,
                                     const std::vector<int>& ladder,
                                     double t,
                                     std::size_t replicas,
                                     std::uint64_t seed,
                                     const MarginalOptions& options)
{
  if (!(t >= 0.0))
    throw DomainError("chaos_ladder: time must be non-negative");
  MarginalOptions grid = options;
  if (grid.bins <= 0)
    grid.bins = 64;
  std::vector<ChaosPoint> out;
  for (int n : ladder) {
    Params p = params;
    p.n_particles = n;
    Ensemble ensemble(p, replicas, seed, initial);
    ensemble.advance_to(t);
    const auto f1 = extract_marginals(ensemble, 1, grid);
    const auto f2 = extract_marginals(ensemble, 2, grid);
    const auto metric = chaos_metric(f1, f2, p.beta);
    out.push_back({n, t, metric.value, metric.standard_error});
  }
  return out;
}

BoltzmannComparison compare_to_boltzmann(const Params& params,
                                         const InitialCondition& initial,
                                         double horizon,
                                         const BoltzmannComparisonOptions& options)
{
  if (!(horizon > 0.0) || options.intervals < 1)
    throw DomainError("compare_to_boltzmann: need horizon > 0 and at least one interval");
  const auto start = MomentVector::from_initial(initial, 6);
  const auto limit = integrate_moments(start, params, horizon, horizon / options.intervals);
  const auto times = uniform_grid(horizon, options.intervals);

  BoltzmannComparison out;
  for (int n : options.ladder) {
    Params p = params;
    p.n_particles = n;
    RunOptions run_options;
    run_options.histogram_bins = 16;
    const auto series = run(p, initial, options.replicas, times, options.seed, run_options);

    BoltzmannLevel level;
    level.n_particles = n;
    level.times = times;
    level.simulated = series.moments;
    level.standard_error = series.moments_stderr;
    for (std::size_t i = 0; i < times.size(); ++i) {
      std::array<double, 6> pred{};
      for (int k = 1; k <= 6; ++k)
        pred[static_cast<std::size_t>(k - 1)] = limit.samples[i][k];
      level.predicted.push_back(pred);
      for (std::size_t k = 0; k < 6; ++k) {
        const double diff = std::abs(series.moments[i][k] - pred[k]);
        const double se = series.moments_stderr[i][k];
        if (se > 0.0)
          level.max_discrepancy = std::max(level.max_discrepancy, diff / se);
        else if (diff > 1e-12 * std::max(1.0, std::abs(pred[k])))
          level.max_discrepancy = std::numeric_limits<double>::infinity();
      }
    }
    out.levels.push_back(std::move(level));
  }
  return out;
}

McKeanRadius mckean_series_radius(const Params& params, int m, double t, int terms)
{
  if (m < 1)
    throw DomainError("mckean_series_radius: test-function arity must be >= 1");
  if (params.lambda < 0.0 || params.mu < 0.0)
    throw DomainError("mckean_series_radius: rates must be non-negative");
  if (!(t >= 0.0) || terms < 0)
    throw DomainError("mckean_series_radius: need t >= 0 and terms >= 0");
  McKeanRadius out;
  const double stated_rate = 4.0 * params.lambda + params.mu;
  const double bound_rate = 4.0 * params.lambda + 2.0 * params.mu;
  if (stated_rate > 0.0)
    out.stated = 1.0 / stated_rate;
  if (bound_rate > 0.0)
    out.ratio_test = 1.0 / bound_rate;
  double term = 1.0;
  for (int l = 0; l < terms; ++l) {
    out.term_bounds.push_back(term);
    term *= bound_rate * t * (m + l) / (l + 1);
  }
  return out;
}

}  // namespace kaclab

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "kaclab/chaos.hpp"
#include "kaclab/errors.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/simulator.hpp"

using namespace kaclab;

namespace {

MarginalOptions grid64()
{
  MarginalOptions o;
  o.bins = 64;
  return o;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Rotates every replica's pair (v_0, v_1) by an independent uniform angle.
void force_kac_collision(Ensemble& e, std::uint64_t seed)
{
  for (std::size_t r = 0; r < e.replicas(); ++r) {
    StreamRng rng(seed, r);
    kac_collide(e.replica(r), 0, 1, 2.0 * std::numbers::pi * rng.uniform());
  }
}

}  // namespace

TEST_CASE("marginal sets are normalized and consistent")
{
  const Params p{7, 1.0, 1.0, 2.0};
  Ensemble e(p, 400, 3, InitialCondition::two_temperature(0.3, 4.0, 0.5));
  e.advance_to(0.7);
  const auto f1 = extract_marginals(e, 1, grid64());
  const auto f2 = extract_marginals(e, 2, grid64());
  CHECK(f1.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f2.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f1.n_particles == 7);
  CHECK(f2.t == 0.7);
  CHECK(f2.replicas == 400);
  CHECK(f2.hi == doctest::Approx(8.0 / std::sqrt(2.0)));
  for (const auto& b : f2.batch_mass) {
    double s = 0.0;
    for (double x : b)
      s += x;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Summing the pair histogram over its second variable gives f1 exactly.
  for (int a = 0; a < 64; ++a) {
    double row = 0.0;
    for (int b = 0; b < 64; ++b)
      row += f2.mass[static_cast<std::size_t>(a * 64 + b)];
    CHECK(std::abs(row - f1.mass[static_cast<std::size_t>(a)]) <= 1e-14);
    for (int b = 0; b < 64; ++b)
      CHECK(f2.mass[static_cast<std::size_t>(a * 64 + b)] == f2.mass[static_cast<std::size_t>(b * 64 + a)]);
  }
  // Default grids.
  CHECK(extract_marginals(e, 1).bins == 256);
  CHECK(extract_marginals(e, 2).bins == 64);
}

TEST_CASE("permuting particle labels leaves the marginals bit-identical")
{
  const Params p{9, 1.0, 0.5, 1.0};
  Ensemble e(p, 200, 5, InitialCondition::two_temperature(0.5, 3.0, 0.2));
  e.advance_to(1.0);
  const auto a1 = extract_marginals(e, 1, grid64());
  const auto a2 = extract_marginals(e, 2, grid64());
  StreamRng rng(77, 0);
  for (std::size_t r = 0; r < e.replicas(); ++r) {
    auto v = e.replica(r);
    std::shuffle(v.begin(), v.end(), rng);
  }
  const auto b1 = extract_marginals(e, 1, grid64());
  const auto b2 = extract_marginals(e, 2, grid64());
  CHECK(a1.mass == b1.mass);
  CHECK(a2.mass == b2.mass);
  CHECK(a2.batch_mass == b2.batch_mass);
  const auto ma = chaos_metric(a1, a2, 1.0);
  const auto mb = chaos_metric(b1, b2, 1.0);
  CHECK(ma.value == mb.value);
  CHECK(ma.standard_error == mb.standard_error);
}

TEST_CASE("dictionary of bounded test functions")
{
  const auto& dict = chaos_dictionary();
  std::set<std::pair<int, int>> distinct(dict.begin(), dict.end());
  CHECK(distinct.size() == 12);
  for (auto [i, j] : dict) {
    CHECK(i <= j);
    CHECK(j <= 4);
  }
  CHECK(chaos_test_function(0, 0.0, 1.0) == 1.0);
  CHECK(chaos_test_function(2, 1.0, 4.0) == doctest::Approx(3.0 * std::exp(-1.0)));
  for (int k = 0; k <= 4; ++k) {
    double sup = 0.0;
    for (double v = -50.0; v <= 50.0; v += 0.01)
      sup = std::max(sup, std::abs(chaos_test_function(k, v, 1.0)));
    CHECK(sup < 10.0);
    CHECK(std::abs(chaos_test_function(k, 40.0, 1.0)) < 1e-100);
  }
  CHECK_THROWS_AS(chaos_test_function(-1, 0.0, 1.0), DomainError);
}

TEST_CASE("product data at t = 0 is chaotic within the error bar")
{
  for (int n : {2, 10, 100}) {
    const Params p{n, 1.0, 1.0, 1.0};
    Ensemble e(p, 3000, 11, InitialCondition::two_temperature(0.5, 3.0, 0.2));
    const auto m = chaos_metric(extract_marginals(e, 1, grid64()), extract_marginals(e, 2, grid64()), 1.0);
    CAPTURE(n);
    CHECK(m.value >= 0.0);
    CHECK(m.standard_error > 0.0);
    CHECK(m.value < 4.0 * m.standard_error);
  }
}

TEST_CASE("one forced collision at N = 2 correlates the pair")
{
  const Params p{2, 1.0, 1.0, 1.0};
  Ensemble e(p, 20000, 13, InitialCondition::two_temperature(0.5, 3.0, 0.2));
  force_kac_collision(e, 99);
  const auto m = chaos_metric(extract_marginals(e, 1, grid64()), extract_marginals(e, 2, grid64()), 1.0);
  CHECK(m.value > 0.02);
  CHECK(m.value > 8.0 * m.standard_error);

  // Unbinned estimate of the (2, 2) term from the same samples.
  double e2 = 0.0, e1 = 0.0;
  for (std::size_t r = 0; r < e.replicas(); ++r) {
    const auto v = e.replica(r);
    const double a = chaos_test_function(2, v[0], 1.0);
    const double b = chaos_test_function(2, v[1], 1.0);
    e2 += a * b;
    e1 += 0.5 * (a + b);
  }
  e2 /= static_cast<double>(e.replicas());
  e1 /= static_cast<double>(e.replicas());
  const double direct = e2 - e1 * e1;
  const double binned = m.terms[4];
  CHECK(std::abs(binned - direct) <= 0.02 * std::abs(direct) + 1e-3);
  CHECK(std::abs(direct) > 0.02);
}

TEST_CASE("equilibrium start keeps f1 at the reference Gaussian")
{
  const double beta = 1.5;
  const Params p{20, 1.0, 1.0, beta};
  Ensemble e(p, 500, 17, InitialCondition::gaussian(1.0 / beta));
  for (double t : {0.0, 1.0, 3.0}) {
    e.advance_to(t);
    const auto f1 = extract_marginals(e, 1, grid64());
    const double samples = 500.0 * 20.0;
    double chi2 = 0.0;
    for (int a = 0; a < f1.bins; ++a) {
      const double left = a == 0 ? -INFINITY : f1.lo + a * f1.width();
      const double right = a == f1.bins - 1 ? INFINITY : f1.lo + (a + 1) * f1.width();
      const double pa = normal_cdf(right * std::sqrt(beta)) - normal_cdf(left * std::sqrt(beta));
      if (pa * samples < 5.0)
        continue;
      const double d = f1.mass[static_cast<std::size_t>(a)] * samples - pa * samples;
      chi2 += d * d / (pa * samples);
    }
    CAPTURE(t);
    // Roughly 35 populated bins; 5 standard deviations of the chi-square law.
    CHECK(chi2 < 35.0 + 5.0 * std::sqrt(70.0));
  }
}

TEST_CASE("chaos metric decreases with N at fixed time")
{
  const Params p{10, 5.0, 1.0, 1.0};
  const auto initial = InitialCondition::two_temperature(0.5, 3.0, 0.2);
  const auto pts = chaos_ladder(p, initial, {10, 50, 250}, 1.0, 2000, 21);
  REQUIRE(pts.size() == 3);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].t == 1.0);
    if (i > 0)
      CHECK(pts[i].metric < pts[i - 1].metric);
  }
  // The correlation is a real signal, not noise: the energy-type term is
  // resolved at every N.
  for (int n : {10, 250}) {
    Params pn = p;
    pn.n_particles = n;
    Ensemble e(pn, 2000, 21, initial);
    e.advance_to(1.0);
    const auto m = chaos_metric(extract_marginals(e, 1, grid64()), extract_marginals(e, 2, grid64()), 1.0);
    CAPTURE(n);
    CHECK(std::abs(m.terms[4]) > 4.0 * m.term_standard_error[4]);
  }
}

TEST_CASE("chaos metric validation")
{
  const Params p{4, 1.0, 1.0, 1.0};
  Ensemble e(p, 64, 1, InitialCondition::gaussian(1.0));
  const auto f1 = extract_marginals(e, 1, grid64());
  const auto f2 = extract_marginals(e, 2, grid64());
  CHECK_THROWS_AS(extract_marginals(e, 3), DomainError);
  MarginalOptions many;
  many.batches = 65;
  CHECK_THROWS_AS(extract_marginals(e, 1, many), DomainError);
  CHECK_THROWS_AS(chaos_metric(f2, f1, 1.0), DomainError);
  CHECK_THROWS_AS(chaos_metric(extract_marginals(e, 1), f2, 1.0), DomainError);
  CHECK_THROWS_AS(chaos_metric(f1, f2, 0.0), DomainError);
  const Params single{1, 0.0, 1.0, 1.0};
  Ensemble lone(single, 64, 1, InitialCondition::gaussian(1.0));
  CHECK_THROWS_AS(extract_marginals(lone, 2), DomainError);
}

TEST_CASE("moment comparison with the limiting equation")
{
  BoltzmannComparisonOptions opts;
  opts.ladder = {50, 200};
  opts.replicas = 400;
  opts.intervals = 4;
  SUBCASE("equilibrium start")
  {
    const Params p{1, 1.0, 1.0, 1.0};
    const auto r = compare_to_boltzmann(p, InitialCondition::gaussian(1.0), 4.0, opts);
    REQUIRE(r.levels.size() == 2);
    for (const auto& lvl : r.levels) {
      CHECK(lvl.times.size() == 5);
      CHECK(lvl.max_discrepancy < 4.5);
      for (const auto& pred : lvl.predicted) {
        CHECK(pred[1] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(pred[3] == doctest::Approx(3.0).epsilon(1e-10));
        CHECK(pred[5] == doctest::Approx(15.0).epsilon(1e-10));
      }
    }
  }
  SUBCASE("hot Gaussian start follows Newton cooling")
  {
    const double beta = 2.0;
    const Params p{1, 1.0, 1.0, beta};
    const auto r = compare_to_boltzmann(p, InitialCondition::gaussian(2.0 / beta), 4.0, opts);
    for (const auto& lvl : r.levels) {
      CAPTURE(lvl.n_particles);
      for (std::size_t i = 0; i < lvl.times.size(); ++i) {
        const double exact = 1.0 / beta + std::exp(-0.5 * lvl.times[i]) / beta;
        CHECK(lvl.predicted[i][1] == doctest::Approx(exact).epsilon(1e-8));
        CHECK(std::abs(lvl.simulated[i][1] - exact) <= 4.0 * lvl.standard_error[i][1]);
      }
    }
  }
  SUBCASE("shifted start: the mean decays at 2 lambda + mu")
  {
    const Params p{1, 1.0, 1.0, 1.0};
    const auto r = compare_to_boltzmann(p, InitialCondition::gaussian(1.0, 1.0), 2.0, opts);
    for (const auto& lvl : r.levels) {
      CAPTURE(lvl.n_particles);
      for (std::size_t i = 0; i < lvl.times.size(); ++i) {
        const double exact = std::exp(-3.0 * lvl.times[i]);
        CHECK(lvl.predicted[i][0] == doctest::Approx(exact).epsilon(1e-8));
        CHECK(std::abs(lvl.simulated[i][0] - exact) <= 4.0 * lvl.standard_error[i][0]);
      }
    }
  }
  CHECK_THROWS_AS(compare_to_boltzmann({1, 1.0, 1.0, 1.0}, InitialCondition::gaussian(1.0), 0.0), DomainError);
}

TEST_CASE("series convergence horizon")
{
  const auto a = mckean_series_radius({1, 1.0, 1.0, 1.0}, 2);
  CHECK(a.stated == doctest::Approx(0.2));
  CHECK(a.ratio_test == doctest::Approx(1.0 / 6.0));
  const auto b = mckean_series_radius({1, 0.0, 1.0, 1.0}, 1);
  CHECK(b.stated == doctest::Approx(1.0));
  CHECK(b.ratio_test == doctest::Approx(0.5));
  const auto c = mckean_series_radius({1, 0.0, 0.0, 1.0}, 3);
  CHECK(std::isinf(c.stated));
  CHECK(std::isinf(c.ratio_test));
  CHECK_THROWS_AS(mckean_series_radius({1, 1.0, 1.0, 1.0}, 0), DomainError);

  // Term ratios follow (4 lambda + 2 mu)(m + l) t / (l + 1).
  const int m = 3;
  const double t = 0.1;
  const auto d = mckean_series_radius({1, 1.0, 1.0, 1.0}, m, t, 50);
  REQUIRE(d.term_bounds.size() == 50);
  CHECK(d.term_bounds[0] == 1.0);
  for (int l = 0; l + 1 < 50; ++l)
    CHECK(d.term_bounds[static_cast<std::size_t>(l + 1)] / d.term_bounds[static_cast<std::size_t>(l)] ==
          doctest::Approx(6.0 * (m + l) * t / (l + 1)));
  // Below the ratio-test horizon the bounds decay; between the two horizons
  // they grow.
  const auto below = mckean_series_radius({1, 1.0, 1.0, 1.0}, m, 0.15, 400);
  CHECK(below.term_bounds[399] < below.term_bounds[100]);
  const auto between = mckean_series_radius({1, 1.0, 1.0, 1.0}, m, 0.19, 400);
  CHECK(between.term_bounds[399] > between.term_bounds[100]);
}

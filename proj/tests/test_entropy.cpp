#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kaclab/entropy.hpp"
#include "kaclab/errors.hpp"
#include "kaclab/quadrature.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/simulator.hpp"

using namespace kaclab;

namespace {

double gaussian_pdf(double v, double mean, double var)
{
  return std::exp(-(v - mean) * (v - mean) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var);
}

/// Closed form S(N(a, s2) | N(0, 1/beta)).
double gaussian_relative_entropy(double a, double s2, double beta)
{
  return 0.5 * (beta * s2 - 1.0 - std::log(beta * s2)) + 0.5 * beta * a * a;
}

/// Monic probabilists' Hermite polynomial of the internal variable sqrt(beta) v.
double hermite(int k, double x)
{
  double h0 = 1.0, h1 = x;
  if (k == 0)
    return h0;
  for (int n = 1; n < k; ++n) {
    const double h2 = x * h1 - n * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

std::vector<double> gaussian_samples(std::size_t n, double mean, double var, std::uint64_t seed)
{
  StreamRng rng(seed, 0);
  std::vector<double> v(n);
  for (auto& x : v)
    x = mean + std::sqrt(var) * rng.normal();
  return v;
}

}  // namespace

TEST_CASE("Gauss-Hermite rule integrates Gaussian moments")
{
  const auto rule = gauss_hermite(32);
  double wsum = 0.0;
  for (double w : rule.weights)
    wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  for (int k = 0; k <= 30; ++k) {
    double m = 0.0, magnitude = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      m += rule.weights[i] * std::pow(rule.nodes[i], k);
      magnitude += rule.weights[i] * std::pow(std::abs(rule.nodes[i]), k);
    }
    CHECK(std::abs(m - gaussian_moment(k)) <= 1e-10 * magnitude);
  }
  CHECK_THROWS_AS(gauss_hermite(0), DomainError);
}

TEST_CASE("Gauss-Legendre rule agrees with an independent implementation")
{
  const auto rule = gauss_legendre(30);
  auto f = [](double x) { return std::cos(3 * x) * std::exp(x); };
  double mine = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    mine += rule.weights[i] * f(rule.nodes[i]);
  const double oracle = boost::math::quadrature::gauss<double, 30>::integrate(f, -1.0, 1.0);
  CHECK(mine == doctest::Approx(oracle).epsilon(1e-14));
  double poly = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    poly += rule.weights[i] * std::pow(rule.nodes[i], 58);
  CHECK(poly == doctest::Approx(2.0 / 59.0).epsilon(1e-13));
}

TEST_CASE("grid relative entropy: closed forms")
{
  for (double beta : {1.0, 2.0}) {
    const auto g = DensityGrid::sample([&](double v) { return gaussian_pdf(v, 0, 1 / beta); }, GridKind::Density, beta);
    CHECK(std::abs(relative_entropy_grid(g)) <= 1e-12);
    for (double s2 : {0.5 / beta, 2.0 / beta}) {
      const auto f = DensityGrid::sample([&](double v) { return gaussian_pdf(v, 0, s2); }, GridKind::Density, beta, 4096,
                                         12.0 / std::sqrt(beta));
      CHECK(relative_entropy_grid(f) == doctest::Approx(gaussian_relative_entropy(0, s2, beta)).epsilon(1e-10));
    }
    const double a = 0.7;
    const auto shifted =
        DensityGrid::sample([&](double v) { return gaussian_pdf(v, a, 1 / beta); }, GridKind::Density, beta);
    CHECK(relative_entropy_grid(shifted) == doctest::Approx(beta * a * a / 2).epsilon(1e-10));
    CHECK(relative_entropy_grid(shifted.as_ratio()) == doctest::Approx(beta * a * a / 2).epsilon(1e-10));
  }
  const auto neg = DensityGrid::sample([](double v) { return v; }, GridKind::Density, 1.0);
  CHECK_THROWS_AS(relative_entropy_grid(neg), DomainError);
  const auto heavy = DensityGrid::sample([](double v) { return 2 * gaussian_pdf(v, 0, 1); }, GridKind::Density, 1.0);
  CHECK_THROWS_AS(relative_entropy_grid(heavy), NormalizationError);
  CHECK(relative_entropy_grid(heavy.normalized()) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("interpolation is exact for Gaussian ratios and cubics")
{
  const auto g = DensityGrid::sample([](double v) { return std::exp(0.3 * v * v - 0.2 * v); }, GridKind::Ratio, 1.0);
  for (double x : {-11.0, -3.3, 0.01, 5.77, 14.0})
    CHECK(g.at(x) == doctest::Approx(std::exp(0.3 * x * x - 0.2 * x)).epsilon(1e-9));
  const auto c = DensityGrid::sample([](double v) { return v * v * v - v; }, GridKind::Ratio, 1.0);
  for (double x : {-12.0, -2.1, 0.3, 7.9, 10.5})
    CHECK(c.at(x) == doctest::Approx(x * x * x - x).epsilon(1e-10).scale(1.0));
}

TEST_CASE("sample estimator")
{
  SUBCASE("equilibrium samples")
  {
    const auto v = gaussian_samples(200000, 0.0, 1.0, 1);
    const auto s = relative_entropy_samples(v, 1.0);
    CHECK(std::abs(s.estimate) <= 3.0 * s.error + 2e-4);
    CHECK(s.error > 0.0);
  }
  SUBCASE("hot Gaussian samples")
  {
    const double beta = 2.0;
    const auto v = gaussian_samples(200000, 0.0, 2.0 / beta, 2);
    const auto s = relative_entropy_samples(v, beta);
    const double oracle = 0.5 * (2.0 - 1.0 - std::log(2.0));
    CHECK(std::abs(s.estimate - oracle) <= 3.0 * s.error);
  }
  SUBCASE("reproducible error bar")
  {
    const auto v = gaussian_samples(5000, 0.3, 1.0, 3);
    const auto a = relative_entropy_samples(v, 1.0);
    const auto b = relative_entropy_samples(v, 1.0);
    CHECK(a.estimate == b.estimate);
    CHECK(a.error == b.error);
  }
  SUBCASE("failures")
  {
    const std::vector<double> constant(5000, 1.5);
    CHECK_THROWS_AS(relative_entropy_samples(constant, 1.0), DomainError);
    const auto few = gaussian_samples(500, 0.0, 1.0, 4);
    CHECK_THROWS_AS(relative_entropy_samples(few, 1.0), EstimatorUnreliable);
  }
}

TEST_CASE("OU semigroup")
{
  const double beta = 1.5;
  const auto one = DensityGrid::sample([](double) { return 1.0; }, GridKind::Ratio, beta);
  const auto p1 = ou_apply(one, 0.7);
  for (int i = 0; i < p1.size(); i += 97)
    CHECK(p1.value(i) == doctest::Approx(1.0).epsilon(1e-13));

  const auto lin = DensityGrid::sample([](double v) { return v; }, GridKind::Ratio, beta);
  for (double s : {0.1, 1.0, 3.0}) {
    const auto pl = ou_apply(lin, s);
    for (int i = 0; i < pl.size(); i += 101)
      CHECK(std::abs(pl.value(i) - std::exp(-s) * pl.node(i)) <= 1e-10);
  }
  const auto same = ou_apply(lin, 0.0);
  CHECK(same.values() == lin.values());
  CHECK_THROWS_AS(ou_apply(lin, -0.1), DomainError);

  // Semigroup property on a skewed density.
  const auto f = DensityGrid::sample([](double v) { return 0.7 * gaussian_pdf(v, 0.5, 0.8) + 0.3 * gaussian_pdf(v, -1.0, 0.4); },
                                     GridKind::Density, 1.0)
                     .as_ratio();
  const auto composed = ou_apply(ou_apply(f, 0.3), 0.5);
  const auto direct = ou_apply(f, 0.8);
  for (int i = 0; i < f.size(); ++i)
    if (std::abs(f.node(i)) <= 6.0)
      CHECK(std::abs(composed.value(i) - direct.value(i)) * f.gaussian(f.node(i)) <= 1e-8);
}

TEST_CASE("OU contraction is an equality for shifted Gaussians")
{
  const double a = 0.8;
  const auto g = DensityGrid::sample([&](double v) { return std::exp(a * v - a * a / 2); }, GridKind::Ratio, 1.0);
  for (double s : {0.1, 0.5, 1.0, 2.0}) {
    const double lhs = entropy_functional(ou_apply(g, s));
    const double rhs = std::exp(-2 * s) * entropy_functional(g);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    CHECK(lhs <= rhs + 1e-8);
  }
}

TEST_CASE("thermostat operator acts diagonally on Hermite polynomials")
{
  const double beta = 2.0;
  std::vector<double> points;
  for (double v = -4.0; v <= 4.0; v += 0.37)
    points.push_back(v);
  for (int k = 0; k <= 8; ++k) {
    auto h = [&](double v) { return hermite(k, std::sqrt(beta) * v); };
    const auto t = t_apply_at(h, points, beta);
    const auto tq = t_quarter_apply_at(h, points, beta);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double scale = std::pow(1.0 + std::abs(points[i]) * std::sqrt(beta), k);
      CHECK(std::abs(t[i] - hermite_eigenvalue(k) * h(points[i])) <= 1e-8 * scale);
      if (k % 2 == 0)
        CHECK(std::abs(tq[i] - t[i]) <= 1e-8 * scale);
    }
  }
  // Grid versions on H2 (cubic interpolation is exact).
  const auto h2 = DensityGrid::sample([&](double v) { return beta * v * v - 1.0; }, GridKind::Ratio, beta);
  const auto th2 = t_apply(h2);
  for (int i = 0; i < h2.size(); i += 64)
    CHECK(std::abs(th2.value(i) - 0.5 * h2.value(i)) <= 1e-10 * (1 + std::abs(h2.value(i))));
  const auto h1 = DensityGrid::sample([&](double v) { return std::sqrt(beta) * v; }, GridKind::Ratio, beta);
  const auto th1 = t_apply(h1);
  for (int i = 0; i < h1.size(); i += 64)
    CHECK(std::abs(th1.value(i)) <= 1e-10);
  const auto one = DensityGrid::sample([](double) { return 1.0; }, GridKind::Ratio, beta);
  CHECK(t_apply(one).value(1000) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("quarter-period average equals T on even ratios")
{
  const auto g = DensityGrid::sample([](double v) { return 0.5 * gaussian_pdf(v, 1.2, 0.5) + 0.5 * gaussian_pdf(v, -1.2, 0.5); },
                                     GridKind::Density, 1.0)
                     .as_ratio();
  const auto t = t_apply(g);
  const auto tq = t_quarter_apply(g);
  for (int i = 0; i < g.size(); ++i)
    CHECK(std::abs(t.value(i) - tq.value(i)) * g.gaussian(g.node(i)) <= 1e-8);
}

TEST_CASE("thermostat entropy inequality examples")
{
  const auto one = DensityGrid::sample([](double) { return 1.0; }, GridKind::Ratio, 1.0);
  const auto r0 = check_thermostat_entropy_inequality(one);
  CHECK(std::abs(r0.lhs) <= 1e-12);
  CHECK(std::abs(r0.rhs) <= 1e-12);
  CHECK(r0.holds);

  const auto hot = DensityGrid::sample([](double v) { return gaussian_pdf(v, 0, 2.0); }, GridKind::Density, 1.0, 4096, 12.0);
  const auto r1 = check_thermostat_entropy_inequality(hot);
  CHECK(r1.rhs == doctest::Approx(0.25 * (1.0 - std::log(2.0))).epsilon(1e-10));
  CHECK(r1.margin > 1e-3);
  CHECK(r1.strong_margin > 1e-3);
  CHECK(r1.holds);

  const auto quartic = DensityGrid::sample([](double v) { return 1.0 + 0.5 * hermite(4, v) / std::sqrt(24.0); },
                                           GridKind::Ratio, 1.0);
  const auto r2 = check_thermostat_entropy_inequality(quartic);
  CHECK(r2.holds);
  CHECK(r2.margin > 0.0);

  const auto unnormalized = DensityGrid::sample([](double) { return 1.3; }, GridKind::Ratio, 1.0);
  CHECK_THROWS_AS(check_thermostat_entropy_inequality(unnormalized), NormalizationError);
}

TEST_CASE("marginal entropy inequality")
{
  SUBCASE("products are equality cases")
  {
    const auto f = DiscreteJoint::product({{0.2, 0.8}, {0.5, 0.3, 0.2}, {0.1, 0.9}});
    const auto r = check_marginal_entropy_inequality(f);
    CHECK(std::abs(r.margin) <= 1e-12);
    CHECK(r.holds);
  }
  SUBCASE("perfectly correlated pair")
  {
    DiscreteJoint f{{2, 2}, {0.5, 0.0, 0.0, 0.5}};
    const auto r = check_marginal_entropy_inequality(f);
    CHECK(r.margin == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  }
  SUBCASE("uniform table")
  {
    DiscreteJoint f{{3, 3, 3, 3}, std::vector<double>(81, 1.0 / 81.0)};
    const auto r = check_marginal_entropy_inequality(f);
    CHECK(std::abs(r.margin) <= 1e-12);
  }
  SUBCASE("marginal layout oracle")
  {
    // Dropping variable 1 of a 2x3 table sums along its rows.
    DiscreteJoint f{{2, 3}, {0.1, 0.2, 0.1, 0.3, 0.2, 0.1}};
    const auto r = check_marginal_entropy_inequality(f);
    auto xl = [](double x) { return x * std::log(x); };
    const double oracle = xl(0.4) + xl(0.6) + xl(0.4) + xl(0.4) + xl(0.2);
    CHECK(r.lhs == doctest::Approx(oracle).epsilon(1e-14));
  }
  SUBCASE("random tables")
  {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 2; n <= 4; ++n) {
      for (int trial = 0; trial < 20; ++trial) {
        DiscreteJoint f;
        f.shape.assign(static_cast<std::size_t>(n), 3);
        f.p.resize(static_cast<std::size_t>(std::pow(3, n)));
        double total = 0.0;
        for (auto& x : f.p)
          total += (x = std::pow(u(gen), 3));
        for (auto& x : f.p)
          x /= total;
        CHECK(check_marginal_entropy_inequality(f).holds);
      }
    }
  }
  SUBCASE("errors")
  {
    CHECK_THROWS_AS(check_marginal_entropy_inequality(DiscreteJoint{{2}, {0.5, 0.5}}), DomainError);
    CHECK_THROWS_AS(check_marginal_entropy_inequality(DiscreteJoint{{2, 2}, {0.5, 0.5, 0.5, 0.5}}), NormalizationError);
    CHECK_THROWS_AS(check_marginal_entropy_inequality(DiscreteJoint{{2, 2}, {1.5, -0.5, 0.0, 0.0}}), DomainError);
  }
}

TEST_CASE("initial relative entropy")
{
  const Params p{3, 1.0, 1.0, 1.5};
  CHECK(initial_relative_entropy(InitialCondition::gaussian(2.0), p) ==
        doctest::Approx(3 * gaussian_relative_entropy(0, 2.0, 1.5)).epsilon(1e-10));
  CHECK(std::abs(initial_relative_entropy(InitialCondition::gaussian(1 / 1.5), p)) <= 1e-12);

  const double frac = 0.1, hot = 9.0, cold = 0.6;
  auto f = [&](double v) { return frac * gaussian_pdf(v, 0, hot) + (1 - frac) * gaussian_pdf(v, 0, cold); };
  auto integrand = [&](double v) {
    const double fv = f(v);
    if (fv == 0.0)
      return 0.0;
    return fv * (std::log(fv) + 0.75 * v * v - 0.5 * std::log(1.5 / (2 * std::numbers::pi)));
  };
  const double oracle =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -60.0, 60.0, 25, 1e-14);
  CHECK(initial_relative_entropy(InitialCondition::two_temperature(frac, hot, cold), p) ==
        doctest::Approx(3 * oracle).epsilon(1e-9));
  CHECK_THROWS_AS(initial_relative_entropy(InitialCondition::custom([](StreamRng&, int) { return 0.0; }), p),
                  DomainError);
}

TEST_CASE("entropy decay experiment")
{
  SUBCASE("equilibrium start stays at zero")
  {
    const Params p{4, 1.0, 1.0, 1.0};
    const auto r = entropy_decay_experiment(p, InitialCondition::gaussian(1.0), 2.0, 2000, {4, 3, {}});
    for (const auto& pt : r.points) {
      CHECK(std::abs(pt.bound) <= 1e-12);
      CHECK(std::abs(pt.estimate) <= 3.0 * pt.error + 4.0 * 2e-4);
    }
  }
  SUBCASE("two-temperature start stays below the bound and decreases")
  {
    const Params p{5, 1.0, 1.0, 1.0};
    const auto r = entropy_decay_experiment(p, InitialCondition::two_temperature(0.2, 6.0, 0.5), 6.0, 2000, {6, 5, {}});
    REQUIRE(r.points.size() == 7);
    CHECK(r.points[0].bound == doctest::Approx(r.initial_entropy));
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      CHECK(r.points[i].estimate <= r.points[i].bound + 3.0 * r.points[i].error);
      if (i > 0)
        CHECK(r.points[i].estimate <=
              r.points[i - 1].estimate + 3.0 * std::hypot(r.points[i].error, r.points[i - 1].error));
    }
  }
  SUBCASE("single particle with the thermostat only decays at least at mu/2")
  {
    const Params p{1, 0.0, 2.0, 1.0};
    const auto r = entropy_decay_experiment(p, InitialCondition::gaussian(2.0), 3.0, 40000, {6, 7, {}});
    for (const auto& pt : r.points)
      CHECK(pt.estimate <= pt.bound + 3.0 * pt.error);
    REQUIRE(std::isfinite(r.decay_exponent));
    CHECK(r.decay_exponent >= 0.5 * p.mu - 0.1);
  }
}

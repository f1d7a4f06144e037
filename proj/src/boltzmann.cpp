#include "kaclab/boltzmann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "kaclab/errors.hpp"
#include "kaclab/simulator.hpp"

namespace kaclab {

namespace {

std::vector<double> binomial_row(int n)
{
  std::vector<double> row(static_cast<std::size_t>(n) + 1, 1.0);
  for (int k = 1; k < n; ++k)
    row[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(k) - 1] * (n - k + 1) / k;
  return row;
}

std::vector<double> axpy(const std::vector<double>& y, double a, const std::vector<double>& x)
{
  std::vector<double> out(y);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] += a * x[i];
  return out;
}

/// Precomputed coefficients C(n,k) A(k, n-k) and the bath moments.
struct Hierarchy
{
  Params params;
  std::vector<std::vector<double>> weight;
  std::vector<double> bath;

  Hierarchy(const Params& p, int order) : params(p)
  {
    weight.resize(static_cast<std::size_t>(order) + 1);
    bath.resize(static_cast<std::size_t>(order) + 1);
    for (int n = 0; n <= order; ++n) {
      const auto c = binomial_row(n);
      auto& w = weight[static_cast<std::size_t>(n)];
      w.resize(static_cast<std::size_t>(n) + 1);
      for (int k = 0; k <= n; ++k)
        w[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k)] * angular_moment(k, n - k);
      bath[static_cast<std::size_t>(n)] = gaussian_moment(n) * std::pow(p.beta, -0.5 * n);
    }
  }

  std::vector<double> operator()(const std::vector<double>& m) const
  {
    std::vector<double> d(m.size(), 0.0);
    for (std::size_t n = 0; n < m.size(); ++n) {
      double gain_kac = 0.0;
      double gain_bath = 0.0;
      const auto& w = weight[n];
      for (std::size_t k = 0; k <= n; ++k) {
        if (w[k] == 0.0)
          continue;
        gain_kac += w[k] * m[k] * m[n - k];
        gain_bath += w[k] * m[k] * bath[n - k];
      }
      d[n] = 2.0 * params.lambda * (gain_kac - m[n]) + params.mu * (gain_bath - m[n]);
    }
    return d;
  }

  std::vector<double> rk4(const std::vector<double>& y, double h) const
  {
    const auto k1 = (*this)(y);
    const auto k2 = (*this)(axpy(y, 0.5 * h, k1));
    const auto k3 = (*this)(axpy(y, 0.5 * h, k2));
    const auto k4 = (*this)(axpy(y, h, k3));
    std::vector<double> out(y);
    for (std::size_t i = 0; i < y.size(); ++i)
      out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
  }
};

}  // namespace

MomentVector MomentVector::gaussian(int order, double temperature, double mean)
{
  return from_initial(InitialCondition::gaussian(temperature, mean), order);
}

MomentVector MomentVector::from_initial(const InitialCondition& initial, int order)
{
  if (order < 0)
    throw DomainError("moment vector: negative order");
  MomentVector out;
  out.m.resize(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) {
    const auto v = initial.moment(k);
    if (!v)
      throw DomainError("moment vector: initial condition '" + initial.label() + "' has no closed-form moments");
    out.m[static_cast<std::size_t>(k)] = *v;
  }
  return out;
}

std::vector<double> moment_rhs(const MomentVector& m, const Params& params)
{
  params.validate();
  if (m.m.empty() || std::abs(m.m[0] - 1.0) > 1e-12)
    throw DomainError("moment_rhs: m_0 must equal 1");
  return Hierarchy(params, m.order())(m.m);
}

double hankel_min_eigenvalue(const MomentVector& m)
{
  const int h = m.order() / 2;
  Eigen::MatrixXd a(h + 1, h + 1);
  for (int i = 0; i <= h; ++i)
    for (int j = 0; j <= h; ++j)
      a(i, j) = m[i + j];
  for (int i = 0; i <= h; ++i)
    if (!(a(i, i) > 0.0))
      return a(i, i);
  const Eigen::VectorXd scale = a.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd scaled = scale.asDiagonal() * a * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scaled, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

MomentIntegration integrate_moments(const MomentVector& m0,
                                    const Params& params,
                                    double horizon,
                                    double dt,
                                    const MomentOptions& options)
{
  params.validate();
  if (!(dt > 0.0))
    throw DomainError("integrate_moments: dt must be positive");
  if (!(horizon >= 0.0))
    throw DomainError("integrate_moments: negative horizon");
  if (m0.m.empty() || std::abs(m0.m[0] - 1.0) > 1e-12)
    throw DomainError("integrate_moments: m_0 must equal 1");

  const Hierarchy f(params, m0.order());
  MomentIntegration out;
  std::vector<double> y = m0.m;
  double t = m0.time;
  const double end = m0.time + horizon;

  auto check_hankel = [&](const MomentVector& mv) {
    const double e = hankel_min_eigenvalue(mv);
    if (e < -options.hankel_tolerance)
      throw IntegrationFailure("integrate_moments: Hankel positivity lost at t = " + std::to_string(mv.time) +
                               " (min eigenvalue " + std::to_string(e) + ")");
  };

  out.samples.push_back(MomentVector{t, y});
  check_hankel(out.samples.back());
  double h = dt;
  const int intervals = static_cast<int>(std::ceil(horizon / dt - 1e-12));
  for (int k = 1; k <= intervals; ++k) {
    const double target = std::min(end, m0.time + k * dt);
    while (target - t > 1e-12 * dt) {
      const double step = std::min(h, target - t);
      const auto full = f.rk4(y, step);
      const auto half = f.rk4(f.rk4(y, 0.5 * step), 0.5 * step);
      double ratio = 0.0;
      double err_sum = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double err = std::abs(half[i] - full[i]) / 15.0;
        err_sum = std::max(err_sum, err);
        // The floor keeps rounding noise from forcing endless halving.
        const double allowed = std::max(options.tolerance * step, 64.0 * std::numeric_limits<double>::epsilon());
        ratio = std::max(ratio, err / (allowed * std::max(1.0, std::abs(half[i]))));
      }
      if (ratio > 1.0) {
        h = 0.5 * step;
        if (h < 1e-12 * std::max(1.0, std::abs(end)))
          throw IntegrationFailure("integrate_moments: step size underflow");
        continue;
      }
      for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = half[i] + (half[i] - full[i]) / 15.0;
      y[0] = 1.0;
      t += step;
      out.error_estimate += err_sum;
      ++out.steps;
      // Grow cautiously after an easy step.
      if (ratio < 1.0 / 64.0 && step == h)
        h = std::min(2.0 * h, dt);
    }
    t = target;
    out.samples.push_back(MomentVector{t, y});
    check_hankel(out.samples.back());
  }
  return out;
}

double linearized_eigenvalue(int n, const Params& params)
{
  if (n < 1)
    throw DomainError("linearized_eigenvalue: need n >= 1");
  const double s = hermite_eigenvalue(n);
  return 2.0 * params.lambda * (1.0 - 2.0 * s) + params.mu * (1.0 - s);
}

}  // namespace kaclab

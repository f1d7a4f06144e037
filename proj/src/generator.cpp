#include "kaclab/generator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "kaclab/errors.hpp"

namespace kaclab {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kRouteTol = 1e-10;

double factorial(int k)
{
  double f = 1.0;
  for (int i = 2; i <= k; ++i)
    f *= i;
  return f;
}

double binomial(int n, int k)
{
  if (k < 0 || k > n)
    return 0.0;
  double b = 1.0;
  for (int i = 1; i <= k; ++i)
    b = b * (n - k + i) / i;
  return b;
}

/// prod_i (2 a_i)!: squared norm of the monic Hermite product H_{2a}.
double hermite_norm_squared(const MultiIndex& a)
{
  double r = 1.0;
  for (int e : a.entries())
    r *= factorial(2 * e);
  return r;
}

/// Mean over theta of (x cos + y sin)^{2a} (-x sin + y cos)^{2b}, returned as
/// coefficients of x^{2k} y^{2(a+b-k)}, k = 0..a+b. Odd powers of x vanish.
std::vector<double> pair_rotation_average(int a, int b)
{
  std::vector<double> out(static_cast<std::size_t>(a + b + 1), 0.0);
  for (int i = 0; i <= 2 * a; ++i) {
    for (int m = 0; m <= 2 * b; ++m) {
      if ((i + m) % 2 != 0)
        continue;
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      const double avg = angular_moment(i + 2 * b - m, 2 * a - i + m);
      out[static_cast<std::size_t>((i + m) / 2)] += sign * binomial(2 * a, i) * binomial(2 * b, m) * avg;
    }
  }
  return out;
}

void accumulate(EvenPolynomial& p, const MultiIndex& key, double c)
{
  if (c == 0.0)
    return;
  p[key] += c;
}

/// Adds the rotation average of pair (i, j) applied to v^{2a}, scaled by w.
void add_pair(EvenPolynomial& out, const MultiIndex& a, int i, int j, double w, bool sort_keys)
{
  const auto coeffs = pair_rotation_average(a[i], a[j]);
  const int total = a[i] + a[j];
  MultiIndex b = a;
  for (int k = 0; k <= total; ++k) {
    const double c = coeffs[static_cast<std::size_t>(k)];
    if (c == 0.0)
      continue;
    b[i] = k;
    b[j] = total - k;
    accumulate(out, sort_keys ? b.sorted_descending() : b, w * c);
  }
}

SectorMatrix make_matrix(const SectorBasis& basis, OperatorTag tag)
{
  const int d = basis.size();
  return SectorMatrix{basis, Eigen::MatrixXd::Zero(d, d), tag};
}

/// Fills a matrix from monic-basis images: column j holds the coefficients of
/// the operator applied to basis function j, summed per orbit in the
/// symmetric basis. Converts to orthonormal coordinates.
template <class ColumnImage>
SectorMatrix assemble(const SectorBasis& basis, OperatorTag tag, ColumnImage image)
{
  SectorMatrix m = make_matrix(basis, tag);
  const int d = basis.size();
  std::vector<double> norm(static_cast<std::size_t>(d));
  std::vector<double> orbit(static_cast<std::size_t>(d), 1.0);
  for (int i = 0; i < d; ++i) {
    norm[static_cast<std::size_t>(i)] = std::sqrt(hermite_norm_squared(basis.index(i)));
    if (basis.is_symmetric())
      orbit[static_cast<std::size_t>(i)] = basis.index(i).orbit_size();
  }
  for (int col = 0; col < d; ++col) {
    const EvenPolynomial img = image(basis.index(col));
    for (const auto& [key, c] : img) {
      const auto row = basis.find(key);
      if (!row)
        throw AssemblyError("operator image leaves the sector at " + key.to_string());
      const auto r = static_cast<std::size_t>(*row);
      const auto k = static_cast<std::size_t>(col);
      // Orthonormal entry: (n_r / n_c) * sqrt(|orbit_c| / |orbit_r|) * P[r][c].
      m.entries(*row, col) += c * (norm[r] / norm[k]) * std::sqrt(orbit[k] / orbit[r]);
    }
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// SectorBasis

SectorBasis::SectorBasis(int n, int l, bool symmetric, std::vector<MultiIndex> indices)
    : n_(n)
    , l_(l)
    , symmetric_(symmetric)
    , indices_(std::move(indices))
{
  for (std::size_t i = 0; i < indices_.size(); ++i)
    position_.emplace(indices_[i], static_cast<int>(i));
}

SectorBasis SectorBasis::full(int n, int l)
{
  if (n < 1 || l < 0)
    throw DomainError("SectorBasis: need N >= 1 and l >= 0");
  return SectorBasis(n, l, false, weak_compositions(l, n));
}

SectorBasis SectorBasis::symmetric(int n, int l)
{
  if (n < 1 || l < 0)
    throw DomainError("SectorBasis: need N >= 1 and l >= 0");
  // Partitions are generated with length min(n, l) and padded to n.
  const int parts = std::max(1, std::min(n, l));
  std::vector<MultiIndex> idx;
  for (const auto& p : partitions(l, parts)) {
    std::vector<int> e = p.entries();
    e.resize(static_cast<std::size_t>(n), 0);
    idx.emplace_back(std::move(e));
  }
  return SectorBasis(n, l, true, std::move(idx));
}

std::optional<int> SectorBasis::find(const MultiIndex& a) const
{
  const auto it = position_.find(symmetric_ ? a.sorted_descending() : a);
  if (it == position_.end())
    return std::nullopt;
  return it->second;
}

double SectorBasis::norm_squared(int i) const
{
  const auto& a = index(i);
  return hermite_norm_squared(a) * (symmetric_ ? a.orbit_size() : 1.0);
}

std::string to_string(OperatorTag tag)
{
  switch (tag) {
    case OperatorTag::Thermostat:
      return "L_T";
    case OperatorTag::Kac:
      return "L_K";
    case OperatorTag::Radial:
      return "L_R";
    case OperatorTag::Projector:
      return "B";
    case OperatorTag::Full:
      return "full";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// SectorMatrix

double SectorMatrix::asymmetry() const
{
  return (entries - entries.transpose()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd SectorMatrix::eigenvalues() const
{
  if (entries.size() == 0)
    return {};
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  if (asymmetry() > kSymmetryTol * scale)
    throw AssemblyError("sector matrix " + to_string(tag) + " is not symmetric (asymmetry " +
                        std::to_string(asymmetry()) + ")");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw AssemblyError("eigensolver failed");
  return solver.eigenvalues();
}

double SectorMatrix::smallest_eigenvalue() const
{
  return eigenvalues()(0);
}

// ---------------------------------------------------------------------------
// Q on monomials

EvenPolynomial apply_Q_monomial(const MultiIndex& a)
{
  const int n = a.size();
  if (n < 2)
    throw DomainError("apply_Q_monomial: Q needs N >= 2");
  EvenPolynomial out;
  const double w = 1.0 / binomial(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      add_pair(out, a, i, j, w, false);
  return out;
}

EvenPolynomial apply_Q_exponents(const MultiIndex& exponents)
{
  std::vector<int> half;
  half.reserve(static_cast<std::size_t>(exponents.size()));
  for (int e : exponents.entries()) {
    if (e % 2 != 0)
      throw DomainError("apply_Q_exponents: odd exponent in " + exponents.to_string() +
                        "; only even sectors are assembled");
    half.push_back(e / 2);
  }
  return apply_Q_monomial(MultiIndex(std::move(half)));
}

EvenPolynomial apply_Q(const EvenPolynomial& p)
{
  EvenPolynomial out;
  for (const auto& [a, c] : p)
    for (const auto& [b, d] : apply_Q_monomial(a))
      accumulate(out, b, c * d);
  return out;
}

EvenPolynomial apply_kac(const EvenPolynomial& p)
{
  if (p.empty())
    return {};
  const double n = p.begin()->first.size();
  EvenPolynomial out;
  for (const auto& [a, c] : p)
    accumulate(out, a, n * c);
  for (const auto& [b, d] : apply_Q(p))
    accumulate(out, b, -n * d);
  return out;
}

EvenPolynomial apply_Q_orbit_sums(const MultiIndex& a)
{
  const int n = a.size();
  if (n < 2)
    throw DomainError("apply_Q_orbit_sums: Q needs N >= 2");
  std::vector<int> support, zeros;
  for (int i = 0; i < n; ++i)
    (a[i] != 0 ? support : zeros).push_back(i);
  const int s = static_cast<int>(support.size());
  const double w = 1.0 / binomial(n, 2);

  EvenPolynomial out;
  // Pairs of two zero entries leave the monomial unchanged.
  accumulate(out, a.sorted_descending(), w * binomial(n - s, 2));
  // Pairs with one zero entry: all choices of the zero are permutations of each other.
  if (!zeros.empty())
    for (int i : support)
      add_pair(out, a, i, zeros.front(), w * static_cast<double>(n - s), true);
  for (int x = 0; x < s; ++x)
    for (int y = x + 1; y < s; ++y)
      add_pair(out, a, support[static_cast<std::size_t>(x)], support[static_cast<std::size_t>(y)], w, true);
  return out;
}

// ---------------------------------------------------------------------------
// Sector operators

SectorMatrix build_thermostat(const SectorBasis& basis)
{
  SectorMatrix m = make_matrix(basis, OperatorTag::Thermostat);
  for (int i = 0; i < basis.size(); ++i) {
    double sigma = 0.0;
    for (int e : basis.index(i).entries())
      sigma += 1.0 - hermite_eigenvalue(2 * e);
    m.entries(i, i) = sigma;
  }
  return m;
}

SectorMatrix build_kac(const SectorBasis& basis)
{
  const int n = basis.particles();
  if (n < 2)
    throw DomainError("build_kac: collisions need N >= 2");
  const bool sym = basis.is_symmetric();
  return assemble(basis, OperatorTag::Kac, [&](const MultiIndex& a) {
    EvenPolynomial q = sym ? apply_Q_orbit_sums(a) : apply_Q_monomial(a);
    EvenPolynomial img;
    accumulate(img, sym ? a.sorted_descending() : a, static_cast<double>(n));
    for (const auto& [b, c] : q)
      accumulate(img, b, -static_cast<double>(n) * c);
    return img;
  });
}

SectorMatrix build_radial_projector(const SectorBasis& basis)
{
  // B[H_{2a}] = Gamma(a) sum_b (l! / b!) H_{2b}.
  const bool sym = basis.is_symmetric();
  return assemble(basis, OperatorTag::Projector, [&](const MultiIndex& a) {
    const double gamma = sphere_moment(a);
    EvenPolynomial img;
    for (const auto& b : basis.indices())
      accumulate(img, b, gamma * multinomial(b) * (sym ? b.orbit_size() : 1.0));
    return img;
  });
}

SectorMatrix build_radial(const SectorBasis& basis)
{
  SectorMatrix m = build_radial_projector(basis);
  const double lambda_n = kac_gap(basis.particles());
  const int d = basis.size();
  m.entries = lambda_n * (Eigen::MatrixXd::Identity(d, d) - m.entries);
  m.tag = OperatorTag::Radial;
  return m;
}

SectorMatrix build_generator(const SectorBasis& basis, const Params& params)
{
  params.validate();
  SectorMatrix m = build_thermostat(basis);
  m.entries *= params.mu;
  if (params.lambda != 0.0)
    m.entries += params.lambda * build_kac(basis).entries;
  m.tag = OperatorTag::Full;
  return m;
}

SectorMatrix build_comparison(const SectorBasis& basis, const Params& params)
{
  params.validate();
  SectorMatrix m = build_thermostat(basis);
  m.entries *= params.mu;
  if (params.lambda != 0.0)
    m.entries += params.lambda * build_radial(basis).entries;
  m.tag = OperatorTag::Full;
  return m;
}

Eigen::VectorXd to_orthonormal(const SectorBasis& basis, const EvenPolynomial& poly)
{
  Eigen::VectorXd v = Eigen::VectorXd::Zero(basis.size());
  for (const auto& [a, c] : poly) {
    const auto pos = basis.find(a);
    if (!pos)
      throw DomainError("to_orthonormal: " + a.to_string() + " is not in the sector");
    v(*pos) = c * std::sqrt(basis.norm_squared(*pos));
  }
  return v;
}

// ---------------------------------------------------------------------------
// Gaps

FirstGap first_gap(const Params& params)
{
  params.validate();
  const int n = params.n_particles;
  if (n < 2)
    throw DomainError("first_gap: need N >= 2");
  const bool full = n <= 8;
  auto sector = [&](int l) { return full ? SectorBasis::full(n, l) : SectorBasis::symmetric(n, l); };

  FirstGap out;
  out.value = 0.5 * params.mu;
  out.basis = sector(1);

  EvenPolynomial energy;
  for (const auto& a : out.basis.indices())
    energy[a] = 1.0 / params.beta;
  out.eigenvector = to_orthonormal(out.basis, energy);

  const SectorMatrix l2 = build_generator(out.basis, params);
  const SectorMatrix l4 = build_generator(sector(2), params);
  const double lowest = std::min(l2.smallest_eigenvalue(), l4.smallest_eigenvalue());
  const Eigen::VectorXd residual = l2.entries * out.eigenvector - out.value * out.eigenvector;
  out.eigensolve_error = std::max(std::abs(lowest - out.value), residual.norm() / out.eigenvector.norm());
  if (out.eigensolve_error > kRouteTol)
    throw AssemblyError("first gap: eigensolve disagrees with mu/2 by " + std::to_string(out.eigensolve_error));
  return out;
}

double lower_root(double b, double c)
{
  const double disc = std::max(0.0, b * b - 4.0 * c);
  const double q = 0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0)
    return 0.0;
  return std::min(q, c / q);
}

double second_gap_quadratic(const Params& params)
{
  const double ln = kac_gap(params.n_particles);
  const double lam = params.lambda, mu = params.mu;
  const double b = lam * ln + 13.0 / 8.0 * mu;
  const double c = mu * (lam * ln + 5.0 / 8.0 * mu) - 3.0 / 8.0 * lam * ln * mu * (3.0 / (params.n_particles + 2));
  return lower_root(b, c);
}

Eigen::Matrix2d second_gap_matrix(const Params& params)
{
  const double n = params.n_particles;
  const double lam = params.lambda, mu = params.mu;
  const double off = -std::sqrt(3.0) * lam / (2.0 * std::sqrt(n - 1.0));
  Eigen::Matrix2d m;
  m << mu + 3.0 * lam / (2.0 * (n - 1.0)), off, off, 5.0 * mu / 8.0 + lam / 2.0;
  return m;
}

double second_gap_limit(double lambda, double mu)
{
  return std::min(lambda / 2.0 + 5.0 / 8.0 * mu, mu);
}

SecondGap second_gap(const Params& params)
{
  params.validate();
  if (params.n_particles < 2)
    throw DomainError("second_gap: need N >= 2");
  if (!(params.mu > 0.0))
    throw DomainError("second_gap: need mu > 0");

  SecondGap g;
  g.quadratic = second_gap_quadratic(params);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> two(second_gap_matrix(params), Eigen::EigenvaluesOnly);
  g.matrix = two.eigenvalues()(0);
  g.sector = build_generator(SectorBasis::symmetric(params.n_particles, 2), params).smallest_eigenvalue();
  const double spread = std::max({g.quadratic, g.matrix, g.sector}) - std::min({g.quadratic, g.matrix, g.sector});
  if (spread > kRouteTol)
    throw AssemblyError("second gap routes disagree by " + std::to_string(spread));
  g.value = g.quadratic;
  return g;
}

BranchReport gap_branches(const Params& params)
{
  params.validate();
  const int n = params.n_particles;
  if (n < 2)
    throw DomainError("gap_branches: need N >= 2");
  BranchReport r;
  r.symmetric_l4 = build_generator(SectorBasis::symmetric(n, 2), params).smallest_eigenvalue();

  if (n <= 64) {
    // Non-radial part of L2: drop the radial direction (all-ones) from the spectrum.
    const auto basis = SectorBasis::full(n, 1);
    const SectorMatrix m = build_generator(basis, params);
    const Eigen::VectorXd radial = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
    const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - radial * radial.transpose();
    // Shift the radial direction above the rest of the spectrum.
    const double shift = 2.0 * m.entries.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    const Eigen::MatrixXd deflated = proj * m.entries * proj + shift * radial * radial.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(deflated, Eigen::EigenvaluesOnly);
    r.nonsymmetric_l2 = solver.eigenvalues()(0);
  } else {
    // L2 splits into the radial line and its complement, on which Q acts as
    // a multiple of the identity: L_K = N/(N-1) there.
    r.nonsymmetric_l2 = 0.5 * params.mu + params.lambda * n / (n - 1.0);
  }
  if (n <= 8)
    r.full_l4 = build_generator(SectorBasis::full(n, 2), params).smallest_eigenvalue();
  return r;
}

double sector_gap_bound(int l, const Params& params)
{
  params.validate();
  if (l < 1)
    throw DomainError("sector_gap_bound: need l >= 1");
  const int n = params.n_particles;
  const double s = hermite_eigenvalue(2 * l);
  const double mu = params.mu;
  const double kl = params.lambda * kac_gap(n);
  const double n_gamma = n * sphere_moment(MultiIndex::axis(n, l));
  const double b = kl + (2.0 - s) * mu;
  const double c = (1.0 - s) * mu * mu + kl * mu - kl * mu * s * n_gamma;
  return lower_root(b, c);
}

}  // namespace kaclab

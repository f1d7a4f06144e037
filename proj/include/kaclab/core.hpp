#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace kaclab {

/// Model constants of the thermostatted Kac system.
///
/// `lambda` is the Kac collision rate, `mu` the thermostat rate and `beta`
/// the inverse temperature of the heat bath. Internally the engines work at
/// unit inverse temperature; see `to_internal_velocity`.
struct Params
{
  int n_particles = 1;
  double lambda = 0.0;
  double mu = 0.0;
  double beta = 1.0;

  /// Throws DomainError unless N >= 1, lambda >= 0, mu >= 0, beta > 0.
  void validate() const;

  bool operator==(const Params&) const = default;
};

/// Velocity scaling between user units and the unit-temperature engines.
inline double to_internal_velocity(double v, double beta);
inline double to_user_velocity(double x, double beta);

/// Tuple of nonnegative integers labelling a monomial or Hermite product.
class MultiIndex
{
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);
  MultiIndex(std::initializer_list<int> entries);

  /// The index (l, 0, ..., 0) of length n.
  static MultiIndex axis(int n, int l);

  int size() const { return static_cast<int>(entries_.size()); }
  int weight() const;
  int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& entries() const { return entries_; }

  /// Number of nonzero entries.
  int support() const;

  /// Entries sorted in descending order (the partition labelling the
  /// permutation orbit of this index).
  MultiIndex sorted_descending() const;

  /// Number of distinct permutations of the entries.
  double orbit_size() const;

  std::string to_string() const;

  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

 private:
  std::vector<int> entries_;
};

/// All indices of length `parts` summing to `total`, in lexicographically
/// descending order.
std::vector<MultiIndex> weak_compositions(int total, int parts);

/// Partitions of `total` into at most `max_parts` positive parts, each padded
/// with zeros to length `max_parts`, in lexicographically descending order.
std::vector<MultiIndex> partitions(int total, int max_parts);

/// l! / (a_1! ... a_N!) with l = |a|.
double multinomial(const MultiIndex& a);

/// Eigenvalue of the one-particle thermostat average on the Hermite
/// polynomial of the given degree: the mean of cos^degree over a period.
/// Zero for odd degree.
double hermite_eigenvalue(int degree);

/// Mean over one period of cos^p(theta) sin^q(theta).
double angular_moment(int p, int q);

/// Gap of the pure collision operator N(I-Q) off the radial functions:
/// (N+2) / (2(N-1)). Requires N >= 2.
double kac_gap(int n);

/// Moment of v_1^{2a_1} ... v_N^{2a_N} under the normalized surface measure
/// of the unit sphere in R^N, N = a.size().
double sphere_moment(const MultiIndex& a);

/// Moment E[x^k] of the standard normal distribution.
double gaussian_moment(int k);

namespace detail {

/// Small exact rational used for the factorial-type formulas. Arithmetic
/// reports overflow instead of wrapping.
struct Rational
{
  std::int64_t num = 0;
  std::int64_t den = 1;

  /// Multiplies by a/b in place. Returns false (leaving *this unspecified)
  /// on 64-bit overflow.
  bool scale(std::int64_t a, std::int64_t b);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

}  // namespace detail

inline double to_internal_velocity(double v, double beta) { return v * std::sqrt(beta); }
inline double to_user_velocity(double x, double beta) { return x / std::sqrt(beta); }

}  // namespace kaclab

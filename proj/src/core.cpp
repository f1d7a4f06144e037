#include "kaclab/core.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "kaclab/errors.hpp"

namespace kaclab {

void Params::validate() const
{
  if (n_particles < 1)
    throw DomainError("n_particles must be >= 1, got " + std::to_string(n_particles));
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw DomainError("lambda must be finite and >= 0");
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw DomainError("mu must be finite and >= 0");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("beta must be finite and > 0");
}

MultiIndex::MultiIndex(std::vector<int> entries)
    : entries_(std::move(entries))
{
  for (int e : entries_)
    if (e < 0)
      throw DomainError("multi-index entries must be nonnegative");
}

MultiIndex::MultiIndex(std::initializer_list<int> entries)
    : MultiIndex(std::vector<int>(entries))
{
}

MultiIndex MultiIndex::axis(int n, int l)
{
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  if (n > 0)
    e[0] = l;
  return MultiIndex(std::move(e));
}

int MultiIndex::weight() const
{
  return std::accumulate(entries_.begin(), entries_.end(), 0);
}

int MultiIndex::support() const
{
  return static_cast<int>(std::count_if(entries_.begin(), entries_.end(), [](int e) { return e != 0; }));
}

MultiIndex MultiIndex::sorted_descending() const
{
  auto e = entries_;
  std::sort(e.begin(), e.end(), std::greater<>());
  MultiIndex out;
  out.entries_ = std::move(e);
  return out;
}

double MultiIndex::orbit_size() const
{
  // n! / (z! prod_v c_v!) where z counts zeros and c_v counts the nonzero value v.
  std::map<int, int> counts;
  int p = 0;
  for (int e : entries_) {
    if (e != 0) {
      ++counts[e];
      ++p;
    }
  }
  const int n = size();
  double result = 1.0;
  for (int i = 0; i < p; ++i)
    result *= static_cast<double>(n - i);
  for (const auto& [value, c] : counts)
    for (int k = 2; k <= c; ++k)
      result /= static_cast<double>(k);
  return result;
}

std::string MultiIndex::to_string() const
{
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < entries_.size(); ++i)
    os << (i ? "," : "") << entries_[i];
  os << ')';
  return os.str();
}

namespace {

void compositions_rec(int remaining, int pos, std::vector<int>& cur, std::vector<MultiIndex>& out)
{
  const int parts = static_cast<int>(cur.size());
  if (pos == parts - 1) {
    cur[static_cast<std::size_t>(pos)] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[static_cast<std::size_t>(pos)] = v;
    compositions_rec(remaining - v, pos + 1, cur, out);
  }
}

void partitions_rec(int remaining, int bound, int pos, std::vector<int>& cur, std::vector<MultiIndex>& out)
{
  if (remaining == 0) {
    std::fill(cur.begin() + pos, cur.end(), 0);
    out.emplace_back(cur);
    return;
  }
  if (pos == static_cast<int>(cur.size()))
    return;
  for (int v = std::min(remaining, bound); v >= 1; --v) {
    cur[static_cast<std::size_t>(pos)] = v;
    partitions_rec(remaining - v, v, pos + 1, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> weak_compositions(int total, int parts)
{
  if (total < 0 || parts < 1)
    throw DomainError("weak_compositions: need total >= 0 and parts >= 1");
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(parts), 0);
  compositions_rec(total, 0, cur, out);
  return out;
}

std::vector<MultiIndex> partitions(int total, int max_parts)
{
  if (total < 0 || max_parts < 1)
    throw DomainError("partitions: need total >= 0 and max_parts >= 1");
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(max_parts), 0);
  partitions_rec(total, total, 0, cur, out);
  return out;
}

double multinomial(const MultiIndex& a)
{
  // Built incrementally as a product of binomials to stay exact while small.
  double result = 1.0;
  int acc = 0;
  for (int e : a.entries()) {
    for (int k = 1; k <= e; ++k)
      result = result * static_cast<double>(acc + k) / static_cast<double>(k);
    acc += e;
  }
  return result;
}

namespace detail {

bool Rational::scale(std::int64_t a, std::int64_t b)
{
  // Cross-reduce before multiplying to keep the operands small.
  std::int64_t g1 = std::gcd(a, den);
  std::int64_t g2 = std::gcd(num, b);
  if (g1 == 0)
    g1 = 1;
  if (g2 == 0)
    g2 = 1;
  std::int64_t n = 0, d = 0;
  if (__builtin_mul_overflow(num / g2, a / g1, &n))
    return false;
  if (__builtin_mul_overflow(den / g1, b / g2, &d))
    return false;
  num = n;
  den = d;
  return true;
}

}  // namespace detail

namespace {

/// Product of factors a_i / b_i, exact while it fits in 64 bits.
template <class Factors>
double exact_product(const Factors& factors)
{
  detail::Rational r{1, 1};
  std::size_t i = 0;
  for (; i < factors.size(); ++i)
    if (!r.scale(factors[i].first, factors[i].second))
      break;
  if (i == factors.size())
    return r.value();
  double value = 1.0;
  for (const auto& [a, b] : factors)
    value *= static_cast<double>(a) / static_cast<double>(b);
  return value;
}

using FactorList = std::vector<std::pair<std::int64_t, std::int64_t>>;

}  // namespace

double hermite_eigenvalue(int degree)
{
  if (degree < 0)
    throw DomainError("hermite_eigenvalue: degree must be >= 0");
  if (degree % 2 != 0)
    return 0.0;
  FactorList f;
  for (int i = 1; i <= degree / 2; ++i)
    f.emplace_back(2 * i - 1, 2 * i);
  return exact_product(f);
}

double angular_moment(int p, int q)
{
  if (p < 0 || q < 0)
    throw DomainError("angular_moment: exponents must be >= 0");
  if (p % 2 != 0 || q % 2 != 0)
    return 0.0;
  // (p-1)!!(q-1)!!/(p+q)!! = [(p-1)!!/p!!] * prod_{i<=q/2} (2i-1)/(p+2i)
  FactorList f;
  for (int i = 1; i <= p / 2; ++i)
    f.emplace_back(2 * i - 1, 2 * i);
  for (int i = 1; i <= q / 2; ++i)
    f.emplace_back(2 * i - 1, p + 2 * i);
  return exact_product(f);
}

double kac_gap(int n)
{
  if (n < 2)
    throw DomainError("kac_gap: pair collisions need N >= 2");
  return 0.5 * static_cast<double>(n + 2) / static_cast<double>(n - 1);
}

double sphere_moment(const MultiIndex& a)
{
  const int n = a.size();
  if (n < 1)
    throw DomainError("sphere_moment: empty multi-index");
  // prod_i (2a_i - 1)!! / [N (N+2) ... (N + 2|a| - 2)], factors interleaved.
  std::vector<std::int64_t> numer;
  for (int e : a.entries())
    for (int k = 1; k <= e; ++k)
      numer.push_back(2 * k - 1);
  FactorList f;
  for (std::size_t k = 0; k < numer.size(); ++k)
    f.emplace_back(numer[k], n + 2 * static_cast<std::int64_t>(k));
  return exact_product(f);
}

double gaussian_moment(int k)
{
  if (k < 0)
    throw DomainError("gaussian_moment: order must be >= 0");
  if (k % 2 != 0)
    return 0.0;
  double m = 1.0;
  for (int j = k - 1; j > 0; j -= 2)
    m *= j;
  return m;
}

}  // namespace kaclab

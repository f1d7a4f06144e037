#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kaclab/core.hpp"

namespace kaclab {

/// Homogeneous even polynomial: half-exponent multi-index a -> coefficient
/// of v_1^{2a_1} ... v_N^{2a_N}. By the triangularity of the Hermite basis
/// the same coefficients describe the action on H_{2a_1}(v_1)...H_{2a_N}(v_N).
using EvenPolynomial = std::map<MultiIndex, double>;

/// Basis of the even Hermite sector of total degree 2l in N variables.
///
/// The full basis is every H_{2a} with |a| = l (weak compositions). The
/// symmetric basis holds one permutation-symmetrized function per partition
/// of l, the orbit sum of H_{2a}. Indices always have length N; partitions
/// are zero-padded.
class SectorBasis
{
 public:
  static SectorBasis full(int n, int l);
  static SectorBasis symmetric(int n, int l);

  int particles() const { return n_; }
  int half_degree() const { return l_; }
  int degree() const { return 2 * l_; }
  bool is_symmetric() const { return symmetric_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& index(int i) const { return indices_[static_cast<std::size_t>(i)]; }

  /// Position of a (or of its sorted form, in the symmetric basis).
  std::optional<int> find(const MultiIndex& a) const;

  /// Squared L^2(gamma) norm of basis function i (monic Hermite convention).
  double norm_squared(int i) const;

 private:
  SectorBasis(int n, int l, bool symmetric, std::vector<MultiIndex> indices);

  int n_ = 0;
  int l_ = 0;
  bool symmetric_ = false;
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, int> position_;
};

enum class OperatorTag
{
  Thermostat,  // sum_j (I - T_j)
  Kac,         // N (I - Q)
  Radial,      // Lambda_N (I - B)
  Projector,   // B, orthogonal projection on radial functions
  Full         // any linear combination
};

std::string to_string(OperatorTag tag);

/// Generator restricted to a sector, expressed in the orthonormalized basis
/// (basis function divided by its norm), so self-adjoint operators come out
/// as symmetric matrices.
struct SectorMatrix
{
  SectorBasis basis;
  Eigen::MatrixXd entries;
  OperatorTag tag = OperatorTag::Full;

  /// max |A - A^T|.
  double asymmetry() const;
  /// Ascending eigenvalues. Throws AssemblyError if the matrix is not
  /// symmetric to 1e-12 (relative to its largest entry).
  Eigen::VectorXd eigenvalues() const;
  double smallest_eigenvalue() const;
};

/// Q applied to the monomial v^{2a} (a = half exponents), N = a.size() >= 2.
EvenPolynomial apply_Q_monomial(const MultiIndex& half_exponents);

/// Same, for a monomial given by full exponents; rejects odd exponents
/// with DomainError since only even sectors are assembled.
EvenPolynomial apply_Q_exponents(const MultiIndex& exponents);

/// Q applied to a polynomial, term by term.
EvenPolynomial apply_Q(const EvenPolynomial& p);

/// N (I - Q) applied to a polynomial.
EvenPolynomial apply_kac(const EvenPolynomial& p);

/// Coefficients of Q[v^{2a}] summed over each permutation orbit, keyed by the
/// descending partition. Cost is independent of N beyond the support of a.
EvenPolynomial apply_Q_orbit_sums(const MultiIndex& half_exponents);

SectorMatrix build_thermostat(const SectorBasis& basis);
SectorMatrix build_kac(const SectorBasis& basis);
SectorMatrix build_radial_projector(const SectorBasis& basis);
SectorMatrix build_radial(const SectorBasis& basis);

/// mu L_T + lambda L_K.
SectorMatrix build_generator(const SectorBasis& basis, const Params& params);
/// mu L_T + lambda L_R, the comparison operator with the projection bound.
SectorMatrix build_comparison(const SectorBasis& basis, const Params& params);

/// Coefficient vector (orthonormal basis of `basis`) of the function given by
/// monic-Hermite coefficients `poly`; in the symmetric basis `poly` must be
/// permutation invariant and is keyed by partitions.
Eigen::VectorXd to_orthonormal(const SectorBasis& basis, const EvenPolynomial& poly);

struct FirstGap
{
  double value = 0.0;
  /// Largest eigensolver deviation from the closed form over L2 + L4.
  double eigensolve_error = 0.0;
  /// Basis of the degree-2 sector holding the eigenfunction.
  SectorBasis basis = SectorBasis::symmetric(2, 1);
  /// Orthonormal coefficients of sum_i (v_i^2 - 1/beta) in `basis`, with the
  /// velocities in internal units.
  Eigen::VectorXd eigenvector;
};

/// mu/2 with eigenfunction sum_i (v_i^2 - 1/beta), cross-checked against an
/// eigensolve of mu L_T + lambda L_K on L2 + L4 (full basis for N <= 8,
/// symmetric otherwise). Throws AssemblyError on disagreement beyond 1e-10.
FirstGap first_gap(const Params& params);

struct SecondGap
{
  double quadratic = 0.0;
  double matrix = 0.0;
  double sector = 0.0;
  double value = 0.0;
};

/// Lower root of the closed-form quadratic.
double second_gap_quadratic(const Params& params);
/// The 2x2 symmetric-sector matrix in the basis
/// {normalized sum_{i!=j} H2 H2, normalized sum H4}.
Eigen::Matrix2d second_gap_matrix(const Params& params);
/// N -> infinity limit min{lambda/2 + 5mu/8, mu}.
double second_gap_limit(double lambda, double mu);

/// Three routes (quadratic, 2x2 matrix, assembled symmetric L4 sector);
/// throws AssemblyError if they disagree beyond 1e-10. Requires N >= 2, mu > 0.
SecondGap second_gap(const Params& params);

/// Lowest eigenvalues of the branches the symmetric theory does not cover:
/// the non-radial part of L2 (always available) and the whole L4 sector
/// (full basis, N <= 8 only).
struct BranchReport
{
  double symmetric_l4 = 0.0;
  double nonsymmetric_l2 = 0.0;
  std::optional<double> full_l4;
};
BranchReport gap_branches(const Params& params);

/// Lower root x_l of the bound quadratic for sector L_{2l}; the smallest
/// eigenvalue of mu L_T + lambda L_R there is at least x_l.
double sector_gap_bound(int l, const Params& params);

/// Lower root of x^2 - b x + c = 0 (real roots assumed), computed stably.
double lower_root(double b, double c);

}  // namespace kaclab

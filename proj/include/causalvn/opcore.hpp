#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "causalvn/errors.hpp"

namespace causalvn {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

// Numerical thresholds shared by every module. The exact conditions of the
// theory (vanishing commutators, subspace membership) are decided against
// these. All defaults are relative to the size of the operands involved.
struct Tolerances {
  // Singular value sigma counts as nonzero iff sigma > rank * sigma_max.
  double rank = 1e-9;
  // ||[a,b]||_F <= comm * max(1, ||a||_F ||b||_F) means "commutes".
  double comm = 1e-9;
  // ||m - proj(m)||_F <= contain * max(1, ||m||_F) means "in the subspace".
  double contain = 1e-8;
  // ||U^dag U - I||_F bound for accepting a unitary.
  double unitarity = 1e-8;
  // Eigenvalue gap separating spectral projections of a unit-norm element.
  double eig_gap = 1e-6;
  // Residual above which an algebra certification or decomposition fails.
  double certify = 1e-7;
};

// One tensor factor of a Hilbert space.
struct Factor {
  std::string label;
  std::size_t dim = 1;

  bool operator==(const Factor&) const = default;
};

// Ordered tensor factorization H = H_1 (x) H_2 (x) ... with unique labels.
// Index convention: the first factor is the most significant digit.
class Factorization {
 public:
  Factorization() = default;
  explicit Factorization(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  std::size_t total_dim() const;
  bool contains(std::string_view label) const;
  std::size_t index_of(std::string_view label) const;
  std::size_t dim_of(std::string_view label) const;
  std::size_t dim_of(std::span<const std::string> labels) const;
  std::vector<std::string> labels() const;

  // The named labels, validated and sorted into this factorization's order.
  std::vector<std::string> canonical(std::span<const std::string> labels) const;
  std::vector<std::string> complement(std::span<const std::string> labels) const;
  // Sub-factorization on the named labels, in this factorization's order.
  Factorization restrict_to(std::span<const std::string> labels) const;

  bool operator==(const Factorization&) const = default;

 private:
  std::vector<Factor> factors_;
};

// Linear subspace of operators on C^dim_h, stored as a Hilbert-Schmidt
// orthonormal basis. The basis is a function of the subspace alone: it is
// produced by Gram-Schmidt on the projections of the matrix units E_ij taken
// in row-major order, so equal subspaces always carry the same basis.
class OperatorSubspace {
 public:
  explicit OperatorSubspace(std::size_t dim_h = 1);

  // `columns` must have orthonormal columns of length dim_h^2 (column-major
  // vectorized operators). The basis is re-canonicalized.
  static OperatorSubspace from_orthonormal_columns(std::size_t dim_h,
                                                   const Eigen::MatrixXcd& columns);

  std::size_t dim_h() const { return dim_h_; }
  // Complex dimension.
  std::size_t dim() const { return basis_.size(); }
  bool empty() const { return basis_.empty(); }
  const std::vector<ComplexMatrix>& basis() const { return basis_; }
  // dim_h^2 x dim() matrix whose columns are the vectorized basis elements.
  const Eigen::MatrixXcd& columns() const { return columns_; }

  // Orthogonal projection onto the subspace.
  ComplexMatrix project(const ComplexMatrix& m) const;

 private:
  std::size_t dim_h_;
  std::vector<ComplexMatrix> basis_;
  Eigen::MatrixXcd columns_;
};

ComplexMatrix identity(std::size_t d);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
double frobenius(const ComplexMatrix& a);
bool is_square(const ComplexMatrix& a);
bool is_finite(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, const Tolerances& tol = {});

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

// ||[a,b]||_F and the zero-commutator decision.
double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b);
double commutator_threshold(const ComplexMatrix& a, const ComplexMatrix& b,
                            const Tolerances& tol = {});
bool commutes(const ComplexMatrix& a, const ComplexMatrix& b, const Tolerances& tol = {});

// perm[new_index] = old_index when the factors are reordered to `order`
// (which must list every label exactly once).
std::vector<std::size_t> factor_permutation(const Factorization& fact,
                                            std::span<const std::string> order);
// Re-expresses `op` (given in fact's order) in the factor order `order`.
ComplexMatrix reorder_factors(const ComplexMatrix& op, const Factorization& fact,
                              std::span<const std::string> order);

// Operator acting as `op` on the named factors (taken in fact's order) and as
// the identity elsewhere.
ComplexMatrix tensor_embed(const ComplexMatrix& op, const Factorization& fact,
                           std::span<const std::string> on_labels);
// Like tensor_embed, but `op` is given in the factor order listed in `wires`
// (which need not follow fact's order).
ComplexMatrix embed_on_wires(const ComplexMatrix& op, const Factorization& fact,
                             std::span<const std::string> wires);
// Partial trace onto the named factors (result in fact's order).
ComplexMatrix partial_trace(const ComplexMatrix& op, const Factorization& fact,
                            std::span<const std::string> keep_labels);
// Left inverse of tensor_embed: Tr_rest(op) / dim(rest).
ComplexMatrix unembed(const ComplexMatrix& op, const Factorization& fact,
                      std::span<const std::string> keep_labels);

double unitarity_residual(const ComplexMatrix& u);
void require_unitary(const ComplexMatrix& u, const Tolerances& tol = {});

// U^dag N U, the Heisenberg-picture preimage of N under U(.)U^dag.
ComplexMatrix heisenberg_pullback(const ComplexMatrix& u, const ComplexMatrix& n,
                                  const Tolerances& tol = {});

// Orthonormal basis of the columns' null space: right singular vectors whose
// singular value is <= cutoff.
Eigen::MatrixXcd nullspace(const Eigen::MatrixXcd& m, double cutoff);

OperatorSubspace orthonormalize(std::span<const ComplexMatrix> mats,
                                const Tolerances& tol = {});
OperatorSubspace intersect_subspaces(const OperatorSubspace& v, const OperatorSubspace& w,
                                     const Tolerances& tol = {});

double projection_residual(const OperatorSubspace& v, const ComplexMatrix& m);
bool subspace_contains(const OperatorSubspace& v, const ComplexMatrix& m,
                       const Tolerances& tol = {});
// Largest projection residual of a basis element of `inner` against `outer`;
// small iff inner is contained in outer.
double containment_residual(const OperatorSubspace& outer, const OperatorSubspace& inner);
double mutual_residual(const OperatorSubspace& v, const OperatorSubspace& w);
bool subspace_equal(const OperatorSubspace& v, const OperatorSubspace& w,
                    const Tolerances& tol = {});

bool is_star_closed(const OperatorSubspace& v, const Tolerances& tol = {});

// Hermitian basis of an adjoint-closed subspace: Hilbert-Schmidt orthonormal,
// real span Herm(v), complex span v, size dim(v).
std::vector<ComplexMatrix> hermitian_basis(const OperatorSubspace& v,
                                           const Tolerances& tol = {});

// Orthonormal Hermitian basis of all operators on C^d: diagonal units, then
// symmetric and antisymmetric off-diagonal pairs in row-major order.
std::vector<ComplexMatrix> hermitian_unit_basis(std::size_t d);
// Matrix units E_ij in row-major order.
std::vector<ComplexMatrix> matrix_units(std::size_t d);

}  // namespace causalvn

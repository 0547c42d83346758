#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "causalvn/opcore.hpp"

namespace causalvn {

// Residuals of the three closure conditions that, in finite dimension,
// characterize a von Neumann algebra.
struct ClosureResiduals {
  double identity = 0.0;  // projection residual of I
  double adjoint = 0.0;   // worst projection residual of b_i^dag
  double product = 0.0;   // worst projection residual of b_i b_j

  double worst() const;
};

ClosureResiduals closure_residuals(const OperatorSubspace& s);

// An operator subspace certified to contain I and to be closed under adjoints
// and products.
class VnAlgebra {
 public:
  // Throws CertificationError if any closure residual exceeds tol.certify.
  static VnAlgebra certify(OperatorSubspace space, const Tolerances& tol = {});

  static VnAlgebra scalars(std::size_t dim_h);
  static VnAlgebra full(std::size_t dim_h);

  const OperatorSubspace& space() const { return space_; }
  std::size_t dim_h() const { return space_.dim_h(); }
  std::size_t dim() const { return space_.dim(); }
  const ClosureResiduals& residuals() const { return residuals_; }

 private:
  VnAlgebra(OperatorSubspace space, ClosureResiduals r)
      : space_(std::move(space)), residuals_(r) {}

  OperatorSubspace space_;
  ClosureResiduals residuals_;
};

// Smallest algebra containing `gens`; dim_h fixes the space when gens is empty.
VnAlgebra generate(std::span<const ComplexMatrix> gens, std::size_t dim_h,
                   const Tolerances& tol = {});

// {X : [X, b] = 0 for every b in s}. Requires s to be adjoint-closed.
VnAlgebra commutant(const OperatorSubspace& s, const Tolerances& tol = {});
VnAlgebra double_commutant(const OperatorSubspace& s, const Tolerances& tol = {});
VnAlgebra intersect_algebras(const VnAlgebra& a, const VnAlgebra& b, const Tolerances& tol = {});
VnAlgebra center(const VnAlgebra& a, const Tolerances& tol = {});

double max_commutator_norm(const VnAlgebra& a);
bool is_commutative(const VnAlgebra& a, const Tolerances& tol = {});

bool algebra_equal(const VnAlgebra& a, const VnAlgebra& b, const Tolerances& tol = {});

// Sub-algebra on the named factors: {X : X (x) I_rest in a}, expressed on the
// named factors. `a` must act on fact's full space.
VnAlgebra restrict_to_factors(const VnAlgebra& a, const Factorization& fact,
                              std::span<const std::string> labels, const Tolerances& tol = {});
// {X (x) I_rest : X in a}, where `a` acts on the named factors.
VnAlgebra embed_algebra(const VnAlgebra& a, const Factorization& fact,
                        std::span<const std::string> labels, const Tolerances& tol = {});

struct Block {
  ComplexMatrix projection;  // minimal central projection
  std::size_t d_left = 1;    // multiplicity
  std::size_t d_right = 1;   // size of the full matrix algebra factor
};

// a = W^dag ( (+)_i I_{d_left^i} (x) B(C^{d_right^i}) ) W.
struct BlockStructure {
  std::vector<Block> blocks;
  ComplexMatrix w;
  std::uint64_t seed = 0;     // seed of the successful draw
  int attempts = 0;
  double residual = 0.0;      // reconstruction residual
};

// Basis (matrix units) of (+)_i I_{d_left^i} (x) B(C^{d_right^i}) in the block
// basis, blocks laid out in the given order.
std::vector<ComplexMatrix> block_algebra_basis(std::span<const Block> blocks);

// Decomposition into minimal central blocks with matrix units. Randomness
// (generic elements of the center and of each block) is drawn from `seed`,
// then `seed + 1`, ... for up to five certification attempts.
BlockStructure block_structure(const VnAlgebra& a, std::uint64_t seed = 0,
                               const Tolerances& tol = {});

// Residual of the reconstruction W^dag (block algebra) W == a.space.
double reconstruction_residual(const VnAlgebra& a, const BlockStructure& bs);

}  // namespace causalvn

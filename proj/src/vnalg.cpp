#include "causalvn/vnalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "causalvn/random.hpp"

namespace causalvn {

namespace {

constexpr int kMaxDecompositionAttempts = 5;

Eigen::VectorXcd vec(const ComplexMatrix& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

ComplexMatrix unvec(const Eigen::VectorXcd& v, Eigen::Index d) {
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

// Residual of projecting m onto span(q) for orthonormal q.
double residual_against(const Eigen::MatrixXcd& q, const ComplexMatrix& m) {
  Eigen::VectorXcd v = vec(m);
  if (q.cols() == 0) return v.norm();
  return (v - q * (q.adjoint() * v)).norm();
}

// Eigen-decomposition of a Hermitian matrix normalized to unit operator norm,
// grouped into clusters of (nearly) equal eigenvalues.
struct SpectralGroups {
  Eigen::MatrixXcd vectors;                          // columns in ascending eigenvalue order
  std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;  // (first column, size)
};

SpectralGroups spectral_groups(const ComplexMatrix& h, double gap) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
  SpectralGroups out;
  out.vectors = es.eigenvectors();
  Eigen::VectorXd ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  if (scale > 0.0) ev /= scale;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= ev.size(); ++i) {
    if (i == ev.size() || ev(i) - ev(i - 1) > gap) {
      out.groups.emplace_back(start, i - start);
      start = i;
    }
  }
  return out;
}

ComplexMatrix random_real_combination(std::span<const ComplexMatrix> basis, Rng& rng) {
  ComplexMatrix out = ComplexMatrix::Zero(basis.front().rows(), basis.front().cols());
  for (const auto& b : basis) out += rng.uniform(-1.0, 1.0) * b;
  return out;
}

ComplexMatrix random_complex_combination(std::span<const ComplexMatrix> basis, Rng& rng) {
  ComplexMatrix out = ComplexMatrix::Zero(basis.front().rows(), basis.front().cols());
  for (const auto& b : basis) out += Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)) * b;
  return out;
}

// Orthonormal basis of range(p) built by Gram-Schmidt over p e_0, p e_1, ...
Eigen::MatrixXcd canonical_range_basis(const ComplexMatrix& p, Eigen::Index rank) {
  const Eigen::Index d = p.rows();
  Eigen::MatrixXcd q(d, rank);
  Eigen::Index count = 0;
  for (Eigen::Index j = 0; j < d && count < rank; ++j) {
    Eigen::VectorXcd r = p.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      if (count > 0) r -= q.leftCols(count) * (q.leftCols(count).adjoint() * r);
    }
    const double nr = r.norm();
    if (nr > 1e-6) q.col(count++) = r / nr;
  }
  return q.leftCols(count);
}

struct RawBlock {
  Block block;
  Eigen::MatrixXcd vectors;  // d x (d_left * d_right), column l*d_right + k
};

// Sort key: (d_left, d_right, first significant diagonal index of the
// projection, then the diagonal itself).
bool block_before(const RawBlock& x, const RawBlock& y) {
  const auto& a = x.block;
  const auto& b = y.block;
  if (a.d_left != b.d_left) return a.d_left < b.d_left;
  if (a.d_right != b.d_right) return a.d_right < b.d_right;
  auto first = [](const ComplexMatrix& p) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      if (p(i, i).real() > 1e-6) return i;
    }
    return p.rows();
  };
  const auto fa = first(a.projection);
  const auto fb = first(b.projection);
  if (fa != fb) return fa < fb;
  for (Eigen::Index i = 0; i < a.projection.rows(); ++i) {
    const double da = a.projection(i, i).real();
    const double db = b.projection(i, i).real();
    if (std::abs(da - db) > 1e-9) return da > db;
  }
  return false;
}

std::string describe(const std::vector<Block>& blocks) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    os << (i ? ", " : "") << "(" << blocks[i].d_left << "," << blocks[i].d_right << ")";
  }
  os << "]";
  return os.str();
}

// One attempt of the generic-element decomposition. Returns an empty optional
// with a reason on failure.
std::optional<BlockStructure> try_decompose(const VnAlgebra& a, const VnAlgebra& z,
                                            const std::vector<ComplexMatrix>& herm_a,
                                            const std::vector<ComplexMatrix>& herm_z,
                                            std::uint64_t seed, const Tolerances& tol,
                                            std::string& why) {
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(a.dim_h());

  const ComplexMatrix central = random_real_combination(herm_z, rng);
  const SpectralGroups cg = spectral_groups(central, tol.eig_gap);
  if (cg.groups.size() != z.dim()) {
    why = "generic central element split into " + std::to_string(cg.groups.size()) +
          " eigenspaces, center has dimension " + std::to_string(z.dim());
    return std::nullopt;
  }

  const ComplexMatrix generic_h = random_real_combination(herm_a, rng);
  const ComplexMatrix generic_g = random_complex_combination(herm_a, rng);

  std::vector<RawBlock> raw;
  for (const auto& [first, size] : cg.groups) {
    const Eigen::MatrixXcd iso = cg.vectors.middleCols(first, size);  // d x m
    RawBlock rb;
    rb.block.projection = iso * iso.adjoint();
    const Eigen::Index m = size;

    const SpectralGroups bg = spectral_groups(iso.adjoint() * generic_h * iso, tol.eig_gap);
    const auto d_right = static_cast<Eigen::Index>(bg.groups.size());
    if (m % d_right != 0) {
      why = "block of rank " + std::to_string(m) + " has " + std::to_string(d_right) +
            " spectral groups";
      return std::nullopt;
    }
    const Eigen::Index d_left = m / d_right;
    for (const auto& g : bg.groups) {
      if (g.second != d_left) {
        why = "unequal spectral multiplicities inside a central block";
        return std::nullopt;
      }
    }
    rb.block.d_left = static_cast<std::size_t>(d_left);
    rb.block.d_right = static_cast<std::size_t>(d_right);

    if (d_left == 1) {
      // The block is all of B(range p); any orthonormal basis of the range works.
      rb.vectors = canonical_range_basis(rb.block.projection, m);
      if (rb.vectors.cols() != m) {
        why = "could not span the range of a central projection";
        return std::nullopt;
      }
    } else {
      // F_k: orthonormal basis of the k-th minimal projection. The polar part
      // of F_k^dag g F_0 is the matrix unit E_k0 up to a phase.
      std::vector<Eigen::MatrixXcd> f;
      for (const auto& g : bg.groups) f.push_back(iso * bg.vectors.middleCols(g.first, g.second));
      rb.vectors.resize(d, m);
      for (Eigen::Index k = 0; k < d_right; ++k) {
        Eigen::MatrixXcd fk = f[static_cast<std::size_t>(k)];
        if (k > 0) {
          const Eigen::MatrixXcd x = fk.adjoint() * generic_g * f[0];
          Eigen::JacobiSVD<Eigen::MatrixXcd> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
          const auto& sv = svd.singularValues();
          if (sv(sv.size() - 1) <= 1e-6 * std::max(1.0, sv(0))) {
            why = "generic element does not connect minimal projections";
            return std::nullopt;
          }
          fk = fk * (svd.matrixU() * svd.matrixV().adjoint());
        }
        for (Eigen::Index l = 0; l < d_left; ++l) rb.vectors.col(l * d_right + k) = fk.col(l);
      }
    }
    raw.push_back(std::move(rb));
  }

  std::stable_sort(raw.begin(), raw.end(), block_before);

  BlockStructure bs;
  bs.seed = seed;
  bs.w.resize(d, d);
  Eigen::Index row = 0;
  for (auto& rb : raw) {
    for (Eigen::Index c = 0; c < rb.vectors.cols(); ++c) bs.w.row(row++) = rb.vectors.col(c).adjoint();
    bs.blocks.push_back(std::move(rb.block));
  }
  if (row != d) {
    why = "block dimensions do not add up to the space dimension";
    return std::nullopt;
  }
  const double wres = unitarity_residual(bs.w);
  if (!(wres <= tol.unitarity)) {
    why = "change of basis is not unitary (residual " + std::to_string(wres) + ")";
    return std::nullopt;
  }
  bs.residual = reconstruction_residual(a, bs);
  if (!(bs.residual <= tol.certify)) {
    why = "reconstruction residual " + std::to_string(bs.residual) + " for blocks " +
          describe(bs.blocks);
    return std::nullopt;
  }
  return bs;
}

}  // namespace

// ---------------------------------------------------------------------------

double ClosureResiduals::worst() const { return std::max({identity, adjoint, product}); }

ClosureResiduals closure_residuals(const OperatorSubspace& s) {
  ClosureResiduals r;
  const auto d = static_cast<Eigen::Index>(s.dim_h());
  const Eigen::MatrixXcd& q = s.columns();
  r.identity = residual_against(q, ComplexMatrix::Identity(d, d));
  if (s.dim() == s.dim_h() * s.dim_h()) return r;  // the whole of B(H)
  for (const auto& b : s.basis()) r.adjoint = std::max(r.adjoint, residual_against(q, b.adjoint()));
  for (const auto& x : s.basis()) {
    for (const auto& y : s.basis()) {
      r.product = std::max(r.product, residual_against(q, x * y));
    }
  }
  return r;
}

VnAlgebra VnAlgebra::certify(OperatorSubspace space, const Tolerances& tol) {
  const ClosureResiduals r = closure_residuals(space);
  if (!(r.worst() <= tol.certify)) {
    std::ostringstream os;
    os << "subspace of dimension " << space.dim() << " is not a von Neumann algebra: "
       << "identity residual " << r.identity << ", adjoint residual " << r.adjoint
       << ", product residual " << r.product;
    throw CertificationError(os.str());
  }
  return VnAlgebra(std::move(space), r);
}

VnAlgebra VnAlgebra::scalars(std::size_t dim_h) {
  const ComplexMatrix i = identity(dim_h);
  return certify(orthonormalize(std::span(&i, 1)));
}

VnAlgebra VnAlgebra::full(std::size_t dim_h) {
  const auto units = matrix_units(dim_h);
  return certify(orthonormalize(units));
}

VnAlgebra generate(std::span<const ComplexMatrix> gens, std::size_t dim_h, const Tolerances& tol) {
  std::vector<ComplexMatrix> letters;
  for (const auto& g : gens) {
    if (!is_square(g) || static_cast<std::size_t>(g.rows()) != dim_h) {
      throw DimensionError("generate: generator is " + std::to_string(g.rows()) + "x" +
                           std::to_string(g.cols()) + ", expected " + std::to_string(dim_h) +
                           "x" + std::to_string(dim_h));
    }
    letters.push_back(g);
    letters.push_back(g.adjoint());
  }
  std::vector<ComplexMatrix> seed = letters;
  seed.push_back(identity(dim_h));
  OperatorSubspace span = orthonormalize(seed, tol);
  // Words in the letters: V <- V + letters * V until the dimension settles.
  // The dimension strictly grows each round, so dim_h^2 rounds always suffice.
  for (std::size_t round = 0; round < dim_h * dim_h && !letters.empty(); ++round) {
    std::vector<ComplexMatrix> next = span.basis();
    for (const auto& g : letters) {
      for (const auto& v : span.basis()) next.push_back(g * v);
    }
    OperatorSubspace grown = orthonormalize(next, tol);
    const bool settled = grown.dim() == span.dim();
    span = std::move(grown);
    if (settled) break;
  }
  return VnAlgebra::certify(std::move(span), tol);
}

VnAlgebra commutant(const OperatorSubspace& s, const Tolerances& tol) {
  if (!is_star_closed(s, tol)) {
    throw NotStarClosedError("commutant requires an adjoint-closed subspace");
  }
  const auto d = static_cast<Eigen::Index>(s.dim_h());
  const Eigen::Index n = d * d;
  // Current solution space of [X, b] = 0, as orthonormal vectorized columns.
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Identity(n, n);
  for (const auto& b : s.basis()) {
    if (k.cols() <= 1) break;  // only the identity is left
    Eigen::MatrixXcd map(n, k.cols());
    for (Eigen::Index c = 0; c < k.cols(); ++c) {
      const ComplexMatrix x = unvec(k.col(c), d);
      map.col(c) = vec(x * b - b * x);
    }
    const double cutoff = tol.comm * std::max(1.0, b.norm());
    k = k * nullspace(map, cutoff);
  }
  return VnAlgebra::certify(OperatorSubspace::from_orthonormal_columns(s.dim_h(), k), tol);
}

VnAlgebra double_commutant(const OperatorSubspace& s, const Tolerances& tol) {
  return commutant(commutant(s, tol).space(), tol);
}

VnAlgebra intersect_algebras(const VnAlgebra& a, const VnAlgebra& b, const Tolerances& tol) {
  return VnAlgebra::certify(intersect_subspaces(a.space(), b.space(), tol), tol);
}

VnAlgebra center(const VnAlgebra& a, const Tolerances& tol) {
  return intersect_algebras(a, commutant(a.space(), tol), tol);
}

double max_commutator_norm(const VnAlgebra& a) {
  double worst = 0.0;
  const auto& basis = a.space().basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      worst = std::max(worst, commutator_norm(basis[i], basis[j]));
    }
  }
  return worst;
}

bool is_commutative(const VnAlgebra& a, const Tolerances& tol) {
  const auto& basis = a.space().basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      if (!commutes(basis[i], basis[j], tol)) return false;
    }
  }
  return true;
}

bool algebra_equal(const VnAlgebra& a, const VnAlgebra& b, const Tolerances& tol) {
  return subspace_equal(a.space(), b.space(), tol);
}

VnAlgebra restrict_to_factors(const VnAlgebra& a, const Factorization& fact,
                              std::span<const std::string> labels, const Tolerances& tol) {
  if (a.dim_h() != fact.total_dim()) {
    throw DimensionError("algebra acts on C^" + std::to_string(a.dim_h()) +
                         " but the factorization has dimension " +
                         std::to_string(fact.total_dim()));
  }
  const auto keep = fact.canonical(labels);
  std::vector<ComplexMatrix> local;
  for (const auto& e : matrix_units(fact.dim_of(keep))) local.push_back(tensor_embed(e, fact, keep));
  const OperatorSubspace embedded = orthonormalize(local, tol);
  const OperatorSubspace both = intersect_subspaces(a.space(), embedded, tol);
  std::vector<ComplexMatrix> reduced;
  for (const auto& b : both.basis()) reduced.push_back(unembed(b, fact, keep));
  if (reduced.empty()) {
    throw CertificationError("restriction of an algebra lost the identity");
  }
  return VnAlgebra::certify(orthonormalize(reduced, tol), tol);
}

VnAlgebra embed_algebra(const VnAlgebra& a, const Factorization& fact,
                        std::span<const std::string> labels, const Tolerances& tol) {
  std::vector<ComplexMatrix> out;
  for (const auto& b : a.space().basis()) out.push_back(tensor_embed(b, fact, labels));
  return VnAlgebra::certify(orthonormalize(out, tol), tol);
}

std::vector<ComplexMatrix> block_algebra_basis(std::span<const Block> blocks) {
  std::size_t d = 0;
  for (const auto& b : blocks) d += b.d_left * b.d_right;
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<ComplexMatrix> out;
  Eigen::Index offset = 0;
  for (const auto& b : blocks) {
    const auto dl = static_cast<Eigen::Index>(b.d_left);
    const auto dr = static_cast<Eigen::Index>(b.d_right);
    for (Eigen::Index r = 0; r < dr; ++r) {
      for (Eigen::Index c = 0; c < dr; ++c) {
        ComplexMatrix e = ComplexMatrix::Zero(n, n);
        for (Eigen::Index l = 0; l < dl; ++l) e(offset + l * dr + r, offset + l * dr + c) = 1.0;
        out.push_back(std::move(e));
      }
    }
    offset += dl * dr;
  }
  return out;
}

double reconstruction_residual(const VnAlgebra& a, const BlockStructure& bs) {
  std::vector<ComplexMatrix> pulled;
  for (const auto& e : block_algebra_basis(bs.blocks)) pulled.push_back(bs.w.adjoint() * e * bs.w);
  const OperatorSubspace rebuilt = orthonormalize(pulled);
  if (rebuilt.dim() != a.dim()) return std::numeric_limits<double>::infinity();
  return mutual_residual(rebuilt, a.space());
}

BlockStructure block_structure(const VnAlgebra& a, std::uint64_t seed, const Tolerances& tol) {
  const VnAlgebra z = center(a, tol);
  const auto herm_a = hermitian_basis(a.space(), tol);
  const auto herm_z = hermitian_basis(z.space(), tol);
  std::string why;
  for (int attempt = 0; attempt < kMaxDecompositionAttempts; ++attempt) {
    auto bs = try_decompose(a, z, herm_a, herm_z, seed + static_cast<std::uint64_t>(attempt), tol, why);
    if (bs) {
      bs->attempts = attempt + 1;
      return std::move(*bs);
    }
  }
  throw DecompositionError("block decomposition failed after " +
                           std::to_string(kMaxDecompositionAttempts) +
                           " attempts (seed " + std::to_string(seed) + "): " + why);
}

}  // namespace causalvn

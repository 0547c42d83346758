#include "causalvn/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace causalvn {

namespace {

// Accept a Gram-Schmidt residual as a new direction only above this norm.
// Projected unit vectors that survive are O(1/d), far above it.
constexpr double kGramSchmidtFloor = 1e-6;

std::string dims_str(const ComplexMatrix& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

void require_same_square(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (!is_square(a) || !is_square(b) || a.rows() != b.rows()) {
    throw DimensionError(std::string(op) + ": operands must be square of equal size, got " +
                         dims_str(a) + " and " + dims_str(b));
  }
}

Eigen::Map<const Eigen::VectorXcd> vec(const ComplexMatrix& m) {
  return {m.data(), m.size()};
}

ComplexMatrix unvec(const Eigen::VectorXcd& v, std::size_t d) {
  return Eigen::Map<const ComplexMatrix>(v.data(), static_cast<Eigen::Index>(d),
                                         static_cast<Eigen::Index>(d));
}

// Two passes of classical Gram-Schmidt against the first `count` columns.
void orthogonalize_against(Eigen::VectorXcd& r, const Eigen::MatrixXcd& q, Eigen::Index count) {
  if (count == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    r -= q.leftCols(count) * (q.leftCols(count).adjoint() * r);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Factorization

Factorization::Factorization(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.label.empty()) throw LabelError("factor labels must be non-empty");
    if (f.dim == 0) throw DimensionError("factor '" + f.label + "' has dimension 0");
    if (!seen.insert(f.label).second) throw LabelError("duplicate factor label '" + f.label + "'");
  }
}

std::size_t Factorization::total_dim() const {
  std::size_t d = 1;
  for (const auto& f : factors_) d *= f.dim;
  return d;
}

bool Factorization::contains(std::string_view label) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const Factor& f) { return f.label == label; });
}

std::size_t Factorization::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].label == label) return i;
  }
  throw LabelError("unknown factor label '" + std::string(label) + "'");
}

std::size_t Factorization::dim_of(std::string_view label) const {
  return factors_[index_of(label)].dim;
}

std::size_t Factorization::dim_of(std::span<const std::string> labels) const {
  std::size_t d = 1;
  for (const auto& l : canonical(labels)) d *= dim_of(l);
  return d;
}

std::vector<std::string> Factorization::labels() const {
  std::vector<std::string> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) out.push_back(f.label);
  return out;
}

std::vector<std::string> Factorization::canonical(std::span<const std::string> labels) const {
  std::set<std::size_t> idx;
  for (const auto& l : labels) {
    if (!idx.insert(index_of(l)).second) {
      throw LabelError("label '" + l + "' listed twice");
    }
  }
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(factors_[i].label);
  return out;
}

std::vector<std::string> Factorization::complement(std::span<const std::string> labels) const {
  auto keep = canonical(labels);
  std::vector<std::string> out;
  for (const auto& f : factors_) {
    if (std::find(keep.begin(), keep.end(), f.label) == keep.end()) out.push_back(f.label);
  }
  return out;
}

Factorization Factorization::restrict_to(std::span<const std::string> labels) const {
  std::vector<Factor> out;
  for (const auto& l : canonical(labels)) out.push_back(factors_[index_of(l)]);
  return Factorization(std::move(out));
}

// ---------------------------------------------------------------------------
// OperatorSubspace

OperatorSubspace::OperatorSubspace(std::size_t dim_h)
    : dim_h_(dim_h), columns_(static_cast<Eigen::Index>(dim_h * dim_h), 0) {
  if (dim_h == 0) throw DimensionError("operator subspace needs dim_h >= 1");
}

OperatorSubspace OperatorSubspace::from_orthonormal_columns(std::size_t dim_h,
                                                            const Eigen::MatrixXcd& columns) {
  OperatorSubspace out(dim_h);
  const auto n = static_cast<Eigen::Index>(dim_h * dim_h);
  if (columns.rows() != n) {
    throw DimensionError("subspace columns must have length dim_h^2");
  }
  const Eigen::Index k = columns.cols();
  if (k == 0) return out;

  Eigen::MatrixXcd q(n, k);
  Eigen::Index count = 0;
  const auto d = static_cast<Eigen::Index>(dim_h);
  for (Eigen::Index i = 0; i < d && count < k; ++i) {
    for (Eigen::Index j = 0; j < d && count < k; ++j) {
      const Eigen::Index vi = j * d + i;  // column-major position of E_ij
      Eigen::VectorXcd r = columns * columns.row(vi).adjoint();
      orthogonalize_against(r, q, count);
      // Project back in case the input columns are slightly non-orthonormal.
      r = columns * (columns.adjoint() * r);
      orthogonalize_against(r, q, count);
      const double nr = r.norm();
      if (nr > kGramSchmidtFloor) q.col(count++) = r / nr;
    }
  }
  out.columns_ = q.leftCols(count);
  out.basis_.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index c = 0; c < count; ++c) out.basis_.push_back(unvec(out.columns_.col(c), dim_h));
  return out;
}

ComplexMatrix OperatorSubspace::project(const ComplexMatrix& m) const {
  if (static_cast<std::size_t>(m.rows()) != dim_h_ || !is_square(m)) {
    throw DimensionError("projection operand is " + dims_str(m) + ", subspace acts on C^" +
                         std::to_string(dim_h_));
  }
  if (empty()) return ComplexMatrix::Zero(m.rows(), m.cols());
  Eigen::VectorXcd p = columns_ * (columns_.adjoint() * vec(m));
  return unvec(p, dim_h_);
}

// ---------------------------------------------------------------------------
// Elementary matrix functions

ComplexMatrix identity(std::size_t d) {
  return ComplexMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double frobenius(const ComplexMatrix& a) { return a.norm(); }

bool is_square(const ComplexMatrix& a) { return a.rows() == a.cols() && a.rows() > 0; }

bool is_finite(const ComplexMatrix& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const Complex z = a.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

bool is_hermitian(const ComplexMatrix& a, const Tolerances& tol) {
  if (!is_square(a)) return false;
  return (a - a.adjoint()).norm() <= tol.comm * std::max(1.0, a.norm());
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_square(a, b, "hs_inner");
  return vec(a).dot(vec(b));  // Eigen's dot conjugates the left operand
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_square(a, b, "commutator");
  return a * b - b * a;
}

double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b) {
  return commutator(a, b).norm();
}

double commutator_threshold(const ComplexMatrix& a, const ComplexMatrix& b,
                            const Tolerances& tol) {
  return tol.comm * std::max(1.0, a.norm() * b.norm());
}

bool commutes(const ComplexMatrix& a, const ComplexMatrix& b, const Tolerances& tol) {
  return commutator_norm(a, b) <= commutator_threshold(a, b, tol);
}

// ---------------------------------------------------------------------------
// Tensor factor bookkeeping

std::vector<std::size_t> factor_permutation(const Factorization& fact,
                                            std::span<const std::string> order) {
  const std::size_t nf = fact.size();
  if (order.size() != nf) throw LabelError("factor order must list every label exactly once");
  std::vector<std::size_t> old_pos(nf);
  std::set<std::size_t> seen;
  for (std::size_t k = 0; k < nf; ++k) {
    old_pos[k] = fact.index_of(order[k]);
    if (!seen.insert(old_pos[k]).second) throw LabelError("label '" + order[k] + "' listed twice");
  }
  std::vector<std::size_t> old_stride(nf);
  std::size_t s = 1;
  for (std::size_t k = nf; k-- > 0;) {
    old_stride[k] = s;
    s *= fact.factors()[k].dim;
  }
  const std::size_t total = s;
  std::vector<std::size_t> perm(total);
  std::vector<std::size_t> digits(nf, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t old = 0;
    for (std::size_t k = 0; k < nf; ++k) old += digits[k] * old_stride[old_pos[k]];
    perm[idx] = old;
    // increment the mixed-radix counter in the new order
    for (std::size_t k = nf; k-- > 0;) {
      if (++digits[k] < fact.factors()[old_pos[k]].dim) break;
      digits[k] = 0;
    }
  }
  return perm;
}

ComplexMatrix reorder_factors(const ComplexMatrix& op, const Factorization& fact,
                              std::span<const std::string> order) {
  const auto n = static_cast<Eigen::Index>(fact.total_dim());
  if (op.rows() != n || op.cols() != n) {
    throw DimensionError("operator is " + dims_str(op) + " but factorization has dimension " +
                         std::to_string(n));
  }
  const auto perm = factor_permutation(fact, order);
  ComplexMatrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i, j) = op(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(perm[j]));
    }
  }
  return out;
}

ComplexMatrix embed_on_wires(const ComplexMatrix& op, const Factorization& fact,
                             std::span<const std::string> wires) {
  std::vector<std::string> order(wires.begin(), wires.end());
  fact.canonical(order);  // validates labels, rejects repeats
  const auto rest = fact.complement(order);
  std::size_t d_on = 1;
  for (const auto& l : order) d_on *= fact.dim_of(l);
  if (!is_square(op) || static_cast<std::size_t>(op.rows()) != d_on) {
    throw DimensionError("operator is " + dims_str(op) + " but the named factors have dimension " +
                         std::to_string(d_on));
  }
  ComplexMatrix local = kron(op, identity(fact.dim_of(rest)));
  order.insert(order.end(), rest.begin(), rest.end());
  // local is expressed in `order`; scatter it back to fact's order.
  const auto perm = factor_permutation(fact, order);
  const auto n = static_cast<Eigen::Index>(perm.size());
  ComplexMatrix out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      out(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(perm[j])) = local(i, j);
    }
  }
  return out;
}

ComplexMatrix tensor_embed(const ComplexMatrix& op, const Factorization& fact,
                           std::span<const std::string> on_labels) {
  return embed_on_wires(op, fact, fact.canonical(on_labels));
}

ComplexMatrix partial_trace(const ComplexMatrix& op, const Factorization& fact,
                            std::span<const std::string> keep_labels) {
  const auto keep = fact.canonical(keep_labels);
  const auto rest = fact.complement(keep);
  std::vector<std::string> order = keep;
  order.insert(order.end(), rest.begin(), rest.end());
  const ComplexMatrix m = reorder_factors(op, fact, order);
  const auto dk = static_cast<Eigen::Index>(fact.dim_of(keep));
  const auto dr = static_cast<Eigen::Index>(fact.dim_of(rest));
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a) {
    for (Eigen::Index b = 0; b < dk; ++b) {
      Complex s = 0.0;
      for (Eigen::Index r = 0; r < dr; ++r) s += m(a * dr + r, b * dr + r);
      out(a, b) = s;
    }
  }
  return out;
}

ComplexMatrix unembed(const ComplexMatrix& op, const Factorization& fact,
                      std::span<const std::string> keep_labels) {
  const auto rest = fact.complement(keep_labels);
  return partial_trace(op, fact, keep_labels) / static_cast<double>(fact.dim_of(rest));
}

// ---------------------------------------------------------------------------
// Unitaries

double unitarity_residual(const ComplexMatrix& u) {
  if (!is_square(u)) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).norm();
}

void require_unitary(const ComplexMatrix& u, const Tolerances& tol) {
  const double r = unitarity_residual(u);
  if (!(r <= tol.unitarity)) {
    std::ostringstream os;
    os << "operator is not unitary: ||U^dag U - I||_F = " << r << " > " << tol.unitarity;
    throw UnitarityError(os.str());
  }
}

ComplexMatrix heisenberg_pullback(const ComplexMatrix& u, const ComplexMatrix& n,
                                  const Tolerances& tol) {
  require_same_square(u, n, "heisenberg_pullback");
  require_unitary(u, tol);
  return u.adjoint() * n * u;
}

// ---------------------------------------------------------------------------
// Subspace linear algebra

namespace {

// Eigen 3.4.0's BDCSVD occasionally returns singular vectors that are
// orthonormal but do not reproduce the input (or are not finite) for exactly
// rank-deficient matrices. Every decomposition is checked by reconstruction
// and recomputed with JacobiSVD when the check fails.
struct Svd {
  Eigen::VectorXd values;
  Eigen::MatrixXcd u;  // thin
  Eigen::MatrixXcd v;  // thin or full, as requested
};

bool orthonormal_columns(const Eigen::MatrixXcd& q) {
  if (!q.allFinite()) return false;
  const Eigen::MatrixXcd g = q.adjoint() * q;
  return (g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())).norm() <= 1e-10;
}

template <class Decomposition>
Svd extract(const Decomposition& svd) {
  return Svd{svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

bool reproduces(const Eigen::MatrixXcd& m, const Svd& s) {
  if (!s.values.allFinite() || !orthonormal_columns(s.u) || !orthonormal_columns(s.v)) return false;
  const Eigen::Index k = s.values.size();
  const Eigen::MatrixXcd back =
      s.u.leftCols(k) * s.values.cast<Complex>().asDiagonal() * s.v.leftCols(k).adjoint();
  return (back - m).norm() <= 1e-11 * std::max(1.0, m.norm());
}

Svd checked_svd(const Eigen::MatrixXcd& m, bool full_v) {
  const unsigned int flags = Eigen::ComputeThinU | (full_v ? Eigen::ComputeFullV : Eigen::ComputeThinV);
  Svd out = extract(Eigen::BDCSVD<Eigen::MatrixXcd>(m, flags));
  if (reproduces(m, out)) return out;
  return extract(Eigen::JacobiSVD<Eigen::MatrixXcd>(m, flags));
}

}  // namespace

Eigen::MatrixXcd nullspace(const Eigen::MatrixXcd& m, double cutoff) {
  const Eigen::Index cols = m.cols();
  if (cols == 0) return Eigen::MatrixXcd(0, 0);
  if (m.rows() == 0) return Eigen::MatrixXcd::Identity(cols, cols);

  Eigen::MatrixXcd reduced;
  if (m.rows() > 2 * cols) {
    // Same singular values and right singular vectors as the tall matrix.
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    reduced = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  } else {
    reduced = m;
  }
  const Svd svd = checked_svd(reduced, true);
  const auto& sv = svd.values;
  const auto& v = svd.v;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (j >= sv.size() || sv(j) <= cutoff) keep.push_back(j);
  }
  Eigen::MatrixXcd out(cols, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = v.col(keep[c]);
  return out;
}

OperatorSubspace orthonormalize(std::span<const ComplexMatrix> mats, const Tolerances& tol) {
  if (mats.empty()) throw DimensionError("orthonormalize needs at least one matrix to fix dim_h");
  const ComplexMatrix& first = mats.front();
  if (!is_square(first)) throw DimensionError("orthonormalize: non-square operand " + dims_str(first));
  const auto d = static_cast<std::size_t>(first.rows());
  const auto n = static_cast<Eigen::Index>(d * d);
  Eigen::MatrixXcd a(n, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t c = 0; c < mats.size(); ++c) {
    require_same_square(first, mats[c], "orthonormalize");
    a.col(static_cast<Eigen::Index>(c)) = vec(mats[c]);
  }
  const Svd svd = checked_svd(a, false);
  const auto& sv = svd.values;
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  if (!(smax > 0.0)) return OperatorSubspace(d);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol.rank * smax) ++rank;
  return OperatorSubspace::from_orthonormal_columns(d, svd.u.leftCols(rank));
}

OperatorSubspace intersect_subspaces(const OperatorSubspace& v, const OperatorSubspace& w,
                                     const Tolerances& tol) {
  if (v.dim_h() != w.dim_h()) {
    throw DimensionError("intersect_subspaces: subspaces act on C^" + std::to_string(v.dim_h()) +
                         " and C^" + std::to_string(w.dim_h()));
  }
  if (v.empty() || w.empty()) return OperatorSubspace(v.dim_h());
  // x = V a lies in w iff (I - W W^dag) V a = 0; the singular value is the
  // projection residual of the unit vector x.
  const Eigen::MatrixXcd& vc = v.columns();
  const Eigen::MatrixXcd& wc = w.columns();
  Eigen::MatrixXcd off = vc - wc * (wc.adjoint() * vc);
  Eigen::MatrixXcd alpha = nullspace(off, tol.contain);
  return OperatorSubspace::from_orthonormal_columns(v.dim_h(), vc * alpha);
}

double projection_residual(const OperatorSubspace& v, const ComplexMatrix& m) {
  return (m - v.project(m)).norm();
}

bool subspace_contains(const OperatorSubspace& v, const ComplexMatrix& m, const Tolerances& tol) {
  return projection_residual(v, m) <= tol.contain * std::max(1.0, m.norm());
}

double containment_residual(const OperatorSubspace& outer, const OperatorSubspace& inner) {
  if (outer.dim_h() != inner.dim_h()) {
    throw DimensionError("containment check between subspaces on different spaces");
  }
  double worst = 0.0;
  for (const auto& b : inner.basis()) worst = std::max(worst, projection_residual(outer, b));
  return worst;
}

double mutual_residual(const OperatorSubspace& v, const OperatorSubspace& w) {
  return std::max(containment_residual(v, w), containment_residual(w, v));
}

bool subspace_equal(const OperatorSubspace& v, const OperatorSubspace& w, const Tolerances& tol) {
  return v.dim_h() == w.dim_h() && v.dim() == w.dim() && mutual_residual(v, w) <= tol.contain;
}

bool is_star_closed(const OperatorSubspace& v, const Tolerances& tol) {
  return std::all_of(v.basis().begin(), v.basis().end(), [&](const ComplexMatrix& b) {
    return subspace_contains(v, b.adjoint(), tol);
  });
}

std::vector<ComplexMatrix> matrix_units(std::size_t d) {
  std::vector<ComplexMatrix> out;
  out.reserve(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<ComplexMatrix> hermitian_unit_basis(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<ComplexMatrix> out;
  out.reserve(d * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(i, i) = 1.0;
    out.push_back(std::move(e));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      ComplexMatrix sym = ComplexMatrix::Zero(n, n);
      sym(i, j) = s;
      sym(j, i) = s;
      ComplexMatrix anti = ComplexMatrix::Zero(n, n);
      anti(i, j) = Complex(0.0, -s);
      anti(j, i) = Complex(0.0, s);
      out.push_back(std::move(sym));
      out.push_back(std::move(anti));
    }
  }
  return out;
}

std::vector<ComplexMatrix> hermitian_basis(const OperatorSubspace& v, const Tolerances& tol) {
  if (!is_star_closed(v, tol)) {
    throw NotStarClosedError("subspace is not closed under adjoints");
  }
  const std::size_t k = v.dim();
  std::vector<ComplexMatrix> out;
  if (k == 0) return out;
  // Hermitian matrices form a real inner-product space under Re Tr(A^dag B);
  // projections of Hermitian matrices onto an adjoint-closed subspace stay
  // Hermitian, so Gram-Schmidt over the projected Hermitian units is exact.
  for (const auto& h : hermitian_unit_basis(v.dim_h())) {
    if (out.size() == k) break;
    ComplexMatrix p = v.project(h);
    p = 0.5 * (p + p.adjoint());
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : out) p -= hs_inner(q, p).real() * q;
    }
    const double np = p.norm();
    if (np > kGramSchmidtFloor) out.push_back(p / np);
  }
  if (out.size() != k) {
    throw NotStarClosedError("Hermitian part has real dimension " + std::to_string(out.size()) +
                             ", expected " + std::to_string(k));
  }
  return out;
}

}  // namespace causalvn

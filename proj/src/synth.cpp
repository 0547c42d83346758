#include "causalvn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "causalvn/gates.hpp"
#include "causalvn/random.hpp"

namespace causalvn {

std::string to_string(SynthMode m) {
  switch (m) {
    case SynthMode::block_tagged_swap:
      return "block_tagged_swap";
    case SynthMode::paper_literal:
      return "paper_literal";
    case SynthMode::classical_two_probe:
      return "classical_two_probe";
    case SynthMode::coherent_control:
      return "coherent_control";
  }
  return "block_tagged_swap";
}

SynthMode synth_mode_from_string(std::string_view s) {
  if (s == "block_tagged_swap") return SynthMode::block_tagged_swap;
  if (s == "paper_literal") return SynthMode::paper_literal;
  if (s == "classical_two_probe") return SynthMode::classical_two_probe;
  if (s == "coherent_control") return SynthMode::coherent_control;
  throw Error("unknown synthesis mode '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Pvm

Pvm::Pvm(std::vector<ComplexMatrix> projectors, const Tolerances& tol)
    : projectors_(std::move(projectors)) {
  if (projectors_.empty()) throw PvmError("a PVM needs at least one projector");
  const auto d = projectors_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < projectors_.size(); ++k) {
    const auto& p = projectors_[k];
    if (!is_square(p) || p.rows() != d) throw DimensionError("PVM elements must share one square shape");
    const double scale = std::max(1.0, p.norm());
    if (!is_hermitian(p, tol)) throw PvmError("PVM element " + std::to_string(k) + " is not Hermitian");
    if ((p * p - p).norm() > tol.contain * scale) {
      throw PvmError("PVM element " + std::to_string(k) + " is not idempotent");
    }
    if (p.norm() <= tol.contain) throw PvmError("PVM element " + std::to_string(k) + " is zero");
    for (std::size_t l = 0; l < k; ++l) {
      if ((projectors_[l] * p).norm() > tol.contain * scale) {
        throw PvmError("PVM elements " + std::to_string(l) + " and " + std::to_string(k) +
                       " are not orthogonal");
      }
    }
    sum += p;
  }
  if ((sum - ComplexMatrix::Identity(d, d)).norm() > tol.contain * std::sqrt(static_cast<double>(d))) {
    throw PvmError("PVM elements do not sum to the identity");
  }
}

VnAlgebra Pvm::algebra(const Tolerances& tol) const {
  return VnAlgebra::certify(orthonormalize(projectors_, tol), tol);
}

// ---------------------------------------------------------------------------

namespace {

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Padded block swap on S' (x) P0 in the block basis S' = (+)_i L^i (x) R^i.
// Within block i, R^i (x) span{|0>..|d_R^i - 1>} is swapped; the rest of
// R^i (x) P0 is rotated by a seeded random unitary shared across L^i.
ComplexMatrix block_swap(std::span<const Block> blocks, std::size_t d_probe, Rng& rng) {
  std::size_t ds = 0;
  for (const auto& b : blocks) ds += b.d_left * b.d_right;
  const std::size_t n = ds * d_probe;
  ComplexMatrix sw = ComplexMatrix::Zero(ix(n), ix(n));
  auto at = [&](std::size_t s, std::size_t p) { return ix(s * d_probe + p); };

  std::size_t offset = 0;
  for (const auto& b : blocks) {
    const std::size_t r_dim = b.d_right;
    const std::size_t spare = d_probe - r_dim;
    const ComplexMatrix pad = spare > 0 ? haar_unitary(r_dim * spare, rng) : ComplexMatrix();
    for (std::size_t l = 0; l < b.d_left; ++l) {
      const std::size_t base = offset + l * r_dim;
      for (std::size_t r = 0; r < r_dim; ++r) {
        for (std::size_t p = 0; p < r_dim; ++p) sw(at(base + p, r), at(base + r, p)) = 1.0;
      }
      // local index of |r>|r_dim + q> inside the padded region is r * spare + q
      for (std::size_t r_in = 0; r_in < r_dim; ++r_in) {
        for (std::size_t q_in = 0; q_in < spare; ++q_in) {
          for (std::size_t r_out = 0; r_out < r_dim; ++r_out) {
            for (std::size_t q_out = 0; q_out < spare; ++q_out) {
              sw(at(base + r_out, r_dim + q_out), at(base + r_in, r_dim + q_in)) =
                  pad(ix(r_out * spare + q_out), ix(r_in * spare + q_in));
            }
          }
        }
      }
    }
    offset += b.d_left * r_dim;
  }
  return sw;
}

std::size_t max_right_dim(std::span<const Block> blocks) {
  std::size_t d = 1;
  for (const auto& b : blocks) d = std::max(d, b.d_right);
  return d;
}

}  // namespace

Interaction realize_algebra(const VnAlgebra& a, SynthMode mode, std::uint64_t seed,
                            const Tolerances& tol) {
  if (mode != SynthMode::block_tagged_swap && mode != SynthMode::paper_literal) {
    throw Error("realize_algebra supports block_tagged_swap and paper_literal, not " +
                to_string(mode));
  }
  const BlockStructure bs = block_structure(a, seed, tol);
  const std::size_t ds = a.dim_h();
  const std::size_t d_probe = max_right_dim(bs.blocks);
  Rng rng(seed);
  const ComplexMatrix sw = block_swap(bs.blocks, d_probe, rng);
  const ComplexMatrix w_in = kron(bs.w, identity(d_probe));

  if (mode == SynthMode::paper_literal) {
    const ComplexMatrix u = w_in.adjoint() * sw * w_in;
    Interaction ia(Factorization({{"S", ds}, {"P", d_probe}}), {Role::system, Role::probe1}, u, tol);
    ia.seed = seed;
    return ia;
  }

  // Tag register: P1 is shifted by the block index after the swap.
  const std::size_t n_blocks = bs.blocks.size();
  ComplexMatrix tag = ComplexMatrix::Zero(ix(ds * n_blocks), ix(ds * n_blocks));
  {
    std::size_t offset = 0;
    for (std::size_t i = 0; i < n_blocks; ++i) {
      const std::size_t size = bs.blocks[i].d_left * bs.blocks[i].d_right;
      ComplexMatrix proj = ComplexMatrix::Zero(ix(ds), ix(ds));
      for (std::size_t s = offset; s < offset + size; ++s) proj(ix(s), ix(s)) = 1.0;
      tag += kron(proj, gates::shift(n_blocks, static_cast<long>(i)));
      offset += size;
    }
  }
  const Factorization fact({{"S", ds}, {"P0", d_probe}, {"P1", n_blocks}});
  const std::vector<std::string> s_p1{"S", "P1"};
  const std::vector<std::string> s_p0{"S", "P0"};
  const ComplexMatrix u_block = tensor_embed(tag, fact, s_p1) * tensor_embed(sw, fact, s_p0);
  const ComplexMatrix w_full = kron(bs.w, identity(d_probe * n_blocks));
  const ComplexMatrix u = w_full.adjoint() * u_block * w_full;

  Interaction ia(fact, {Role::system, Role::probe1, Role::probe1}, u, tol);
  ia.seed = seed;
  auto result = std::make_shared<VerificationResult>(verify_realization(ia, a, tol));
  if (!result->passed) {
    std::ostringstream os;
    os << "synthesized interaction reaches an algebra of dimension " << result->achieved.dim()
       << " instead of " << a.dim() << " (residual " << result->residual() << ")";
    throw SynthesisError(os.str(), result);
  }
  return ia;
}

Interaction realize_classical(const Pvm& pvm, std::uint64_t seed, const Tolerances& tol) {
  const std::size_t ds = pvm.dim_h();
  const std::size_t n = pvm.size();
  const ComplexMatrix x = gates::shift(n, 1);
  const std::size_t total = ds * n * n;
  ComplexMatrix u = ComplexMatrix::Zero(ix(total), ix(total));
  ComplexMatrix v = identity(n);  // X^k
  for (std::size_t k = 0; k < n; ++k) {
    u += kron(kron(pvm.projectors()[k], v), v);
    v = x * v;
  }
  Interaction ia(Factorization({{"S", ds}, {"P1", n}, {"P2", n}}),
                 {Role::system, Role::probe1, Role::probe2}, u, tol);
  ia.seed = seed;
  auto result = std::make_shared<VerificationResult>(verify_realization(ia, pvm.algebra(tol), tol));
  if (!result->passed || !result->independence || !result->independence->both()) {
    throw SynthesisError("classical realization failed certification", result);
  }
  return ia;
}

Interaction coherent_control_interaction(const Pvm& pvm, std::span<const double> eigenvalues,
                                         double t, std::size_t probe_dim, const Tolerances& tol) {
  if (eigenvalues.size() != pvm.size()) {
    throw DimensionError("need one eigenvalue per PVM element (" + std::to_string(pvm.size()) +
                         "), got " + std::to_string(eigenvalues.size()));
  }
  if (probe_dim < 2) throw DimensionError("coherent control needs a probe of dimension >= 2");
  std::vector<ComplexMatrix> controls;
  for (double m : eigenvalues) {
    std::vector<double> angles(probe_dim);
    for (std::size_t j = 0; j < probe_dim; ++j) angles[j] = -m * t * static_cast<double>(j);
    controls.push_back(gates::phase(angles));
  }
  // Equal up to a phase iff |Tr(V_k^dag V_l)| saturates its bound probe_dim.
  const double bound = (1.0 - tol.rank) * static_cast<double>(probe_dim);
  for (std::size_t k = 0; k < controls.size(); ++k) {
    for (std::size_t l = k + 1; l < controls.size(); ++l) {
      const double overlap = std::abs(hs_inner(controls[k], controls[l]));
      if (overlap >= bound) {
        std::ostringstream os;
        os << "control unitaries " << k << " and " << l
           << " coincide up to a phase (|Tr(V_k^dag V_l)| = " << overlap << ")";
        throw DegenerateControlError(k, l, os.str());
      }
    }
  }
  const std::size_t ds = pvm.dim_h();
  ComplexMatrix u = ComplexMatrix::Zero(ix(ds * probe_dim), ix(ds * probe_dim));
  for (std::size_t k = 0; k < pvm.size(); ++k) u += kron(pvm.projectors()[k], controls[k]);
  return Interaction(Factorization({{"S", ds}, {"P", probe_dim}}), {Role::system, Role::probe1}, u,
                     tol);
}

VerificationResult verify_realization(const Interaction& ia, const VnAlgebra& target,
                                      const Tolerances& tol) {
  const std::size_t ds = ia.factorization().dim_of(ia.system_labels());
  if (ds != target.dim_h()) {
    throw DimensionError("target algebra acts on C^" + std::to_string(target.dim_h()) +
                         " but the system has dimension " + std::to_string(ds));
  }
  std::optional<Independence> indep;
  std::optional<VnAlgebra> achieved;
  if (ia.two_probe()) {
    indep = causally_independent(ia, tol);
    achieved = independently_accessible_set(ia, tol);
  } else {
    achieved = accessible_set(ia, tol);
  }
  const double t_in_a = containment_residual(achieved->space(), target.space());
  const double a_in_t = containment_residual(target.space(), achieved->space());
  const bool commutative = is_commutative(*achieved, tol);
  const bool passed = achieved->dim() == target.dim() && std::max(t_in_a, a_in_t) <= tol.contain;
  return VerificationResult{
      .passed = passed,
      .target = target,
      .achieved = std::move(*achieved),
      .residual_target_in_achieved = t_in_a,
      .residual_achieved_in_target = a_in_t,
      .commutative = commutative,
      .independence = indep,
  };
}

Interaction synthesize(const SynthSpec& spec, const Tolerances& tol) {
  switch (spec.mode) {
    case SynthMode::block_tagged_swap:
    case SynthMode::paper_literal: {
      if (const auto* a = std::get_if<VnAlgebra>(&spec.target)) {
        return realize_algebra(*a, spec.mode, spec.seed, tol);
      }
      const auto& pvm = std::get<Pvm>(spec.target);
      return realize_algebra(pvm.algebra(tol), spec.mode, spec.seed, tol);
    }
    case SynthMode::classical_two_probe: {
      const auto* pvm = std::get_if<Pvm>(&spec.target);
      if (!pvm) throw Error("classical_two_probe synthesis needs a PVM target");
      return realize_classical(*pvm, spec.seed, tol);
    }
    case SynthMode::coherent_control: {
      const auto* pvm = std::get_if<Pvm>(&spec.target);
      if (!pvm) throw Error("coherent_control synthesis needs a PVM target");
      std::vector<double> m = spec.eigenvalues;
      if (m.empty()) {
        for (std::size_t k = 0; k < pvm->size(); ++k) m.push_back(static_cast<double>(k));
      }
      return coherent_control_interaction(*pvm, m, spec.t, spec.probe_dim, tol);
    }
  }
  throw Error("unsupported synthesis mode");
}

}  // namespace causalvn

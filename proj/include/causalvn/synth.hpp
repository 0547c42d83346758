#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "causalvn/causal.hpp"
#include "causalvn/vnalg.hpp"

namespace causalvn {

enum class SynthMode { block_tagged_swap, paper_literal, classical_two_probe, coherent_control };

std::string to_string(SynthMode m);
SynthMode synth_mode_from_string(std::string_view s);

// Projection-valued measure: Hermitian idempotents, pairwise orthogonal,
// summing to the identity.
class Pvm {
 public:
  explicit Pvm(std::vector<ComplexMatrix> projectors, const Tolerances& tol = {});

  const std::vector<ComplexMatrix>& projectors() const { return projectors_; }
  std::size_t size() const { return projectors_.size(); }
  std::size_t dim_h() const { return static_cast<std::size_t>(projectors_.front().rows()); }
  // span{pi_k}, a commutative algebra.
  VnAlgebra algebra(const Tolerances& tol = {}) const;

 private:
  std::vector<ComplexMatrix> projectors_;
};

struct SynthSpec {
  std::variant<VnAlgebra, Pvm> target;
  SynthMode mode = SynthMode::block_tagged_swap;
  std::uint64_t seed = 0;
  double t = 1.0;                    // coherent control only
  std::vector<double> eigenvalues;   // coherent control only
  std::size_t probe_dim = 2;         // coherent control only
};

struct VerificationResult {
  bool passed = false;
  VnAlgebra target;
  VnAlgebra achieved;
  double residual_target_in_achieved = 0.0;
  double residual_achieved_in_target = 0.0;
  bool commutative = false;
  std::optional<Independence> independence;

  double residual() const { return std::max(residual_target_in_achieved, residual_achieved_in_target); }
};

class SynthesisError : public Error {
 public:
  SynthesisError(const std::string& what, std::shared_ptr<const VerificationResult> result)
      : Error(what), result_(std::move(result)) {}
  // Verification that failed, with the achieved algebra.
  const VerificationResult* result() const { return result_.get(); }

 private:
  std::shared_ptr<const VerificationResult> result_;
};

// Interaction whose accessible algebra is `a`.
//  block_tagged_swap: system S, probes P0 (dim max d_right) and P1 (dim
//    #blocks); within each block the R factor is swapped into P0 (padded with
//    a seeded random unitary when smaller), then P1 is shifted by the block
//    index. Certified by round trip; SynthesisError on failure.
//  paper_literal: system S, probe P; the padded block swap alone, not certified.
Interaction realize_algebra(const VnAlgebra& a, SynthMode mode = SynthMode::block_tagged_swap,
                            std::uint64_t seed = 0, const Tolerances& tol = {});

// sum_k pi_k (x) X^k (x) X^k on S (x) P1 (x) P2 with C^n probes. Certified:
// probes causally independent and independently accessible algebra span{pi_k}.
Interaction realize_classical(const Pvm& pvm, std::uint64_t seed = 0, const Tolerances& tol = {});

// sum_k pi_k (x) exp(-i m_k t N) with N = diag(0, ..., probe_dim - 1).
// DegenerateControlError if two control unitaries agree up to a phase.
Interaction coherent_control_interaction(const Pvm& pvm, std::span<const double> eigenvalues,
                                         double t, std::size_t probe_dim,
                                         const Tolerances& tol = {});

// Round-trip check: accessible (or, for two probes, independently accessible)
// algebra of `ia` against `target`.
VerificationResult verify_realization(const Interaction& ia, const VnAlgebra& target,
                                      const Tolerances& tol = {});

// Dispatches on spec.mode.
Interaction synthesize(const SynthSpec& spec, const Tolerances& tol = {});

}  // namespace causalvn

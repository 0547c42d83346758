#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causalvn/opcore.hpp"
#include "causalvn/vnalg.hpp"

namespace causalvn {

enum class Role { system, probe1, probe2 };

std::string to_string(Role r);
Role role_from_string(std::string_view s);

// A unitary on a labelled tensor product, with each factor playing the role
// of system or of one of (at most) two probes.
class Interaction {
 public:
  Interaction(Factorization fact, std::vector<Role> roles, ComplexMatrix u,
              const Tolerances& tol = {});

  const Factorization& factorization() const { return fact_; }
  const std::vector<Role>& roles() const { return roles_; }
  const ComplexMatrix& unitary() const { return u_; }
  std::size_t dim() const { return fact_.total_dim(); }

  Role role_of(std::string_view label) const;
  std::vector<std::string> labels_with(Role r) const;
  std::vector<std::string> system_labels() const { return labels_with(Role::system); }
  bool two_probe() const;

  Interaction with_unitary(ComplexMatrix u, const Tolerances& tol = {}) const;
  // Same interaction with U replaced by U^dag.
  Interaction inverse() const;

  // Seed used to draw any random part of a synthesized unitary.
  std::optional<std::uint64_t> seed;

 private:
  Factorization fact_;
  std::vector<Role> roles_;
  ComplexMatrix u_;
};

// An operator acting on a subset of an interaction's factors (in the
// factorization's order); identity elsewhere.
struct LocalOperator {
  ComplexMatrix op;
  std::vector<std::string> labels;
};

struct InfluenceResult {
  bool influences = false;
  double residual = 0.0;   // ||[U^dag N U, M]||_F, or the worst such residual
  double threshold = 0.0;  // zero-commutator threshold it was compared with
};

// M --U--> N: the pulled-back N fails to commute with M. Both operators must
// be Hermitian.
InfluenceResult influence(const Interaction& ia, const LocalOperator& m, const LocalOperator& n,
                          const Tolerances& tol = {});
bool influences(const Interaction& ia, const LocalOperator& m, const LocalOperator& n,
                const Tolerances& tol = {});
bool influences(const Interaction& ia, const ComplexMatrix& m, const ComplexMatrix& n,
                const Tolerances& tol = {});

// Whole-factor influence: some operator on `from` influences some operator on
// `to`. Decided by whether every pulled-back operator on `to` lies in the
// commutant of the local algebra of `from`.
InfluenceResult influences_subsystem(const Interaction& ia, std::span<const std::string> from,
                                     std::span<const std::string> to,
                                     const Tolerances& tol = {});

// Default probe of a single-probe analysis: every factor with role probe1.
std::vector<std::string> default_probe(const Interaction& ia);
// Factors probed when `probe` is the probe: everything else, in order.
std::vector<std::string> probed_labels(const Interaction& ia, std::span<const std::string> probe);

// Operator-Schmidt components U_ch^dag U_dh' of the pulled-back probe algebra,
// as an adjoint-closed subspace on the probed factors.
OperatorSubspace pullback_components(const Interaction& ia, std::span<const std::string> probe,
                                     const Tolerances& tol = {});

// Generators on the probed factors that influence no probe observable.
VnAlgebra noninfluencing_generators(const Interaction& ia, std::span<const std::string> probe,
                                    const Tolerances& tol = {});

// Every change of M (by a non-commuting generator) influences the probe.
// M acts on the probed factors.
bool is_accessible(const Interaction& ia, const ComplexMatrix& m,
                   std::span<const std::string> probe, const Tolerances& tol = {});
bool is_accessible(const Interaction& ia, const ComplexMatrix& m, const Tolerances& tol = {});

// The algebra whose Hermitian part is the complete set of accessible
// observables on the probed factors.
VnAlgebra accessible_set(const Interaction& ia, std::span<const std::string> probe,
                         const Tolerances& tol = {});
VnAlgebra accessible_set(const Interaction& ia, const Tolerances& tol = {});

VnAlgebra implementable_set(const Interaction& ia, std::span<const std::string> probe,
                            const Tolerances& tol = {});
VnAlgebra implementable_set(const Interaction& ia, const Tolerances& tol = {});

bool is_useful(const Interaction& ia, std::span<const std::string> probe,
               const Tolerances& tol = {});
bool is_useful(const Interaction& ia, const Tolerances& tol = {});

struct Independence {
  bool p1_not_to_p2 = false;  // P1 does not influence P2
  bool p2_not_to_p1 = false;  // P2 does not influence P1
  double residual_p1_to_p2 = 0.0;
  double residual_p2_to_p1 = 0.0;

  bool both() const { return p1_not_to_p2 && p2_not_to_p1; }
};

Independence causally_independent(const Interaction& ia, const Tolerances& tol = {});

// Observables on the system accessible to each probe when the other probe is
// lumped in with the system; the intersection of the two, restricted to the
// system factors.
VnAlgebra independently_accessible_set(const Interaction& ia, const Tolerances& tol = {});

enum class Mode { single_probe, two_probe };

struct AccessReport {
  Mode mode = Mode::single_probe;
  std::vector<std::string> system_labels;
  std::vector<std::string> probe_labels;  // probe1 (and probe2) factors
  VnAlgebra accessible;
  BlockStructure blocks;
  bool commutative = false;
  bool useful = false;
  std::optional<Independence> independence;
  double max_commutator = 0.0;            // largest basis commutator of `accessible`
  double max_subthreshold_residual = 0.0; // largest residual judged to be zero
  // Structural consistency checks (usefulness vs dimension, commutativity of
  // independently accessible algebras). Empty when everything is consistent.
  std::vector<std::string> failures;

  bool consistent() const { return failures.empty(); }
};

AccessReport classify(const Interaction& ia, std::uint64_t seed = 0, const Tolerances& tol = {});

}  // namespace causalvn

#include "causalvn/causal.hpp"

#include <algorithm>
#include <sstream>

namespace causalvn {

std::string to_string(Role r) {
  switch (r) {
    case Role::system:
      return "system";
    case Role::probe1:
      return "probe1";
    case Role::probe2:
      return "probe2";
  }
  return "system";
}

Role role_from_string(std::string_view s) {
  if (s == "system") return Role::system;
  if (s == "probe1" || s == "probe") return Role::probe1;
  if (s == "probe2") return Role::probe2;
  throw RoleError("unknown role '" + std::string(s) + "' (expected system, probe1 or probe2)");
}

// ---------------------------------------------------------------------------
// Interaction

Interaction::Interaction(Factorization fact, std::vector<Role> roles, ComplexMatrix u,
                         const Tolerances& tol)
    : fact_(std::move(fact)), roles_(std::move(roles)), u_(std::move(u)) {
  if (roles_.size() != fact_.size()) {
    throw RoleError("every factor needs exactly one role");
  }
  if (std::none_of(roles_.begin(), roles_.end(), [](Role r) { return r == Role::system; })) {
    throw RoleError("an interaction needs at least one system factor");
  }
  if (std::none_of(roles_.begin(), roles_.end(), [](Role r) { return r == Role::probe1; })) {
    throw RoleError("an interaction needs a probe1 factor");
  }
  const auto n = static_cast<Eigen::Index>(fact_.total_dim());
  if (u_.rows() != n || u_.cols() != n) {
    throw DimensionError("unitary is " + std::to_string(u_.rows()) + "x" +
                         std::to_string(u_.cols()) + " but the factors multiply to " +
                         std::to_string(n));
  }
  if (!is_finite(u_)) throw UnitarityError("unitary has non-finite entries");
  require_unitary(u_, tol);
}

Role Interaction::role_of(std::string_view label) const { return roles_[fact_.index_of(label)]; }

std::vector<std::string> Interaction::labels_with(Role r) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < roles_.size(); ++i) {
    if (roles_[i] == r) out.push_back(fact_.factors()[i].label);
  }
  return out;
}

bool Interaction::two_probe() const {
  return std::any_of(roles_.begin(), roles_.end(), [](Role r) { return r == Role::probe2; });
}

Interaction Interaction::with_unitary(ComplexMatrix u, const Tolerances& tol) const {
  Interaction out(fact_, roles_, std::move(u), tol);
  out.seed = seed;
  return out;
}

Interaction Interaction::inverse() const { return with_unitary(u_.adjoint()); }

// ---------------------------------------------------------------------------
// Influence

namespace {

ComplexMatrix full_operator(const Interaction& ia, const LocalOperator& x, const char* what,
                            const Tolerances& tol) {
  if (!is_hermitian(x.op, tol)) {
    throw HermiticityError(std::string(what) + " must be Hermitian");
  }
  if (x.labels.empty()) {
    if (static_cast<std::size_t>(x.op.rows()) != ia.dim()) {
      throw DimensionError(std::string(what) + " is " + std::to_string(x.op.rows()) +
                           "-dimensional, the interaction acts on dimension " +
                           std::to_string(ia.dim()));
    }
    return x.op;
  }
  return tensor_embed(x.op, ia.factorization(), x.labels);
}

void require_disjoint(std::span<const std::string> a, std::span<const std::string> b) {
  for (const auto& x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) {
      throw LabelError("label '" + x + "' appears on both sides");
    }
  }
}

}  // namespace

InfluenceResult influence(const Interaction& ia, const LocalOperator& m, const LocalOperator& n,
                          const Tolerances& tol) {
  const ComplexMatrix mf = full_operator(ia, m, "M", tol);
  const ComplexMatrix nf = full_operator(ia, n, "N", tol);
  const ComplexMatrix pulled = heisenberg_pullback(ia.unitary(), nf, tol);
  InfluenceResult r;
  r.residual = commutator_norm(pulled, mf);
  r.threshold = commutator_threshold(pulled, mf, tol);
  r.influences = r.residual > r.threshold;
  return r;
}

bool influences(const Interaction& ia, const LocalOperator& m, const LocalOperator& n,
                const Tolerances& tol) {
  return influence(ia, m, n, tol).influences;
}

bool influences(const Interaction& ia, const ComplexMatrix& m, const ComplexMatrix& n,
                const Tolerances& tol) {
  return influence(ia, LocalOperator{m, {}}, LocalOperator{n, {}}, tol).influences;
}

InfluenceResult influences_subsystem(const Interaction& ia, std::span<const std::string> from,
                                     std::span<const std::string> to, const Tolerances& tol) {
  const Factorization& fact = ia.factorization();
  const auto src = fact.canonical(from);
  const auto dst = fact.canonical(to);
  if (src.empty() || dst.empty()) throw LabelError("influence needs non-empty label sets");
  require_disjoint(src, dst);

  // Pulled-back operators on `to` commute with B(from) (x) I exactly when they
  // have the form I_from (x) Q'. Measure the distance from that form.
  const auto others = fact.complement(src);
  std::vector<std::string> order = src;
  order.insert(order.end(), others.begin(), others.end());
  const auto d_from = static_cast<double>(fact.dim_of(src));
  const Factorization reordered = [&] {
    std::vector<Factor> fs;
    for (const auto& l : order) fs.push_back(fact.factors()[fact.index_of(l)]);
    return Factorization(std::move(fs));
  }();

  InfluenceResult r;
  bool first = true;
  const ComplexMatrix& u = ia.unitary();
  for (const auto& e : matrix_units(fact.dim_of(dst))) {
    const ComplexMatrix q = u.adjoint() * tensor_embed(e, fact, dst) * u;
    const ComplexMatrix qr = reorder_factors(q, fact, order);
    const ComplexMatrix reduced = partial_trace(qr, reordered, others) / d_from;
    const ComplexMatrix local = tensor_embed(reduced, reordered, others);
    const double res = (qr - local).norm();
    const double thr = tol.comm * std::max(1.0, q.norm());
    // keep the element closest to (or furthest past) its threshold
    if (first || res - thr > r.residual - r.threshold) {
      r.residual = res;
      r.threshold = thr;
      first = false;
    }
  }
  r.influences = r.residual > r.threshold;
  return r;
}

// ---------------------------------------------------------------------------
// Accessibility

std::vector<std::string> default_probe(const Interaction& ia) {
  return ia.labels_with(Role::probe1);
}

std::vector<std::string> probed_labels(const Interaction& ia, std::span<const std::string> probe) {
  const auto p = ia.factorization().canonical(probe);
  if (p.empty()) throw RoleError("probe must name at least one factor");
  auto rest = ia.factorization().complement(p);
  if (rest.empty()) throw RoleError("probe cannot cover every factor");
  return rest;
}

OperatorSubspace pullback_components(const Interaction& ia, std::span<const std::string> probe,
                                     const Tolerances& tol) {
  const Factorization& fact = ia.factorization();
  const auto p = fact.canonical(probe);
  const auto rest = probed_labels(ia, p);
  std::vector<std::string> order = rest;
  order.insert(order.end(), p.begin(), p.end());
  const ComplexMatrix u = reorder_factors(ia.unitary(), fact, order);
  const auto dr = static_cast<Eigen::Index>(fact.dim_of(rest));
  const auto dp = static_cast<Eigen::Index>(fact.dim_of(p));

  // U = sum_{g,h} U_gh (x) |g><h| over probe indices; then
  // U^dag (I (x) |c><d|) U = sum_{h,h'} U_ch^dag U_dh' (x) |h><h'|.
  auto block = [&](Eigen::Index g, Eigen::Index h) {
    ComplexMatrix b(dr, dr);
    for (Eigen::Index i = 0; i < dr; ++i) {
      for (Eigen::Index j = 0; j < dr; ++j) b(i, j) = u(i * dp + g, j * dp + h);
    }
    return b;
  };
  std::vector<ComplexMatrix> blocks;
  for (Eigen::Index g = 0; g < dp; ++g) {
    for (Eigen::Index h = 0; h < dp; ++h) blocks.push_back(block(g, h));
  }
  auto at = [&](Eigen::Index g, Eigen::Index h) -> const ComplexMatrix& {
    return blocks[static_cast<std::size_t>(g * dp + h)];
  };
  std::vector<ComplexMatrix> comps;
  comps.reserve(static_cast<std::size_t>(dp * dp * dp * dp));
  for (Eigen::Index c = 0; c < dp; ++c) {
    for (Eigen::Index d = 0; d < dp; ++d) {
      for (Eigen::Index h = 0; h < dp; ++h) {
        for (Eigen::Index h2 = 0; h2 < dp; ++h2) comps.push_back(at(c, h).adjoint() * at(d, h2));
      }
    }
  }
  return orthonormalize(comps, tol);
}

VnAlgebra noninfluencing_generators(const Interaction& ia, std::span<const std::string> probe,
                                    const Tolerances& tol) {
  return commutant(pullback_components(ia, probe, tol), tol);
}

bool is_accessible(const Interaction& ia, const ComplexMatrix& m,
                   std::span<const std::string> probe, const Tolerances& tol) {
  if (!is_hermitian(m, tol)) throw HermiticityError("observable must be Hermitian");
  const auto rest = probed_labels(ia, probe);
  if (static_cast<std::size_t>(m.rows()) != ia.factorization().dim_of(rest)) {
    throw DimensionError("observable must act on the probed factors (dimension " +
                         std::to_string(ia.factorization().dim_of(rest)) + ")");
  }
  const VnAlgebra g = noninfluencing_generators(ia, probe, tol);
  return std::all_of(g.space().basis().begin(), g.space().basis().end(),
                     [&](const ComplexMatrix& b) { return commutes(m, b, tol); });
}

bool is_accessible(const Interaction& ia, const ComplexMatrix& m, const Tolerances& tol) {
  return is_accessible(ia, m, default_probe(ia), tol);
}

VnAlgebra accessible_set(const Interaction& ia, std::span<const std::string> probe,
                         const Tolerances& tol) {
  return commutant(noninfluencing_generators(ia, probe, tol).space(), tol);
}

VnAlgebra accessible_set(const Interaction& ia, const Tolerances& tol) {
  return accessible_set(ia, default_probe(ia), tol);
}

VnAlgebra implementable_set(const Interaction& ia, std::span<const std::string> probe,
                            const Tolerances& tol) {
  return accessible_set(ia.inverse(), probe, tol);
}

VnAlgebra implementable_set(const Interaction& ia, const Tolerances& tol) {
  return implementable_set(ia, default_probe(ia), tol);
}

bool is_useful(const Interaction& ia, std::span<const std::string> probe, const Tolerances& tol) {
  return influences_subsystem(ia, probed_labels(ia, probe), probe, tol).influences;
}

bool is_useful(const Interaction& ia, const Tolerances& tol) {
  return is_useful(ia, default_probe(ia), tol);
}

Independence causally_independent(const Interaction& ia, const Tolerances& tol) {
  if (!ia.two_probe()) throw RoleError("causal independence needs a two-probe interaction");
  const auto p1 = ia.labels_with(Role::probe1);
  const auto p2 = ia.labels_with(Role::probe2);
  const InfluenceResult r12 = influences_subsystem(ia, p1, p2, tol);
  const InfluenceResult r21 = influences_subsystem(ia, p2, p1, tol);
  Independence out;
  out.p1_not_to_p2 = !r12.influences;
  out.p2_not_to_p1 = !r21.influences;
  out.residual_p1_to_p2 = r12.residual;
  out.residual_p2_to_p1 = r21.residual;
  return out;
}

VnAlgebra independently_accessible_set(const Interaction& ia, const Tolerances& tol) {
  if (!ia.two_probe()) throw RoleError("independent accessibility needs a two-probe interaction");
  const Factorization& fact = ia.factorization();
  const auto sys = ia.system_labels();
  const auto p1 = ia.labels_with(Role::probe1);
  const auto p2 = ia.labels_with(Role::probe2);

  // P1 probing S P2, and P2 probing S P1; keep what both see on S alone.
  auto on_system = [&](std::span<const std::string> probe) {
    const auto rest = probed_labels(ia, probe);
    const Factorization rest_fact = fact.restrict_to(rest);
    const VnAlgebra acc = accessible_set(ia, probe, tol);
    return restrict_to_factors(acc, rest_fact, sys, tol);
  };
  const VnAlgebra via_p1 = on_system(p1);
  const VnAlgebra via_p2 = on_system(p2);
  return intersect_algebras(via_p1, via_p2, tol);
}

// ---------------------------------------------------------------------------

AccessReport classify(const Interaction& ia, std::uint64_t seed, const Tolerances& tol) {
  const bool two = ia.two_probe();
  std::vector<std::string> probe = ia.labels_with(Role::probe1);
  std::optional<Independence> indep;
  double subthreshold = 0.0;
  auto note = [&](const InfluenceResult& r) {
    if (!r.influences) subthreshold = std::max(subthreshold, r.residual);
  };

  std::optional<VnAlgebra> acc;
  bool useful = false;
  std::vector<std::string> failures;
  if (two) {
    const auto p2 = ia.labels_with(Role::probe2);
    probe.insert(probe.end(), p2.begin(), p2.end());
    indep = causally_independent(ia, tol);
    if (indep->p1_not_to_p2) subthreshold = std::max(subthreshold, indep->residual_p1_to_p2);
    if (indep->p2_not_to_p1) subthreshold = std::max(subthreshold, indep->residual_p2_to_p1);
    acc = independently_accessible_set(ia, tol);
    useful = acc->dim() > 1;
  } else {
    acc = accessible_set(ia, probe, tol);
    const InfluenceResult u = influences_subsystem(ia, probed_labels(ia, probe), probe, tol);
    note(u);
    useful = u.influences;
    if (useful != (acc->dim() > 1)) {
      std::ostringstream os;
      os << "usefulness (" << (useful ? "true" : "false") << ") disagrees with accessible dimension "
         << acc->dim();
      failures.push_back(os.str());
    }
  }

  BlockStructure blocks = block_structure(*acc, seed, tol);
  const bool commutative = is_commutative(*acc, tol);
  // The commutativity argument only needs one probe not to influence the
  // other, and the construction is symmetric in the two probes.
  if (indep && (indep->p1_not_to_p2 || indep->p2_not_to_p1) && !commutative) {
    failures.push_back(
        "independently accessible algebra is not commutative although a probe does not "
        "influence the other");
  }
  const double max_comm = max_commutator_norm(*acc);
  return AccessReport{
      .mode = two ? Mode::two_probe : Mode::single_probe,
      .system_labels = ia.system_labels(),
      .probe_labels = probe,
      .accessible = std::move(*acc),
      .blocks = std::move(blocks),
      .commutative = commutative,
      .useful = useful,
      .independence = indep,
      .max_commutator = max_comm,
      .max_subthreshold_residual = subthreshold,
      .failures = std::move(failures),
  };
}

}  // namespace causalvn

#include "causalvn/report.hpp"

#include <cstdio>

namespace causalvn::report {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string inputs_digest(const std::vector<std::string>& contents) {
  std::uint64_t h = fnv1a64("");
  for (const auto& c : contents) {
    h = fnv1a64(std::to_string(c.size()) + ":", h);
    h = fnv1a64(c, h);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json tolerances_json(const Tolerances& tol) {
  return Json{{"rank", tol.rank},         {"comm", tol.comm},       {"contain", tol.contain},
              {"unitarity", tol.unitarity}, {"eig_gap", tol.eig_gap}, {"certify", tol.certify}};
}

Json algebra_json(const VnAlgebra& a, const Tolerances& tol) {
  Json basis = Json::array();
  for (const auto& h : hermitian_basis(a.space(), tol)) basis.push_back(io::matrix_to_json(h));
  const auto& r = a.residuals();
  return Json{{"dim_h", a.dim_h()},
              {"dim", a.dim()},
              {"basis", std::move(basis)},
              {"closure_residuals",
               {{"identity", r.identity}, {"adjoint", r.adjoint}, {"product", r.product}}}};
}

Json block_structure_json(const BlockStructure& bs) {
  Json blocks = Json::array();
  for (const auto& b : bs.blocks) {
    const auto rank = static_cast<long long>(std::llround(b.projection.trace().real()));
    blocks.push_back({{"d_left", b.d_left}, {"d_right", b.d_right}, {"rank", rank}});
  }
  return Json{{"blocks", std::move(blocks)},
              {"seed", bs.seed},
              {"attempts", bs.attempts},
              {"reconstruction_residual", bs.residual}};
}

Json independence_json(const Independence& ind) {
  return Json{{"p1_not_to_p2", ind.p1_not_to_p2},
              {"p2_not_to_p1", ind.p2_not_to_p1},
              {"residual_p1_to_p2", ind.residual_p1_to_p2},
              {"residual_p2_to_p1", ind.residual_p2_to_p1}};
}

Json access_report_json(const AccessReport& r, const Tolerances& tol) {
  Json flags{{"mode", r.mode == Mode::two_probe ? "two_probe" : "single_probe"},
             {"commutative", r.commutative},
             {"useful", r.useful},
             {"independence", r.independence ? independence_json(*r.independence) : Json(nullptr)},
             {"consistent", r.consistent()}};
  const Json alg = algebra_json(r.accessible, tol);
  return Json{{"system", r.system_labels},
              {"probes", r.probe_labels},
              {"accessible_dim", r.accessible.dim()},
              {"accessible_basis", alg["basis"]},
              {"block_structure", block_structure_json(r.blocks)},
              {"flags", std::move(flags)},
              {"residuals",
               {{"max_commutator", r.max_commutator},
                {"max_subthreshold", r.max_subthreshold_residual},
                {"closure", alg["closure_residuals"]}}},
              {"failures", r.failures}};
}

Json verification_json(const VerificationResult& v, const Tolerances& tol) {
  return Json{{"passed", v.passed},
              {"target_dim", v.target.dim()},
              {"achieved_dim", v.achieved.dim()},
              {"achieved_basis", algebra_json(v.achieved, tol)["basis"]},
              {"commutative", v.commutative},
              {"independence", v.independence ? independence_json(*v.independence) : Json(nullptr)},
              {"residuals",
               {{"target_in_achieved", v.residual_target_in_achieved},
                {"achieved_in_target", v.residual_achieved_in_target}}}};
}

Json make_report(std::string_view command, const std::string& digest,
                 const std::vector<std::uint64_t>& seeds, const Tolerances& tol) {
  return Json{{"schema_version", io::kSchemaVersion},
              {"command", std::string(command)},
              {"tool_version", kToolVersion},
              {"inputs_digest", digest},
              {"tolerances", tolerances_json(tol)},
              {"seeds", seeds}};
}

std::string render(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace causalvn::report

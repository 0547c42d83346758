// causalvn: command-line front end for the causal accessibility library.
//
// Exit codes: 0 success, 1 input error, 2 verification or consistency failure.

#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "causalvn/causal.hpp"
#include "causalvn/io.hpp"
#include "causalvn/report.hpp"
#include "causalvn/synth.hpp"
#include "causalvn/vnalg.hpp"

namespace cv = causalvn;
using cv::io::Json;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitVerify = 2;

struct Options {
  bool json = false;
  double tol_rank = cv::Tolerances{}.rank;
  double tol_comm = cv::Tolerances{}.comm;

  cv::Tolerances tolerances() const {
    cv::Tolerances t;
    t.rank = tol_rank;
    t.comm = tol_comm;
    return t;
  }
};

// Every file read is remembered for the inputs digest.
struct Inputs {
  std::vector<std::string> contents;

  Json json(const std::string& path) {
    contents.push_back(cv::io::read_text(path));
    return cv::io::parse_json(contents.back(), path);
  }
  cv::Interaction interaction(const std::string& path, const cv::Tolerances& tol) {
    return cv::io::to_interaction(cv::io::parse_interaction_file(json(path)), tol);
  }
  cv::io::OperatorFile operators(const std::string& path) {
    return cv::io::parse_operator_file(json(path));
  }
  std::string digest() const { return cv::report::inputs_digest(contents); }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

std::string blocks_text(const cv::BlockStructure& bs) {
  std::string s;
  for (const auto& b : bs.blocks) {
    s += (s.empty() ? "" : " ") + std::string("(") + std::to_string(b.d_left) + "," +
         std::to_string(b.d_right) + ")";
  }
  return s;
}

void emit(const Options& opt, const Json& report, const std::string& human) {
  if (opt.json) {
    std::cout << cv::report::render(report);
  } else {
    std::cout << human;
  }
}

std::vector<cv::ComplexMatrix> load_matrices(Inputs& in, const std::vector<std::string>& paths) {
  std::vector<cv::ComplexMatrix> mats;
  std::size_t d = 0;
  for (const auto& p : paths) {
    const auto f = in.operators(p);
    if (d != 0 && f.dims.total_dim() != d) {
      throw cv::DimensionError(p + ": operators act on C^" + std::to_string(f.dims.total_dim()) +
                               ", earlier files on C^" + std::to_string(d));
    }
    d = f.dims.total_dim();
    mats.insert(mats.end(), f.matrices.begin(), f.matrices.end());
  }
  return mats;
}

std::string algebra_text(const cv::VnAlgebra& a) {
  const auto& r = a.residuals();
  std::ostringstream os;
  os << "algebra on C^" << a.dim_h() << ": complex dimension " << a.dim() << "\n"
     << "closure residuals (identity, adjoint, product): " << num(r.identity) << ", "
     << num(r.adjoint) << ", " << num(r.product) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_analyze(const Options& opt, const std::string& path, std::uint64_t seed) {
  const auto tol = opt.tolerances();
  Inputs in;
  const auto ia = in.interaction(path, tol);
  const auto r = cv::classify(ia, seed, tol);

  Json rep = cv::report::make_report("analyze", in.digest(), {seed}, tol);
  rep.update(cv::report::access_report_json(r, tol));

  std::ostringstream os;
  const bool two = r.mode == cv::Mode::two_probe;
  os << "system: " << join(r.system_labels) << "   probes: " << join(r.probe_labels) << "\n";
  if (two) {
    os << "independently accessible algebra (observables accessible to each probe with the "
          "other grouped into the system): dim "
       << r.accessible.dim() << "\n";
  } else {
    os << "accessible algebra (observables whose every disturbance influences the probe): dim "
       << r.accessible.dim() << "\n";
  }
  os << "blocks (multiplicity, size): " << blocks_text(r.blocks) << "\n"
     << "commutative: " << yes_no(r.commutative) << "\n"
     << "useful (some system observable influences the probe): " << yes_no(r.useful) << "\n";
  if (r.independence) {
    os << "P1 does not influence P2: " << yes_no(r.independence->p1_not_to_p2)
       << "   P2 does not influence P1: " << yes_no(r.independence->p2_not_to_p1) << "\n";
    if (r.independence->both()) {
      os << "causally independent probes: accessible observables must commute\n";
    }
  }
  os << "largest residual judged zero: " << num(r.max_subthreshold_residual) << "\n";
  for (const auto& f : r.failures) os << "CONSISTENCY FAILURE: " << f << "\n";
  emit(opt, rep, os.str());
  return r.consistent() ? 0 : kExitVerify;
}

int cmd_influence(const Options& opt, const std::string& path, const std::string& from,
                  const std::string& to) {
  const auto tol = opt.tolerances();
  Inputs in;
  const auto ia = in.interaction(path, tol);
  const auto m = cv::io::to_local_operator(in.operators(from), ia);
  const auto n = cv::io::to_local_operator(in.operators(to), ia);
  const auto r = cv::influence(ia, m, n, tol);

  Json rep = cv::report::make_report("influence", in.digest(), {}, tol);
  rep["from"] = m.labels;
  rep["to"] = n.labels;
  rep["flags"] = {{"influences", r.influences}};
  rep["residuals"] = {{"commutator", r.residual}, {"threshold", r.threshold}};

  std::ostringstream os;
  os << (r.influences ? "true" : "false") << "\n"
     << "M on [" << join(m.labels) << "] influences N on [" << join(n.labels)
     << "] iff [U^dag N U, M] != 0\n"
     << "||[U^dag N U, M]||_F = " << num(r.residual) << " (threshold " << num(r.threshold) << ")\n";
  emit(opt, rep, os.str());
  return 0;
}

int cmd_accessible(const Options& opt, const std::string& path, std::vector<std::string> probe,
                   const std::string& observable, std::uint64_t seed) {
  const auto tol = opt.tolerances();
  Inputs in;
  const auto ia = in.interaction(path, tol);
  if (probe.empty()) probe = cv::default_probe(ia);
  probe = ia.factorization().canonical(probe);
  const auto probed = cv::probed_labels(ia, probe);
  const auto a = cv::accessible_set(ia, probe, tol);
  const auto bs = cv::block_structure(a, seed, tol);

  Json rep = cv::report::make_report("accessible", in.digest(), {seed}, tol);
  rep["probe"] = probe;
  rep["probed"] = probed;
  const Json alg = cv::report::algebra_json(a, tol);
  rep["accessible_dim"] = a.dim();
  rep["accessible_basis"] = alg["basis"];
  rep["block_structure"] = cv::report::block_structure_json(bs);
  rep["flags"] = {{"commutative", cv::is_commutative(a, tol)}};
  rep["residuals"] = {{"closure", alg["closure_residuals"]}};

  std::ostringstream os;
  os << "probe: " << join(probe) << "   probed: " << join(probed) << "\n"
     << "accessible algebra: dim " << a.dim() << ", blocks " << blocks_text(bs) << "\n";
  if (!observable.empty()) {
    const auto m = cv::io::to_local_operator(in.operators(observable), ia);
    if (m.labels != probed) {
      throw cv::LabelError(observable + ": observable must act on exactly the probed factors [" +
                           join(probed) + "]");
    }
    const bool acc = cv::is_accessible(ia, m.op, probe, tol);
    rep["flags"]["observable_accessible"] = acc;
    os << "observable accessible (every non-commuting generator acting on it influences the probe): "
       << yes_no(acc) << "\n";
  }
  emit(opt, rep, os.str());
  return 0;
}

int cmd_algebra(const Options& opt, const std::string& sub, const std::vector<std::string>& paths,
                std::uint64_t seed) {
  const auto tol = opt.tolerances();
  Inputs in;
  const auto mats = load_matrices(in, paths);
  const std::size_t d = static_cast<std::size_t>(mats.front().rows());

  std::optional<cv::VnAlgebra> result;
  std::optional<cv::BlockStructure> bs;
  if (sub == "generate") {
    result = cv::generate(mats, d, tol);
  } else if (sub == "commutant") {
    const auto span = cv::orthonormalize(mats, tol);
    if (!cv::is_star_closed(span, tol)) {
      throw cv::NotStarClosedError("the span of the inputs is not closed under adjoints");
    }
    result = cv::commutant(span, tol);
  } else if (sub == "center") {
    result = cv::center(cv::generate(mats, d, tol), tol);
  } else {
    result = cv::generate(mats, d, tol);
    bs = cv::block_structure(*result, seed, tol);
  }

  Json rep = cv::report::make_report("algebra " + sub, in.digest(),
                                     bs ? std::vector<std::uint64_t>{seed} : std::vector<std::uint64_t>{}, tol);
  const Json alg = cv::report::algebra_json(*result, tol);
  rep["dim_h"] = alg["dim_h"];
  rep["dim"] = alg["dim"];
  rep["basis"] = alg["basis"];
  rep["flags"] = {{"commutative", cv::is_commutative(*result, tol)}, {"certified", true}};
  rep["residuals"] = {{"closure", alg["closure_residuals"]}};
  std::string human = algebra_text(*result);
  human += std::string("commutative: ") + yes_no(cv::is_commutative(*result, tol)) + "\n";
  if (bs) {
    rep["block_structure"] = cv::report::block_structure_json(*bs);
    human += "blocks (multiplicity, size): " + blocks_text(*bs) + "\n" +
             "reconstruction residual: " + num(bs->residual) + "\n";
  }
  emit(opt, rep, human);
  return 0;
}

struct TargetArgs {
  std::string algebra;
  std::string pvm;
};

std::variant<cv::VnAlgebra, cv::Pvm> load_target(Inputs& in, const TargetArgs& t,
                                                 const cv::Tolerances& tol) {
  if (!t.algebra.empty()) {
    const auto mats = load_matrices(in, {t.algebra});
    return cv::generate(mats, static_cast<std::size_t>(mats.front().rows()), tol);
  }
  return cv::Pvm(load_matrices(in, {t.pvm}), tol);
}

cv::VnAlgebra target_algebra(const std::variant<cv::VnAlgebra, cv::Pvm>& t, const cv::Tolerances& tol) {
  if (const auto* a = std::get_if<cv::VnAlgebra>(&t)) return *a;
  return std::get<cv::Pvm>(t).algebra(tol);
}

std::string verification_text(const cv::VerificationResult& v) {
  std::ostringstream os;
  os << "verification: " << (v.passed ? "PASS" : "FAIL") << "  target dim " << v.target.dim()
     << ", achieved dim " << v.achieved.dim() << ", residual " << num(v.residual()) << "\n"
     << "achieved algebra commutative: " << yes_no(v.commutative) << "\n";
  if (v.independence) {
    os << "causally independent probes: " << yes_no(v.independence->both()) << "\n";
  }
  return os.str();
}

int cmd_synthesize(const Options& opt, const TargetArgs& targ, std::string mode_name,
                   std::uint64_t seed, const std::string& out, double t,
                   const std::vector<double>& eigenvalues, std::size_t probe_dim) {
  const auto tol = opt.tolerances();
  Inputs in;
  auto target = load_target(in, targ, tol);
  if (mode_name.empty()) mode_name = targ.pvm.empty() ? "block_tagged_swap" : "classical_two_probe";
  const cv::SynthMode mode = cv::synth_mode_from_string(mode_name);

  cv::SynthSpec spec{.target = target, .mode = mode, .seed = seed, .t = t,
                     .eigenvalues = eigenvalues, .probe_dim = probe_dim};
  const cv::VnAlgebra goal = target_algebra(target, tol);

  Json rep = cv::report::make_report("synthesize", in.digest(), {seed}, tol);
  rep["mode"] = cv::to_string(mode);
  rep["certified_mode"] = mode != cv::SynthMode::paper_literal;
  try {
    const cv::Interaction ia = cv::synthesize(spec, tol);
    const auto v = cv::verify_realization(ia, goal, tol);
    const std::string file = cv::report::render(cv::io::to_json(cv::io::from_interaction(ia)));
    if (!out.empty()) cv::io::write_text(out, file);

    Json factors = Json::array();
    for (std::size_t i = 0; i < ia.factorization().size(); ++i) {
      const auto& f = ia.factorization().factors()[i];
      factors.push_back({{"label", f.label}, {"dim", f.dim}, {"role", cv::to_string(ia.roles()[i])}});
    }
    rep["factors"] = std::move(factors);
    rep["interaction_digest"] = cv::report::inputs_digest({file});
    rep["verification"] = cv::report::verification_json(v, tol);

    std::ostringstream os;
    os << "mode: " << cv::to_string(mode) << "   seed: " << seed << "\n"
       << "interaction on";
    for (const auto& f : ia.factorization().factors()) {
      os << " " << f.label << "(" << f.dim << ", " << cv::to_string(ia.role_of(f.label)) << ")";
    }
    os << "\n" << verification_text(v);
    if (mode == cv::SynthMode::paper_literal && !v.passed) {
      os << "note: paper_literal carries no certification; the outcome above is recorded\n";
    }
    if (!out.empty()) os << "wrote " << out << "\n";
    emit(opt, rep, os.str());
    return v.passed || mode == cv::SynthMode::paper_literal ? 0 : kExitVerify;
  } catch (const cv::SynthesisError& e) {
    rep["error"] = e.what();
    if (e.result()) rep["verification"] = cv::report::verification_json(*e.result(), tol);
    std::string human = std::string("synthesis failed certification: ") + e.what() + "\n";
    if (e.result()) human += verification_text(*e.result());
    emit(opt, rep, human);
    return kExitVerify;
  }
}

int cmd_verify(const Options& opt, const std::string& path, const TargetArgs& targ) {
  const auto tol = opt.tolerances();
  Inputs in;
  const auto ia = in.interaction(path, tol);
  const auto goal = target_algebra(load_target(in, targ, tol), tol);
  const auto v = cv::verify_realization(ia, goal, tol);

  Json rep = cv::report::make_report("verify", in.digest(), {}, tol);
  rep["verification"] = cv::report::verification_json(v, tol);
  emit(opt, rep, verification_text(v));
  return v.passed ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal accessibility analysis of unitary interactions"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_flag("--json", opt.json, "Machine-readable ReportFile on stdout");
  app.add_option("--tol-rank", opt.tol_rank, "Relative singular value cutoff")
      ->envname("CAUSALVN_TOL_RANK")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol-comm", opt.tol_comm, "Relative zero-commutator threshold")
      ->envname("CAUSALVN_TOL_COMM")
      ->check(CLI::PositiveNumber);

  std::string path, from, to, observable, out, mode;
  std::uint64_t seed = 0;
  std::vector<std::string> probe, paths;
  TargetArgs targ;
  double t = 1.0;
  std::vector<double> eigenvalues;
  std::size_t probe_dim = 2;
  std::function<int()> run;

  auto* analyze = app.add_subcommand("analyze", "Classify an interaction: accessible algebra, blocks, flags");
  analyze->add_option("interaction", path, "InteractionFile")->required();
  analyze->add_option("--seed", seed, "Seed for the block decomposition");
  analyze->callback([&] { run = [&] { return cmd_analyze(opt, path, seed); }; });

  auto* infl = app.add_subcommand("influence", "Decide whether M influences N through U");
  infl->add_option("interaction", path, "InteractionFile")->required();
  infl->add_option("--from", from, "OperatorFile for M")->required();
  infl->add_option("--to", to, "OperatorFile for N")->required();
  infl->callback([&] { run = [&] { return cmd_influence(opt, path, from, to); }; });

  auto* acc = app.add_subcommand("accessible", "Accessible algebra for a chosen probe");
  acc->add_option("interaction", path, "InteractionFile")->required();
  acc->add_option("--probe", probe, "Probe factor labels (default: the probe1 factors)");
  acc->add_option("--observable", observable, "OperatorFile to test for accessibility");
  acc->add_option("--seed", seed, "Seed for the block decomposition");
  acc->callback([&] { run = [&] { return cmd_accessible(opt, path, probe, observable, seed); }; });

  auto* alg = app.add_subcommand("algebra", "Operator algebra utilities");
  alg->require_subcommand(1);
  const std::pair<const char*, const char*> algebra_cmds[] = {
      {"generate", "Smallest algebra containing the operators"},
      {"commutant", "Operators commuting with a star-closed span"},
      {"center", "Center of the generated algebra"},
      {"blocks", "Block decomposition of the generated algebra"}};
  for (const auto& [name, help] : algebra_cmds) {
    auto* sub = alg->add_subcommand(name, help);
    sub->add_option("operators", paths, "OperatorFiles")->required();
    if (std::string(name) == "blocks") sub->add_option("--seed", seed, "Seed for generic elements");
    sub->callback([&, name] { run = [&, name] { return cmd_algebra(opt, name, paths, seed); }; });
  }

  auto* syn = app.add_subcommand("synthesize", "Build an interaction realizing an algebra or PVM");
  auto* o_alg = syn->add_option("--algebra", targ.algebra, "OperatorFile with algebra generators");
  auto* o_pvm = syn->add_option("--pvm", targ.pvm, "OperatorFile with PVM projectors");
  o_alg->excludes(o_pvm);
  syn->add_option("--mode", mode,
                  "block_tagged_swap | paper_literal | classical_two_probe | coherent_control");
  syn->add_option("--seed", seed, "Seed for padding and decompositions");
  syn->add_option("--out", out, "Write the InteractionFile here");
  syn->add_option("--t", t, "Coherent-control time");
  syn->add_option("--eigenvalues", eigenvalues, "Coherent-control eigenvalues m_k");
  syn->add_option("--probe-dim", probe_dim, "Coherent-control probe dimension");
  syn->callback([&] {
    if (targ.algebra.empty() == targ.pvm.empty()) throw CLI::ValidationError("one of --algebra or --pvm is required");
    run = [&] { return cmd_synthesize(opt, targ, mode, seed, out, t, eigenvalues, probe_dim); };
  });

  auto* ver = app.add_subcommand("verify", "Round-trip check of an interaction against a target");
  ver->add_option("interaction", path, "InteractionFile")->required();
  auto* v_alg = ver->add_option("--algebra", targ.algebra, "OperatorFile with algebra generators");
  auto* v_pvm = ver->add_option("--pvm", targ.pvm, "OperatorFile with PVM projectors");
  v_alg->excludes(v_pvm);
  ver->callback([&] {
    if (targ.algebra.empty() == targ.pvm.empty()) throw CLI::ValidationError("one of --algebra or --pvm is required");
    run = [&] { return cmd_verify(opt, path, targ); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    return run();
  } catch (const cv::VerificationFailure& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return kExitVerify;
  } catch (const cv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

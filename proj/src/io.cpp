#include "causalvn/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "causalvn/gates.hpp"

namespace causalvn::io {

namespace {

std::string at(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

std::string at(const std::string& where, std::size_t i) {
  return where + "[" + std::to_string(i) + "]";
}

const Json& require(const Json& j, const std::string& where, const char* key) {
  if (!j.is_object()) throw ParseError(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(at(where, key), "missing required field");
  return *it;
}

double as_double(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where, "number is not finite");
  return v;
}

std::size_t as_size(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ParseError(where, "expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where, "expected a string");
  return j.get<std::string>();
}

int schema_version(const Json& j) {
  const Json& v = require(j, "", "schema_version");
  if (!v.is_number_integer()) throw ParseError("schema_version", "expected an integer");
  const int version = v.get<int>();
  if (version != kSchemaVersion) {
    throw ParseError("schema_version", "unsupported version " + std::to_string(version) +
                                           " (expected " + std::to_string(kSchemaVersion) + ")");
  }
  return version;
}

// Re-raises library validation errors with the field they came from.
template <class F>
auto with_where(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(where, e.what());
  }
}

Factor parse_factor(const Json& j, const std::string& where) {
  return Factor{as_string(require(j, where, "label"), at(where, "label")),
                as_size(require(j, where, "dim"), at(where, "dim"))};
}

std::vector<std::string> parse_wires(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError(where, "expected a non-empty list of labels");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], at(where, i)));
  return out;
}

const Json* param(const GateStep& step, const char* key) {
  auto it = step.params.find(key);
  return it == step.params.end() ? nullptr : &*it;
}

ComplexMatrix local_gate(const GateStep& step, std::span<const std::size_t> dims,
                         const std::string& where);

ComplexMatrix gate_from_params(const Json& j, std::span<const std::size_t> dims,
                               const std::string& where) {
  // either a bare matrix or a nested {gate, params}
  if (j.is_array()) return matrix_from_json(j, where);
  GateStep inner;
  inner.gate = as_string(require(j, where, "gate"), at(where, "gate"));
  if (auto it = j.find("params"); it != j.end()) inner.params = *it;
  return local_gate(inner, dims, where);
}

void want_wires(const GateStep& step, std::span<const std::size_t> dims, std::size_t n,
                const std::string& where) {
  if (dims.size() != n) {
    throw ParseError(at(where, "wires"), "gate '" + step.gate + "' takes " + std::to_string(n) +
                                             " wire(s), got " + std::to_string(dims.size()));
  }
}

ComplexMatrix local_gate(const GateStep& step, std::span<const std::size_t> dims,
                         const std::string& where) {
  std::size_t d = 1;
  for (auto x : dims) d *= x;
  const std::string& g = step.gate;
  const std::string pw = at(where, "params");

  if (g == "identity") return gates::identity(d);
  if (g == "swap") {
    want_wires(step, dims, 2, where);
    if (dims[0] != dims[1]) throw ParseError(at(where, "wires"), "swap needs equal dimensions");
    return gates::swap(dims[0]);
  }
  if (g == "cnot") {
    want_wires(step, dims, 2, where);
    return gates::cnot(dims[0], dims[1]);
  }
  if (g == "shift") {
    want_wires(step, dims, 1, where);
    long power = 1;
    if (const Json* p = param(step, "power")) {
      if (!p->is_number_integer()) throw ParseError(at(pw, "power"), "expected an integer");
      power = p->get<long>();
    }
    return gates::shift(d, power);
  }
  if (g == "phase") {
    want_wires(step, dims, 1, where);
    const Json* p = param(step, "angles");
    if (!p || !p->is_array() || p->size() != d) {
      throw ParseError(at(pw, "angles"), "expected " + std::to_string(d) + " angles");
    }
    std::vector<double> angles;
    for (std::size_t i = 0; i < d; ++i) angles.push_back(as_double((*p)[i], at(at(pw, "angles"), i)));
    return gates::phase(angles);
  }
  if (g == "hadamard") {
    want_wires(step, dims, 1, where);
    return gates::hadamard(d);
  }
  if (g == "x" || g == "y" || g == "z") {
    want_wires(step, dims, 1, where);
    if (d != 2) throw ParseError(at(where, "wires"), "Pauli gates act on a qubit");
    return g == "x" ? gates::pauli_x() : g == "y" ? gates::pauli_y() : gates::pauli_z();
  }
  if (g == "controlled") {
    if (dims.size() < 2) throw ParseError(at(where, "wires"), "controlled needs a control and a target");
    const Json* u = param(step, "u");
    if (!u) throw ParseError(at(pw, "u"), "missing required field");
    const std::span<const std::size_t> target = dims.subspan(1);
    const ComplexMatrix tu = gate_from_params(*u, target, at(pw, "u"));
    std::size_t value = 1;
    if (const Json* v = param(step, "control_value")) value = as_size(*v, at(pw, "control_value"));
    return with_where(where, [&] { return gates::controlled(dims[0], tu, value); });
  }
  if (g == "block_direct_sum") {
    const Json* b = param(step, "blocks");
    if (!b || !b->is_array() || b->empty()) throw ParseError(at(pw, "blocks"), "expected a list of matrices");
    std::vector<ComplexMatrix> blocks;
    for (std::size_t i = 0; i < b->size(); ++i) {
      blocks.push_back(matrix_from_json((*b)[i], at(at(pw, "blocks"), i)));
    }
    return with_where(where, [&] { return gates::block_direct_sum(blocks); });
  }
  if (g == "matrix") {
    const Json* m = param(step, "matrix");
    if (!m) throw ParseError(at(pw, "matrix"), "missing required field");
    return matrix_from_json(*m, at(pw, "matrix"));
  }
  throw ParseError(at(where, "gate"), "unknown gate '" + g + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// matrices

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError(where, "expected a non-empty list of rows");
  const std::size_t n_rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw ParseError(at(where, 0), "expected a non-empty row");
  const std::size_t n_cols = j[0].size();
  ComplexMatrix m(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
  for (std::size_t i = 0; i < n_rows; ++i) {
    const std::string rw = at(where, i);
    if (!j[i].is_array() || j[i].size() != n_cols) {
      throw ParseError(rw, "expected a row of " + std::to_string(n_cols) + " entries");
    }
    for (std::size_t k = 0; k < n_cols; ++k) {
      const Json& e = j[i][k];
      const std::string ew = at(rw, k);
      if (!e.is_array() || e.size() != 2) throw ParseError(ew, "expected a [re, im] pair");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          Complex(as_double(e[0], at(ew, 0)), as_double(e[1], at(ew, 1)));
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// OperatorFile

OperatorFile parse_operator_file(const Json& j) {
  if (!j.is_object()) throw ParseError("", "expected a JSON object");
  OperatorFile f;
  f.schema_version = schema_version(j);

  const Json& dims = require(j, "", "dims");
  if (!dims.is_array() || dims.empty()) throw ParseError("dims", "expected a non-empty list");
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < dims.size(); ++i) factors.push_back(parse_factor(dims[i], at("dims", i)));
  f.dims = with_where("dims", [&] { return Factorization(std::move(factors)); });
  const auto d = static_cast<Eigen::Index>(f.dims.total_dim());

  const bool single = j.contains("matrix");
  const bool many = j.contains("matrices");
  if (single == many) throw ParseError("", "exactly one of 'matrix' or 'matrices' is required");
  auto check = [&](const ComplexMatrix& m, const std::string& where) {
    if (m.rows() != d || m.cols() != d) {
      throw ParseError(where, "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                  " but dims give " + std::to_string(d));
    }
  };
  if (single) {
    f.matrices.push_back(matrix_from_json(j["matrix"], "matrix"));
    check(f.matrices.back(), "matrix");
  } else {
    const Json& ms = j["matrices"];
    if (!ms.is_array() || ms.empty()) throw ParseError("matrices", "expected a non-empty list");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      f.matrices.push_back(matrix_from_json(ms[i], at("matrices", i)));
      check(f.matrices.back(), at("matrices", i));
    }
  }

  if (auto it = j.find("hermitian_hint"); it != j.end()) {
    if (!it->is_boolean()) throw ParseError("hermitian_hint", "expected a boolean");
    f.hermitian_hint = it->get<bool>();
    if (*f.hermitian_hint) {
      for (std::size_t i = 0; i < f.matrices.size(); ++i) {
        if (!is_hermitian(f.matrices[i])) {
          throw ParseError(single ? "matrix" : at("matrices", i), "hermitian_hint is set but the matrix is not Hermitian");
        }
      }
    }
  }
  return f;
}

Json to_json(const OperatorFile& f) {
  Json j;
  j["schema_version"] = f.schema_version;
  Json dims = Json::array();
  for (const auto& fa : f.dims.factors()) dims.push_back({{"label", fa.label}, {"dim", fa.dim}});
  j["dims"] = std::move(dims);
  if (f.matrices.size() == 1) {
    j["matrix"] = matrix_to_json(f.matrices.front());
  } else {
    Json ms = Json::array();
    for (const auto& m : f.matrices) ms.push_back(matrix_to_json(m));
    j["matrices"] = std::move(ms);
  }
  if (f.hermitian_hint) j["hermitian_hint"] = *f.hermitian_hint;
  return j;
}

// ---------------------------------------------------------------------------
// InteractionFile

InteractionFile parse_interaction_file(const Json& j) {
  if (!j.is_object()) throw ParseError("", "expected a JSON object");
  InteractionFile f;
  f.schema_version = schema_version(j);

  const Json& fs = require(j, "", "factors");
  if (!fs.is_array() || fs.empty()) throw ParseError("factors", "expected a non-empty list");
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const std::string w = at("factors", i);
    factors.push_back(parse_factor(fs[i], w));
    const std::string role = as_string(require(fs[i], w, "role"), at(w, "role"));
    f.roles.push_back(with_where(at(w, "role"), [&] { return role_from_string(role); }));
  }
  f.factors = with_where("factors", [&] { return Factorization(std::move(factors)); });

  const Json& u = require(j, "", "unitary");
  if (u.is_object()) {
    f.matrix = matrix_from_json(require(u, "unitary", "matrix"), "unitary.matrix");
  } else if (u.is_array()) {
    if (u.empty()) throw ParseError("unitary", "gate list is empty");
    for (std::size_t i = 0; i < u.size(); ++i) {
      const std::string w = at("unitary", i);
      GateStep step;
      step.gate = as_string(require(u[i], w, "gate"), at(w, "gate"));
      step.wires = parse_wires(require(u[i], w, "wires"), at(w, "wires"));
      if (auto it = u[i].find("params"); it != u[i].end()) {
        if (!it->is_object()) throw ParseError(at(w, "params"), "expected an object");
        step.params = *it;
      }
      f.gates.push_back(std::move(step));
    }
  } else {
    throw ParseError("unitary", "expected {\"matrix\": ...} or a list of gates");
  }

  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) throw ParseError("seed", "expected a non-negative integer");
    f.seed = it->get<std::uint64_t>();
  }
  return f;
}

Json to_json(const InteractionFile& f) {
  Json j;
  j["schema_version"] = f.schema_version;
  Json fs = Json::array();
  for (std::size_t i = 0; i < f.factors.size(); ++i) {
    const auto& fa = f.factors.factors()[i];
    fs.push_back({{"label", fa.label}, {"dim", fa.dim}, {"role", to_string(f.roles[i])}});
  }
  j["factors"] = std::move(fs);
  if (f.matrix) {
    j["unitary"] = {{"matrix", matrix_to_json(*f.matrix)}};
  } else {
    Json steps = Json::array();
    for (const auto& s : f.gates) {
      Json step = {{"gate", s.gate}, {"wires", s.wires}};
      if (!s.params.empty()) step["params"] = s.params;
      steps.push_back(std::move(step));
    }
    j["unitary"] = std::move(steps);
  }
  if (f.seed) j["seed"] = *f.seed;
  return j;
}

ComplexMatrix expand_gate(const GateStep& step, const Factorization& fact) {
  std::vector<std::size_t> dims;
  for (const auto& w : step.wires) {
    if (!fact.contains(w)) throw LabelError("gate '" + step.gate + "' names unknown wire '" + w + "'");
    dims.push_back(fact.dim_of(w));
  }
  const ComplexMatrix local = local_gate(step, dims, "");
  return embed_on_wires(local, fact, step.wires);
}

ComplexMatrix compose_unitary(const InteractionFile& f) {
  const auto d = static_cast<Eigen::Index>(f.factors.total_dim());
  if (f.matrix) {
    if (f.matrix->rows() != d || f.matrix->cols() != d) {
      throw ParseError("unitary.matrix", "matrix is " + std::to_string(f.matrix->rows()) + "x" +
                                             std::to_string(f.matrix->cols()) +
                                             " but the factors give " + std::to_string(d));
    }
    return *f.matrix;
  }
  ComplexMatrix u = ComplexMatrix::Identity(d, d);
  for (std::size_t i = 0; i < f.gates.size(); ++i) {
    const std::string w = at("unitary", i);
    u = with_where(w, [&] {
      std::vector<std::size_t> dims;
      for (std::size_t k = 0; k < f.gates[i].wires.size(); ++k) {
        const auto& label = f.gates[i].wires[k];
        if (!f.factors.contains(label)) {
          throw ParseError(at(at(w, "wires"), k), "unknown factor '" + label + "'");
        }
        dims.push_back(f.factors.dim_of(label));
      }
      const ComplexMatrix local = local_gate(f.gates[i], dims, w);
      return ComplexMatrix(embed_on_wires(local, f.factors, f.gates[i].wires) * u);
    });
  }
  return u;
}

Interaction to_interaction(const InteractionFile& f, const Tolerances& tol) {
  const ComplexMatrix u = compose_unitary(f);
  Interaction ia = with_where("unitary", [&] { return Interaction(f.factors, f.roles, u, tol); });
  ia.seed = f.seed;
  return ia;
}

InteractionFile from_interaction(const Interaction& ia) {
  InteractionFile f;
  f.factors = ia.factorization();
  f.roles = ia.roles();
  f.matrix = ia.unitary();
  f.seed = ia.seed;
  return f;
}

LocalOperator to_local_operator(const OperatorFile& f, const Interaction& ia) {
  if (f.matrices.size() != 1) throw ParseError("matrices", "expected a single operator");
  const Factorization& fact = ia.factorization();
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < f.dims.size(); ++i) {
    const auto& fa = f.dims.factors()[i];
    const std::string w = at(at("dims", i), "label");
    if (!fact.contains(fa.label)) throw ParseError(w, "interaction has no factor '" + fa.label + "'");
    if (fact.dim_of(fa.label) != fa.dim) {
      throw ParseError(at(at("dims", i), "dim"), "factor '" + fa.label + "' has dimension " +
                                                     std::to_string(fact.dim_of(fa.label)) +
                                                     " in the interaction");
    }
    labels.push_back(fa.label);
  }
  const auto canonical = fact.canonical(labels);
  return LocalOperator{reorder_factors(f.matrices.front(), f.dims, canonical), canonical};
}

// ---------------------------------------------------------------------------
// files

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // locate the byte offset as line:column
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col),
                     "invalid JSON");
  }
}

Json read_json(const std::filesystem::path& path) {
  return parse_json(read_text(path), path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace causalvn::io

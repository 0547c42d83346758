#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "causalvn/causal.hpp"
#include "causalvn/opcore.hpp"

namespace causalvn::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Matrices are row-major nested arrays of [re, im] pairs.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& where);

// One or more operators on a labelled space. A file holds either a single
// "matrix" or a list under "matrices" (generators, algebra bases, PVMs).
struct OperatorFile {
  int schema_version = kSchemaVersion;
  Factorization dims;
  std::vector<ComplexMatrix> matrices;
  std::optional<bool> hermitian_hint;
};

OperatorFile parse_operator_file(const Json& j);
Json to_json(const OperatorFile& f);

// One step of a gate list: `gate` acting on `wires` (in the order the gate's
// own tensor factors are listed).
struct GateStep {
  std::string gate;
  std::vector<std::string> wires;
  Json params = Json::object();
};

struct InteractionFile {
  int schema_version = kSchemaVersion;
  Factorization factors;
  std::vector<Role> roles;
  // Exactly one of the two is used: an explicit matrix, or gates in
  // application order (the first step acts first, U = G_n ... G_1).
  std::optional<ComplexMatrix> matrix;
  std::vector<GateStep> gates;
  std::optional<std::uint64_t> seed;
};

InteractionFile parse_interaction_file(const Json& j);
Json to_json(const InteractionFile& f);

// Matrix of one gate step on the full space.
ComplexMatrix expand_gate(const GateStep& step, const Factorization& fact);
ComplexMatrix compose_unitary(const InteractionFile& f);
Interaction to_interaction(const InteractionFile& f, const Tolerances& tol = {});
InteractionFile from_interaction(const Interaction& ia);

// LocalOperator on the factors named by `f.dims`, which must match the
// interaction's labels and dimensions. Only single-matrix files qualify.
LocalOperator to_local_operator(const OperatorFile& f, const Interaction& ia);

std::string read_text(const std::filesystem::path& path);
// Parses JSON; syntax errors become ParseError with the line and column.
Json parse_json(const std::string& text, const std::string& source);
Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace causalvn::io

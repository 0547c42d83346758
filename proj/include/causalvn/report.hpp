#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "causalvn/causal.hpp"
#include "causalvn/io.hpp"
#include "causalvn/synth.hpp"
#include "causalvn/vnalg.hpp"

namespace causalvn::report {

using io::Json;

inline constexpr const char* kToolVersion = "causalvn 0.1.0";

// FNV-1a, 64 bit. Chain calls by passing the previous hash.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
// Digest of the input files' bytes, each prefixed by its length.
std::string inputs_digest(const std::vector<std::string>& contents);

Json tolerances_json(const Tolerances& tol);
// Hermitian basis of the algebra plus its dimension and closure residuals.
Json algebra_json(const VnAlgebra& a, const Tolerances& tol = {});
Json block_structure_json(const BlockStructure& bs);
Json independence_json(const Independence& ind);
Json access_report_json(const AccessReport& r, const Tolerances& tol = {});
Json verification_json(const VerificationResult& v, const Tolerances& tol = {});

// ReportFile skeleton; the command's own fields are appended after `seeds`.
Json make_report(std::string_view command, const std::string& digest,
                 const std::vector<std::uint64_t>& seeds, const Tolerances& tol);
// Deterministic rendering: two-space indent, trailing newline.
std::string render(const Json& j);

}  // namespace causalvn::report

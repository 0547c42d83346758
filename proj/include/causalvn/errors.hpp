#pragma once

#include <stdexcept>
#include <string>

namespace causalvn {

// Base of every error raised by the library. The CLI maps these onto exit
// codes: VerificationFailure -> 2, everything else -> 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class LabelError : public Error {
 public:
  using Error::Error;
};

class UnitarityError : public Error {
 public:
  using Error::Error;
};

class HermiticityError : public Error {
 public:
  using Error::Error;
};

class NotStarClosedError : public Error {
 public:
  using Error::Error;
};

class RoleError : public Error {
 public:
  using Error::Error;
};

// A subspace that was expected to be a von Neumann algebra failed one of the
// identity / adjoint / product closure checks.
class CertificationError : public Error {
 public:
  using Error::Error;
};

class PvmError : public Error {
 public:
  using Error::Error;
};

class DecompositionError : public Error {
 public:
  using Error::Error;
};

class DegenerateControlError : public Error {
 public:
  DegenerateControlError(std::size_t k, std::size_t l, const std::string& what)
      : Error(what), k_(k), l_(l) {}
  std::size_t k() const { return k_; }
  std::size_t l() const { return l_; }

 private:
  std::size_t k_;
  std::size_t l_;
};

// Malformed input file. `where` names the offending JSON field path.
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// A computed result contradicts a structural guarantee (e.g. independent
// probes yielding a non-commutative algebra).
class VerificationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace causalvn

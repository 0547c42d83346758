#pragma once

#include <doctest.h>

#include "causalvn/causal.hpp"
#include "causalvn/gates.hpp"
#include "causalvn/opcore.hpp"
#include "causalvn/random.hpp"
#include "causalvn/vnalg.hpp"

namespace testing {

using causalvn::ComplexMatrix;
using causalvn::Complex;

inline ComplexMatrix I2() { return causalvn::gates::identity(2); }
inline ComplexMatrix X() { return causalvn::gates::pauli_x(); }
inline ComplexMatrix Y() { return causalvn::gates::pauli_y(); }
inline ComplexMatrix Z() { return causalvn::gates::pauli_z(); }

inline ComplexMatrix ket_bra(std::size_t d, std::size_t i, std::size_t j) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return m;
}

inline causalvn::Interaction two_party(const ComplexMatrix& u, std::size_t ds, std::size_t dp) {
  return causalvn::Interaction(causalvn::Factorization({{"S", ds}, {"P", dp}}),
                               {causalvn::Role::system, causalvn::Role::probe1}, u);
}

inline causalvn::Interaction three_party(const ComplexMatrix& u, std::size_t ds, std::size_t d1,
                                         std::size_t d2) {
  return causalvn::Interaction(causalvn::Factorization({{"S", ds}, {"P1", d1}, {"P2", d2}}),
                               {causalvn::Role::system, causalvn::Role::probe1, causalvn::Role::probe2},
                               u);
}

inline causalvn::VnAlgebra span_algebra(const std::vector<ComplexMatrix>& ms) {
  return causalvn::VnAlgebra::certify(causalvn::orthonormalize(ms));
}

}  // namespace testing

#pragma once

#include <span>

#include "causalvn/opcore.hpp"

namespace causalvn::gates {

// Textbook gates on qudits. Dimensions are the wire dimensions in wire order.

ComplexMatrix identity(std::size_t d);
// |a>|b> -> |b>|a> on two wires of equal dimension.
ComplexMatrix swap(std::size_t d);
// |k>|m> -> |k>|m + k mod d_target>.
ComplexMatrix cnot(std::size_t d_control, std::size_t d_target);
// |j> -> |j + power mod d>.
ComplexMatrix shift(std::size_t d, long power = 1);
// diag(e^{i angle_j}).
ComplexMatrix phase(std::span<const double> angles);
// Discrete Fourier transform, (1/sqrt d) w^{jk}; the Hadamard gate for d = 2.
ComplexMatrix hadamard(std::size_t d);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
// |k><k| (x) (k == control_value ? u : I).
ComplexMatrix controlled(std::size_t d_control, const ComplexMatrix& u, std::size_t control_value);
// Block-diagonal direct sum of square blocks.
ComplexMatrix block_direct_sum(std::span<const ComplexMatrix> blocks);

}  // namespace causalvn::gates

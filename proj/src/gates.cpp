#include "causalvn/gates.hpp"

#include <cmath>
#include <numbers>

namespace causalvn::gates {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

ComplexMatrix identity(std::size_t d) { return causalvn::identity(d); }

ComplexMatrix swap(std::size_t d) {
  ComplexMatrix s = ComplexMatrix::Zero(idx(d * d), idx(d * d));
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) s(idx(b * d + a), idx(a * d + b)) = 1.0;
  }
  return s;
}

ComplexMatrix cnot(std::size_t d_control, std::size_t d_target) {
  const std::size_t n = d_control * d_target;
  ComplexMatrix c = ComplexMatrix::Zero(idx(n), idx(n));
  for (std::size_t k = 0; k < d_control; ++k) {
    for (std::size_t m = 0; m < d_target; ++m) {
      c(idx(k * d_target + (m + k) % d_target), idx(k * d_target + m)) = 1.0;
    }
  }
  return c;
}

ComplexMatrix shift(std::size_t d, long power) {
  const long n = static_cast<long>(d);
  const long p = ((power % n) + n) % n;
  ComplexMatrix s = ComplexMatrix::Zero(idx(d), idx(d));
  for (long j = 0; j < n; ++j) s((j + p) % n, j) = 1.0;
  return s;
}

ComplexMatrix phase(std::span<const double> angles) {
  ComplexMatrix p = ComplexMatrix::Zero(idx(angles.size()), idx(angles.size()));
  for (std::size_t j = 0; j < angles.size(); ++j) p(idx(j), idx(j)) = std::polar(1.0, angles[j]);
  return p;
}

ComplexMatrix hadamard(std::size_t d) {
  ComplexMatrix h(idx(d), idx(d));
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      // exact signs for the qubit case
      const std::size_t e = (j * k) % d;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(d);
      h(idx(j), idx(k)) = d == 2 ? Complex(e == 0 ? norm : -norm, 0.0) : std::polar(norm, angle);
    }
  }
  return h;
}

ComplexMatrix pauli_x() { return shift(2, 1); }

ComplexMatrix pauli_y() {
  ComplexMatrix y = ComplexMatrix::Zero(2, 2);
  y(0, 1) = Complex(0.0, -1.0);
  y(1, 0) = Complex(0.0, 1.0);
  return y;
}

ComplexMatrix pauli_z() {
  ComplexMatrix z = ComplexMatrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return z;
}

ComplexMatrix controlled(std::size_t d_control, const ComplexMatrix& u, std::size_t control_value) {
  if (!is_square(u)) throw DimensionError("controlled: target operator must be square");
  if (control_value >= d_control) {
    throw DimensionError("controlled: control value " + std::to_string(control_value) +
                         " out of range for a " + std::to_string(d_control) + "-level control");
  }
  const auto dt = static_cast<std::size_t>(u.rows());
  ComplexMatrix out = ComplexMatrix::Zero(idx(d_control * dt), idx(d_control * dt));
  for (std::size_t k = 0; k < d_control; ++k) {
    out.block(idx(k * dt), idx(k * dt), idx(dt), idx(dt)) =
        k == control_value ? u : causalvn::identity(dt);
  }
  return out;
}

ComplexMatrix block_direct_sum(std::span<const ComplexMatrix> blocks) {
  std::size_t n = 0;
  for (const auto& b : blocks) {
    if (!is_square(b)) throw DimensionError("block_direct_sum: blocks must be square");
    n += static_cast<std::size_t>(b.rows());
  }
  ComplexMatrix out = ComplexMatrix::Zero(idx(n), idx(n));
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    out.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return out;
}

}  // namespace causalvn::gates

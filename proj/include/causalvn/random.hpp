#pragma once

#include <cstdint>
#include <random>

#include "causalvn/opcore.hpp"

namespace causalvn {

// Seeded generator used for every random draw in the library. Identical
// seeds give identical streams within one build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  std::size_t index(std::size_t n);
  Complex complex_normal();

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
// of R's diagonal absorbed into Q.
ComplexMatrix haar_unitary(std::size_t d, Rng& rng);
// Hermitian matrix with i.i.d. Gaussian entries (GUE-like).
ComplexMatrix random_hermitian(std::size_t d, Rng& rng);

}  // namespace causalvn

#pragma once

// Deterministic random sources. Every stream is a SplitMix64 sequence whose
// starting point is a pure function of (seed, stream index), so parallel
// workers reproduce the same draws regardless of scheduling.

#include <cstdint>
#include <vector>

#include "simcap/qlin.hpp"

namespace simcap {

class Rng {
 public:
  explicit Rng(std::uint64_t state) noexcept : state_(state) {}

  /// Independent stream for work item `index` under `seed`.
  static Rng for_stream(std::uint64_t seed, std::uint64_t index) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Fair bit.
  int bit() noexcept { return static_cast<int>(next_u64() >> 63); }
  /// Standard normal (Box-Muller, both outputs used).
  double normal() noexcept;

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

namespace random {

/// Haar-random unit vector in C^dim.
qlin::CVector unit_vector(Rng& rng, std::size_t dim);
/// Haar-random dim x dim unitary (Gram-Schmidt on a complex Ginibre matrix).
qlin::CMatrix unitary(Rng& rng, std::size_t dim);
/// Point drawn uniformly from the probability simplex of the given size.
std::vector<double> simplex_point(Rng& rng, std::size_t size);
/// U diag(p) U^H with p uniform on the simplex and U Haar.
qlin::CMatrix spectrum_state(Rng& rng, std::size_t dim);
/// Hilbert-Schmidt random state G G^H / tr, G a dim x rank Ginibre matrix.
qlin::CMatrix ginibre_state(Rng& rng, std::size_t dim, std::size_t rank);

}  // namespace random

}  // namespace simcap

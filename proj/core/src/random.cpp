#include "simcap/random.hpp"

#include <cmath>
#include <numbers>

namespace simcap {

using qlin::CMatrix;
using qlin::Complex;
using qlin::CVector;

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng Rng::for_stream(std::uint64_t seed, std::uint64_t index) noexcept {
  return Rng(mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL)));
}

std::uint64_t Rng::next_u64() noexcept {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

double Rng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

namespace random {

namespace {

Complex complex_normal(Rng& rng) { return {rng.normal(), rng.normal()}; }

}  // namespace

CVector unit_vector(Rng& rng, std::size_t dim) {
  CVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = complex_normal(rng);
  return v.normalized();
}

CMatrix unitary(Rng& rng, std::size_t dim) {
  std::vector<CVector> cols;
  cols.reserve(dim);
  while (cols.size() < dim) {
    CVector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = complex_normal(rng);
    // Two Gram-Schmidt passes for numerical orthogonality.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& c : cols) {
        const Complex proj = qlin::inner(c, v);
        for (std::size_t i = 0; i < dim; ++i) v[i] -= proj * c[i];
      }
    }
    if (v.norm() < 1e-8) continue;
    cols.push_back(v.normalized());
  }
  CMatrix u(dim, dim);
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = 0; i < dim; ++i) u(i, j) = cols[j][i];
  return u;
}

std::vector<double> simplex_point(Rng& rng, std::size_t size) {
  std::vector<double> p(size);
  double total = 0.0;
  for (auto& x : p) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    x = -std::log(u);
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

CMatrix spectrum_state(Rng& rng, std::size_t dim) {
  const auto p = simplex_point(rng, dim);
  const CMatrix u = unitary(rng, dim);
  CMatrix rho = u * CMatrix::diagonal(std::span<const double>(p)) * qlin::adjoint(u);
  // Exact Hermitian symmetry; the product is Hermitian only up to rounding.
  for (std::size_t i = 0; i < dim; ++i) {
    rho(i, i) = rho(i, i).real();
    for (std::size_t j = i + 1; j < dim; ++j) rho(j, i) = std::conj(rho(i, j));
  }
  return rho;
}

CMatrix ginibre_state(Rng& rng, std::size_t dim, std::size_t rank) {
  CMatrix g(dim, rank);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < rank; ++j) g(i, j) = complex_normal(rng);
  CMatrix rho = g * qlin::adjoint(g);
  const double tr = qlin::trace(rho).real();
  rho *= 1.0 / tr;
  for (std::size_t i = 0; i < dim; ++i) {
    rho(i, i) = rho(i, i).real();
    for (std::size_t j = i + 1; j < dim; ++j) rho(j, i) = std::conj(rho(i, j));
  }
  return rho;
}

}  // namespace random

}  // namespace simcap

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "simcap/error.hpp"
#include "simcap/qlin.hpp"
#include "simcap/random.hpp"
#include "simcap/states.hpp"

#ifdef SIMCAP_HAVE_LAPACKE
#include <lapacke.h>
#endif

using namespace simcap;
using namespace simcap::qlin;

namespace {

CMatrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  CMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
  return m;
}

CMatrix random_hermitian(Rng& rng, std::size_t n, double scale) {
  CMatrix g = random_matrix(rng, n, n);
  CMatrix h = g + adjoint(g);
  h *= scale / spectral_norm(h);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = h(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) h(j, i) = std::conj(h(i, j));
  }
  return h;
}

}  // namespace

TEST_CASE("tensor examples") {
  CHECK(tensor(CMatrix::identity(2), CMatrix::identity(2)) == CMatrix::identity(4));

  const std::array<double, 2> d1{1, 0}, d2{0, 1};
  const std::array<double, 4> expect{0, 1, 0, 0};
  CHECK(tensor(CMatrix::diagonal(d1), CMatrix::diagonal(d2)) == CMatrix::diagonal(expect));

  const CVector phi = states::bell_state(states::BellIndex::PhiPlus);
  CHECK(max_abs_diff(tensor(pauli::x(), pauli::x()) * phi, phi) <= 1e-15);
}

TEST_CASE("tensor is associative and bilinear") {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const CMatrix a = random_matrix(rng, 2, 2), b = random_matrix(rng, 2, 2), c = random_matrix(rng, 2, 2);
    CHECK(max_abs_diff(tensor(tensor(a, b), c), tensor(a, tensor(b, c))) <= 1e-12);
    const Complex s(rng.normal(), rng.normal());
    CHECK(max_abs_diff(tensor(a + s * b, c), tensor(a, c) + s * tensor(b, c)) <= 1e-12);
    CHECK(max_abs_diff(tensor(a, b + c), tensor(a, b) + tensor(a, c)) <= 1e-12);
  }
}

TEST_CASE("partial transpose") {
  Rng rng(3);
  SUBCASE("product state stays PSD and transposes B") {
    const CMatrix ra = random::ginibre_state(rng, 2, 2);
    const CMatrix rb = random::ginibre_state(rng, 2, 2);
    const CMatrix pt = partial_transpose(tensor(ra, rb), Subsystem::B);
    CHECK(max_abs_diff(pt, tensor(ra, transpose(rb))) <= 1e-15);
    CHECK(herm_eig(pt).eigenvalues.back() >= -1e-12);
  }
  SUBCASE("Phi+ spectrum") {
    const CMatrix pt = partial_transpose(projector(states::bell_state(states::BellIndex::PhiPlus)), Subsystem::B);
    const auto ev = herm_eig(pt).eigenvalues;
    CHECK(ev[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ev[2] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ev[3] == doctest::Approx(-0.5).epsilon(1e-12));
  }
  SUBCASE("involution, trace, hermiticity") {
    for (int t = 0; t < 50; ++t) {
      const CMatrix rho = random::ginibre_state(rng, 4, 4);
      for (auto sub : {Subsystem::A, Subsystem::B}) {
        const CMatrix pt = partial_transpose(rho, sub);
        CHECK(partial_transpose(pt, sub) == rho);
        CHECK(std::abs(trace(pt) - trace(rho)) <= 1e-15);
        CHECK(hermiticity_residual(pt) <= 1e-15);
      }
    }
  }
  CHECK_THROWS_AS(partial_transpose(CMatrix::identity(2), Subsystem::A), DimensionError);
}

TEST_CASE("partial trace") {
  Rng rng(5);
  const CMatrix half = Complex(0.5) * CMatrix::identity(2);
  const CMatrix phi = projector(states::bell_state(states::BellIndex::PhiPlus));
  CHECK(max_abs_diff(partial_trace(phi, 2, 2, Subsystem::A), half) <= 1e-15);
  CHECK(max_abs_diff(partial_trace(phi, 2, 2, Subsystem::B), half) <= 1e-15);
  for (int t = 0; t < 50; ++t) {
    const CMatrix a = random_matrix(rng, 2, 2);
    const CMatrix b = random_matrix(rng, 3, 3);
    CHECK(max_abs_diff(partial_trace(tensor(a, b), 2, 3, Subsystem::A), trace(b) * a) <= 1e-12);
    CHECK(max_abs_diff(partial_trace(tensor(a, b), 2, 3, Subsystem::B), trace(a) * b) <= 1e-12);
  }
  CHECK_THROWS_AS(partial_trace(CMatrix::identity(4), 2, 3, Subsystem::A), DimensionError);
}

TEST_CASE("herm_eig examples") {
  const std::array<double, 2> d{1, 3};
  const auto e1 = herm_eig(CMatrix::diagonal(d));
  CHECK(e1.eigenvalues[0] == 3.0);
  CHECK(e1.eigenvalues[1] == 1.0);

  const auto ex = herm_eig(pauli::x());
  CHECK(ex.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(ex.eigenvalues[1] == doctest::Approx(-1.0));
  const double r = 1.0 / std::numbers::sqrt2;
  CHECK(std::abs(inner(ex.eigenvectors[0], CVector{r, r})) == doctest::Approx(1.0));
  CHECK(std::abs(inner(ex.eigenvectors[1], CVector{r, -r})) == doctest::Approx(1.0));

  const auto bd = states::BellDiagonal::canonical({0.7, 0.1, 0.1, 0.1});
  const auto eb = herm_eig(states::bell_diagonal_state(bd).rho());
  const std::array<double, 4> expect{0.7, 0.1, 0.1, 0.1};
  for (int i = 0; i < 4; ++i) CHECK(eb.eigenvalues[i] == doctest::Approx(expect[i]).epsilon(1e-12));

  CMatrix bad = CMatrix::identity(2);
  bad(0, 1) = 1e-6;
  CHECK_THROWS_AS(herm_eig(bad), NumericError);
}

TEST_CASE("herm_eig invariants on random Hermitian matrices") {
  Rng rng(17);
  for (std::size_t n : {2u, 3u, 4u, 8u, 16u}) {
    for (int t = 0; t < 100; ++t) {
      const CMatrix h = random_hermitian(rng, n, 1.0);
      const auto eig = herm_eig(h);
      double sum = 0.0;
      for (double v : eig.eigenvalues) sum += v;
      CHECK(std::abs(sum - trace(h).real()) <= 1e-10);
      for (std::size_t i = 0; i + 1 < n; ++i) CHECK(eig.eigenvalues[i] >= eig.eigenvalues[i + 1]);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const Complex g = inner(eig.eigenvectors[i], eig.eigenvectors[j]);
          CHECK(std::abs(g - Complex(i == j ? 1.0 : 0.0)) <= 1e-10);
        }
      CHECK(max_abs_diff(reconstruct(eig, eig.eigenvalues), h) <= 1e-10);
    }
  }
}

TEST_CASE("herm_eig degenerate spectra") {
  Rng rng(23);
  for (int t = 0; t < 50; ++t) {
    const CMatrix u = random::unitary(rng, 4);
    const std::array<double, 4> d{0.5, 0.5, -0.25, -0.25};
    const CMatrix h = u * CMatrix::diagonal(d) * adjoint(u);
    CMatrix hh = h;
    for (std::size_t i = 0; i < 4; ++i) {
      hh(i, i) = hh(i, i).real();
      for (std::size_t j = i + 1; j < 4; ++j) hh(j, i) = std::conj(hh(i, j));
    }
    const auto eig = herm_eig(hh);
    for (int i = 0; i < 4; ++i) CHECK(eig.eigenvalues[i] == doctest::Approx(d[i]).epsilon(1e-12));
    CHECK(max_abs_diff(reconstruct(eig, eig.eigenvalues), hh) <= 1e-10);
  }
}

#ifdef SIMCAP_HAVE_LAPACKE
TEST_CASE("herm_eig agrees with LAPACK zheev") {
  Rng rng(29);
  for (std::size_t n : {2u, 4u, 16u}) {
    for (int t = 0; t < 200; ++t) {
      const CMatrix h = random_hermitian(rng, n, 1.0);
      std::vector<lapack_complex_double> a(n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = lapack_make_complex_double(h(i, j).real(), h(i, j).imag());
      std::vector<double> w(n);
      REQUIRE(LAPACKE_zheev(LAPACK_ROW_MAJOR, 'N', 'U', static_cast<lapack_int>(n), a.data(),
                            static_cast<lapack_int>(n), w.data()) == 0);
      const auto eig = herm_eig(h);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(eig.eigenvalues[i] - w[n - 1 - i]) <= 1e-12);
    }
  }
}
#endif

TEST_CASE("psd_sqrt_inv") {
  CHECK(max_abs_diff(psd_sqrt_inv(CMatrix::identity(2), 1e-12), CMatrix::identity(2)) <= 1e-15);
  const std::array<double, 2> d{4, 1}, expect{0.5, 1};
  CHECK(max_abs_diff(psd_sqrt_inv(CMatrix::diagonal(d), 1e-12), CMatrix::diagonal(expect)) <= 1e-15);
  const std::array<double, 2> p{1, 0};
  CHECK(max_abs_diff(psd_sqrt_inv(CMatrix::diagonal(p), 1e-12), CMatrix::diagonal(p)) <= 1e-15);
  const std::array<double, 2> neg{1, -0.1};
  CHECK_THROWS_AS(psd_sqrt_inv(CMatrix::diagonal(neg), 1e-12), NumericError);

  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const CMatrix m = random::ginibre_state(rng, 2, 2);
    const CMatrix s = psd_sqrt_inv(m, 1e-12);
    CHECK(max_abs_diff(s * m * s, CMatrix::identity(2)) <= 1e-10);
  }
}

TEST_CASE("matrix constructors validate") {
  CHECK_THROWS_AS(CMatrix(2, 2, std::vector<Complex>(3)), DimensionError);
  CHECK_THROWS_AS(CMatrix(1, 1, {Complex(std::nan(""), 0.0)}), NumericError);
  CHECK_THROWS_AS(CMatrix(2, 2) * CMatrix(3, 3), DimensionError);
  CHECK_THROWS_AS(CVector(std::size_t{2}).normalized(), NumericError);
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "simcap/error.hpp"
#include "simcap/random.hpp"
#include "simcap/states.hpp"

using namespace simcap;
using namespace simcap::states;
using qlin::CMatrix;
using qlin::Complex;
using qlin::CVector;
using qlin::Subsystem;

namespace {

BellDiagonal random_canonical(Rng& rng) {
  const auto p = random::simplex_point(rng, 4);
  return BellDiagonal::canonical({p[0], p[1], p[2], p[3]});
}

double h2(double p) { return p <= 0 || p >= 1 ? 0.0 : -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

}  // namespace

TEST_CASE("bell states") {
  const double r = 1.0 / std::numbers::sqrt2;
  CHECK(qlin::max_abs_diff(bell_state(BellIndex::PhiPlus), CVector{r, 0, 0, r}) == 0.0);
  CHECK(qlin::max_abs_diff(bell_state(BellIndex::PsiMinus), CVector{0, r, -r, 0}) == 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const Complex g = qlin::inner(bell_state(BellIndex(i)), bell_state(BellIndex(j)));
      CHECK(std::abs(g - Complex(i == j ? 1.0 : 0.0)) <= 1e-15);
    }
}

TEST_CASE("TwoQubitState validation") {
  CHECK_THROWS_AS(TwoQubitState(CMatrix::identity(4)), DomainError);
  CHECK_THROWS_AS(TwoQubitState(CMatrix::identity(2)), DimensionError);
  const std::array<double, 4> neg{0.6, 0.6, -0.1, -0.1};
  CHECK_THROWS_AS(TwoQubitState(CMatrix::diagonal(neg)), DomainError);
  CMatrix nonherm = Complex(0.25) * CMatrix::identity(4);
  nonherm(0, 1) = 0.1;
  CHECK_THROWS_AS(TwoQubitState{nonherm}, DomainError);
}

TEST_CASE("BellDiagonal construction and canonical order") {
  CHECK_THROWS_AS(BellDiagonal::canonical({0.5, 0.5, 0.1, 0.0}), DomainError);
  CHECK_THROWS_AS(BellDiagonal::canonical({1.1, -0.1, 0.0, 0.0}), DomainError);

  const auto bd = BellDiagonal::canonical({0.1, 0.2, 0.6, 0.1});
  CHECK(bd.is_canonical());
  CHECK(bd[0] == 0.6);
  // the canonical state is the raw one with a Pauli applied on Bob's side
  const CMatrix p = qlin::tensor(CMatrix::identity(2), qlin::pauli::by_index(bd.bob_pauli()));
  const CMatrix raw = bell_diagonal_matrix(BellDiagonal::raw({0.1, 0.2, 0.6, 0.1}));
  CHECK(qlin::max_abs_diff(p * raw * qlin::adjoint(p), bell_diagonal_matrix(bd)) <= 1e-15);
  for (int i = 0; i < 4; ++i) CHECK(bd[i] == std::array<double, 4>{0.1, 0.2, 0.6, 0.1}[bd.source_index()[i]]);
}

TEST_CASE("bell_diagonal_state examples") {
  const CMatrix phi = qlin::projector(bell_state(BellIndex::PhiPlus));
  CHECK(qlin::max_abs_diff(bell_diagonal_state(BellDiagonal::canonical({1, 0, 0, 0})).rho(), phi) <= 1e-15);
  CHECK(qlin::max_abs_diff(bell_diagonal_state(BellDiagonal::canonical({.25, .25, .25, .25})).rho(),
                           Complex(0.25) * CMatrix::identity(4)) <= 1e-15);
  const auto ev = qlin::herm_eig(bell_diagonal_state(BellDiagonal::canonical({0.7, 0.1, 0.1, 0.1})).rho()).eigenvalues;
  CHECK(ev[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(ev[3] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("is_entangled examples") {
  const auto phi = TwoQubitState::pure(bell_state(BellIndex::PhiPlus));
  CHECK(is_entangled(phi, 1e-9) == Entanglement::Entangled);
  CHECK(min_pt_eigenvalue(phi.rho()) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(is_entangled(TwoQubitState(Complex(0.25) * CMatrix::identity(4)), 1e-9) == Entanglement::Separable);
  const auto edge = BellDiagonal::canonical({0.5, 0.25, 0.125, 0.125});
  CHECK(is_entangled(bell_diagonal_state(edge), 1e-9) == Entanglement::Boundary);
  // rank-deficient states inside the band are separable
  const auto product = TwoQubitState::pure(CVector{1, 0, 0, 0});
  CHECK(is_entangled(product, 1e-9) == Entanglement::Separable);
}

TEST_CASE("is_entangled_bell examples") {
  CHECK(is_entangled_bell(BellDiagonal::canonical({0.7, 0.1, 0.1, 0.1})));
  CHECK_FALSE(is_entangled_bell(BellDiagonal::canonical({0.4, 0.3, 0.2, 0.1})));
  CHECK_FALSE(is_entangled_bell(BellDiagonal::canonical({0.5, 0.25, 0.125, 0.125})));
  CHECK(is_entangled(bell_diagonal_state(BellDiagonal::canonical({0.4, 0.3, 0.2, 0.1})), 1e-9) ==
        Entanglement::Separable);
}

TEST_CASE("Lambda_1 > 1/2 shortcut agrees with PPT on random Bell-diagonal states") {
  Rng rng(41);
  int checked = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto bd = random_canonical(rng);
    if (std::abs(bd[0] - 0.5) <= 1e-9) continue;
    const bool ppt = is_entangled(bell_diagonal_state(bd), 1e-9) == Entanglement::Entangled;
    CHECK(ppt == is_entangled_bell(bd));
    ++checked;
  }
  CHECK(checked > 9900);
}

TEST_CASE("security condition equals Lambda_1 > 1/2 for every canonical Lambda") {
  Rng rng(43);
  for (int t = 0; t < 10000; ++t) {
    const auto bd = random_canonical(rng);
    CHECK(security_condition(eve_conditionals(purification_from_bell_diagonal(bd))) == is_entangled_bell(bd));
  }
  // boundary grid, Lambda_1 = 1/2 exactly
  for (int i = 0; i <= 8; ++i)
    for (int j = 0; i + j <= 8; ++j) {
      const double rest = 0.5;
      const double l2 = rest * i / 8, l3 = rest * j / 8, l4 = rest - l2 - l3;
      if (l4 < 0) continue;
      const auto bd = BellDiagonal::canonical({0.5, l2, l3, l4});
      CHECK_FALSE(security_condition(eve_conditionals(purification_from_bell_diagonal(bd))));
    }
}

TEST_CASE("purify") {
  SUBCASE("pure input") {
    const auto p = purify(TwoQubitState::pure(bell_state(BellIndex::PhiPlus)));
    CHECK(p.eve_dim() == 1);
    CHECK(std::abs(std::abs(qlin::inner(p.state(), bell_state(BellIndex::PhiPlus))) - 1.0) <= 1e-12);
  }
  SUBCASE("maximally mixed") {
    const auto p = purify(TwoQubitState(Complex(0.25) * CMatrix::identity(4)));
    CHECK(p.eve_dim() == 4);
    const auto eve = qlin::partial_trace(qlin::projector(p.state()), 4, 4, Subsystem::B);
    const auto ev = qlin::herm_eig(eve).eigenvalues;
    for (double v : ev) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("round trip on random states") {
    Rng rng(47);
    for (int t = 0; t < 1000; ++t) {
      const TwoQubitState s(random::ginibre_state(rng, 4, 1 + t % 4));
      const auto p = purify(s);
      CHECK(std::abs(p.state().norm() - 1.0) <= 1e-12);
      CHECK(qlin::max_abs_diff(p.reduced_ab(), s.rho()) <= 1e-10);
    }
  }
}

TEST_CASE("purification_from_bell_diagonal") {
  const auto p1 = purification_from_bell_diagonal(BellDiagonal::canonical({1, 0, 0, 0}));
  CHECK(p1.eve_dim() == 4);
  const auto bd = BellDiagonal::canonical({0.7, 0.1, 0.1, 0.1});
  const auto p = purification_from_bell_diagonal(bd);
  // amplitude of Bell vector i paired with Eve's |i>
  for (int i = 0; i < 4; ++i) {
    CVector eve_i(4);
    eve_i[i] = 1.0;
    const CVector expect = qlin::tensor(bell_state(BellIndex(i)), eve_i);
    CHECK(std::abs(qlin::inner(expect, p.state()) - Complex(std::sqrt(bd[i]))) <= 1e-15);
  }
  CHECK(qlin::max_abs_diff(p.reduced_ab(), bell_diagonal_state(bd).rho()) <= 1e-12);
}

TEST_CASE("eve_conditionals examples") {
  auto ens_of = [](std::array<double, 4> w) {
    return eve_conditionals(purification_from_bell_diagonal(BellDiagonal::canonical(w)));
  };
  const auto perfect = ens_of({1, 0, 0, 0});
  CHECK(perfect.overlap() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(perfect.eps_b() == 0.0);

  const auto e = ens_of({0.7, 0.1, 0.1, 0.1});
  CHECK(e.eps_b() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(e.overlap() == doctest::Approx(0.75).epsilon(1e-12));
  const double r = std::sqrt(0.5);
  CHECK(qlin::max_abs_diff(e.e00(), CVector{r * std::sqrt(0.7), 0, 0, r * std::sqrt(0.1)}) <= 1e-15);
  CHECK(qlin::max_abs_diff(e.e11(), CVector{r * std::sqrt(0.7), 0, 0, -r * std::sqrt(0.1)}) <= 1e-15);

  const auto sharp = ens_of({0.5, 0, 0, 0.5});
  CHECK(sharp.overlap() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sharp.eps_b() == 0.0);

  // Lambda_1 + Lambda_4 = 0 is only reachable with raw weights
  CHECK_THROWS_AS(eve_conditionals(purification_from_bell_diagonal(BellDiagonal::raw({0, 0.5, 0.5, 0}))), DomainError);
}

TEST_CASE("EveEnsemble invariants on random Lambda") {
  Rng rng(53);
  for (int t = 0; t < 1000; ++t) {
    const auto bd = random_canonical(rng);
    const auto ens = eve_conditionals(purification_from_bell_diagonal(bd));
    double total = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) total += std::norm(ens.branch(a, b).norm());
    CHECK(std::abs(total - 1.0) <= 1e-12);
    for (const auto* eq : {&ens.e00(), &ens.e11()})
      for (const auto* er : {&ens.e01(), &ens.e10()}) CHECK(std::abs(qlin::inner(*eq, *er)) <= 1e-12);
    const double overlap = std::abs(bd[0] - bd[3]) / (bd[0] + bd[3]);
    CHECK(std::abs(ens.overlap() - overlap) <= 1e-12);
    const auto p = z_measurement_distribution(bell_diagonal_state(bd));
    CHECK(std::abs(p.error_probability() - ens.eps_b()) <= 1e-12);
    CHECK(std::abs(ens.eps_b() - (bd[1] + bd[2])) <= 1e-12);
  }
}

TEST_CASE("security_condition examples") {
  auto secure = [](std::array<double, 4> w) {
    return security_condition(eve_conditionals(purification_from_bell_diagonal(BellDiagonal::canonical(w))));
  };
  CHECK(secure({0.7, 0.1, 0.1, 0.1}));
  CHECK_FALSE(secure({0.4, 0.3, 0.2, 0.1}));
  CHECK_FALSE(secure({0.5, 0.25, 0.125, 0.125}));
}

TEST_CASE("z_measurement_distribution and mutual information") {
  const auto p_phi = z_measurement_distribution(TwoQubitState::pure(bell_state(BellIndex::PhiPlus)));
  CHECK(p_phi(0, 0) == doctest::Approx(0.5));
  CHECK(p_phi(1, 1) == doctest::Approx(0.5));
  CHECK(p_phi(0, 1) == 0.0);
  CHECK(mutual_info_ab(p_phi) == doctest::Approx(1.0).epsilon(1e-12));

  const auto p_mix = z_measurement_distribution(TwoQubitState(Complex(0.25) * CMatrix::identity(4)));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(p_mix(a, b) == doctest::Approx(0.25));
  CHECK(std::abs(mutual_info_ab(p_mix)) <= 1e-15);

  const JointTable bsc({0.4, 0.1, 0.1, 0.4});
  CHECK(mutual_info_ab(bsc) == doctest::Approx(1.0 - h2(0.2)).epsilon(1e-12));
  CHECK(mutual_info_ab(bsc) == doctest::Approx(0.2781).epsilon(1e-4));

  CHECK_THROWS_AS(JointTable({0.5, 0.5, 0.5, 0.0}), DomainError);
}

TEST_CASE("Werner state") {
  for (double p : {0.0, 0.2, 1.0 / 3.0, 0.6, 1.0}) {
    const auto w = werner_state(p);
    CHECK(min_pt_eigenvalue(w.rho()) == doctest::Approx((1.0 - 3.0 * p) / 4.0).epsilon(1e-12));
  }
  CHECK(is_entangled(werner_state(0.2), 1e-9) == Entanglement::Separable);
  CHECK(is_entangled(werner_state(0.6), 1e-9) == Entanglement::Entangled);
}

#include "simcap/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "simcap/error.hpp"

namespace simcap::states {

using qlin::CMatrix;
using qlin::Complex;
using qlin::CVector;

namespace {

constexpr double kStateTol = 1e-10;

// Bell permutations realized by a Pauli on Bob's qubit. kKlein[p][i] is the
// slot that weight i moves to under Pauli p; every entry is an involution.
constexpr std::array<std::array<int, 4>, 4> kKlein{{
    {0, 1, 2, 3},  // I
    {1, 0, 3, 2},  // X: Phi+ <-> Psi+, Psi- <-> Phi-
    {2, 3, 0, 1},  // Y: Phi+ <-> Psi-, Psi+ <-> Phi-
    {3, 2, 1, 0},  // Z: Phi+ <-> Phi-, Psi+ <-> Psi-
}};

void validate_weights(const std::array<double, 4>& w) {
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::isfinite(w[i]) || w[i] < 0.0 || w[i] > 1.0) {
      throw DomainError("Bell weight " + std::to_string(i + 1) + " = " + std::to_string(w[i]) +
                        " outside [0, 1]");
    }
    total += w[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("Bell weights sum to " + std::to_string(total) + ", expected 1");
  }
}

}  // namespace

CVector bell_state(BellIndex index) {
  const double r = 1.0 / std::numbers::sqrt2;
  switch (index) {
    case BellIndex::PhiPlus: return CVector{r, 0.0, 0.0, r};
    case BellIndex::PsiPlus: return CVector{0.0, r, r, 0.0};
    case BellIndex::PsiMinus: return CVector{0.0, r, -r, 0.0};
    case BellIndex::PhiMinus: return CVector{r, 0.0, 0.0, -r};
  }
  throw DomainError("invalid Bell index");
}

// ---------------------------------------------------------------------------

TwoQubitState::TwoQubitState(CMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != 4 || rho_.cols() != 4) throw DimensionError("two-qubit state must be 4x4");
  const double herm = qlin::hermiticity_residual(rho_);
  if (herm > kStateTol) {
    throw DomainError("density matrix is not Hermitian (residual " + std::to_string(herm) + ")");
  }
  const double tr = qlin::trace(rho_).real();
  if (std::abs(tr - 1.0) > kStateTol) {
    throw DomainError("density matrix trace is " + std::to_string(tr));
  }
  const double min_eig = qlin::herm_eig(rho_).eigenvalues.back();
  if (min_eig < -kStateTol) {
    throw DomainError("density matrix has eigenvalue " + std::to_string(min_eig));
  }
}

TwoQubitState TwoQubitState::normalized(const CMatrix& m) {
  if (m.rows() != 4 || m.cols() != 4) throw DimensionError("two-qubit state must be 4x4");
  CMatrix h(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  const double tr = qlin::trace(h).real();
  if (!(tr > 0.0)) throw NumericError("cannot normalize an operator with trace " + std::to_string(tr));
  h *= 1.0 / tr;
  return TwoQubitState(std::move(h));
}

TwoQubitState TwoQubitState::pure(const CVector& psi) {
  if (psi.dim() != 4) throw DimensionError("two-qubit pure state must have dimension 4");
  return normalized(qlin::projector(psi.normalized()));
}

// ---------------------------------------------------------------------------

BellDiagonal::BellDiagonal(const std::array<double, 4>& lambdas, const std::array<int, 4>& source,
                           int pauli)
    : lambdas_(lambdas), source_(source), bob_pauli_(pauli) {}

BellDiagonal BellDiagonal::raw(const std::array<double, 4>& weights) {
  validate_weights(weights);
  return BellDiagonal(weights, {0, 1, 2, 3}, 0);
}

BellDiagonal BellDiagonal::canonical(const std::array<double, 4>& weights) {
  validate_weights(weights);
  const auto max_it = std::max_element(weights.begin(), weights.end());
  const int pauli = static_cast<int>(max_it - weights.begin());
  std::array<double, 4> out{};
  std::array<int, 4> source{};
  for (int i = 0; i < 4; ++i) {
    const int slot = kKlein[pauli][i];
    out[slot] = weights[i];
    source[slot] = i;
  }
  return BellDiagonal(out, source, pauli);
}

bool BellDiagonal::is_canonical() const noexcept {
  return lambdas_[0] >= lambdas_[1] && lambdas_[0] >= lambdas_[2] && lambdas_[0] >= lambdas_[3];
}

// ---------------------------------------------------------------------------

Purification::Purification(CVector state, std::size_t eve_dim)
    : state_(std::move(state)), eve_dim_(eve_dim) {
  if (eve_dim_ == 0 || state_.dim() != 4 * eve_dim_) {
    throw DimensionError("purification must have dimension 4 * eve_dim");
  }
  const double n = state_.norm();
  if (std::abs(n - 1.0) > 1e-12) {
    throw NumericError("purification norm is " + std::to_string(n));
  }
}

CMatrix Purification::reduced_ab() const {
  return qlin::partial_trace(qlin::projector(state_), 4, eve_dim_, qlin::Subsystem::A);
}

CVector Purification::eve_branch(int a, int b) const {
  CVector out(eve_dim_);
  const std::size_t base = static_cast<std::size_t>(2 * a + b) * eve_dim_;
  for (std::size_t k = 0; k < eve_dim_; ++k) out[k] = state_[base + k];
  return out;
}

// ---------------------------------------------------------------------------

EveEnsemble::EveEnsemble(CVector e00, CVector e11, CVector e01, CVector e10)
    : e00_(std::move(e00)), e11_(std::move(e11)), e01_(std::move(e01)), e10_(std::move(e10)) {
  const std::size_t d = e00_.dim();
  if (e11_.dim() != d || e01_.dim() != d || e10_.dim() != d) {
    throw DimensionError("Eve's conditional vectors must share a dimension");
  }
  const double n00 = std::norm(e00_.norm());
  const double n11 = std::norm(e11_.norm());
  const double n01 = std::norm(e01_.norm());
  const double n10 = std::norm(e10_.norm());
  if (std::abs(n00 + n11 + n01 + n10 - 1.0) > 1e-12) {
    throw NumericError("Eve's conditional vectors are not normalized jointly");
  }
  for (const CVector* same : {&e00_, &e11_}) {
    for (const CVector* diff : {&e01_, &e10_}) {
      if (std::abs(qlin::inner(*same, *diff)) > 1e-10) {
        throw DomainError(
            "error and no-error branches of Eve's state are not orthogonal; "
            "the purification is not in Bell-diagonal form");
      }
    }
  }
  eps_b_ = n01 + n10;
  if (n00 <= 1e-15 || n11 <= 1e-15) {
    throw DomainError("equal-outcome branch has zero weight (Lambda_1 + Lambda_4 = 0); overlap undefined");
  }
  overlap_ = std::min(1.0, std::abs(qlin::inner(e00_, e11_)) / std::sqrt(n00 * n11));
}

const CVector& EveEnsemble::branch(int a, int b) const {
  if (a == 0 && b == 0) return e00_;
  if (a == 1 && b == 1) return e11_;
  if (a == 0 && b == 1) return e01_;
  return e10_;
}

CVector EveEnsemble::equal_outcome_state(int bit) const {
  return bit == 0 ? e00_.normalized() : e11_.normalized();
}

std::array<CVector, 2> EveEnsemble::plane_states() const {
  if (e00_.dim() != 4) throw DomainError("plane_states needs Eve dimension 4");
  std::array<CVector, 2> out;
  for (int bit = 0; bit < 2; ++bit) {
    const CVector e = equal_outcome_state(bit);
    if (std::abs(e[1]) > 1e-10 || std::abs(e[2]) > 1e-10) {
      throw DomainError("equal-outcome states leave span{|1>, |4>}");
    }
    out[bit] = CVector{e[0], e[3]};
  }
  return out;
}

// ---------------------------------------------------------------------------

JointTable::JointTable(const std::array<double, 4>& p) : p_(p) {
  double total = 0.0;
  for (double x : p_) {
    if (!std::isfinite(x) || x < -1e-12) throw DomainError("joint probability out of range");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("joint probabilities sum to " + std::to_string(total));
  }
  for (double& x : p_) x = std::max(0.0, x);
}

const char* to_string(Entanglement e) {
  switch (e) {
    case Entanglement::Entangled: return "entangled";
    case Entanglement::Separable: return "separable";
    case Entanglement::Boundary: return "boundary";
  }
  return "?";
}

double min_pt_eigenvalue(const CMatrix& rho) {
  return qlin::herm_eig(qlin::partial_transpose(rho, qlin::Subsystem::B)).eigenvalues.back();
}

CMatrix bell_diagonal_matrix(const BellDiagonal& bd) {
  CMatrix rho(4, 4);
  for (int i = 0; i < 4; ++i) {
    if (bd[i] == 0.0) continue;
    rho += Complex(bd[i]) * qlin::projector(bell_state(static_cast<BellIndex>(i)));
  }
  return rho;
}

TwoQubitState bell_diagonal_state(const BellDiagonal& bd) {
  return TwoQubitState(bell_diagonal_matrix(bd));
}

TwoQubitState werner_state(double p) {
  if (!(p >= -1.0 / 3.0 && p <= 1.0)) throw DomainError("Werner parameter outside [-1/3, 1]");
  CMatrix rho = Complex(p) * qlin::projector(bell_state(BellIndex::PhiPlus));
  rho += Complex((1.0 - p) / 4.0) * CMatrix::identity(4);
  return TwoQubitState(std::move(rho));
}

Entanglement is_entangled(const TwoQubitState& s, double tol) {
  const double min_pt = min_pt_eigenvalue(s.rho());
  if (min_pt < -tol) return Entanglement::Entangled;
  if (min_pt > tol) return Entanglement::Separable;
  const double min_eig = qlin::herm_eig(s.rho()).eigenvalues.back();
  return min_eig > tol ? Entanglement::Boundary : Entanglement::Separable;
}

bool is_entangled_bell(const BellDiagonal& bd) { return bd[0] > 0.5; }

Purification purify(const TwoQubitState& s) {
  const auto eig = qlin::herm_eig(s.rho());
  std::size_t rank = 0;
  for (double r : eig.eigenvalues)
    if (r > 1e-12) ++rank;
  CVector psi(4 * rank);
  for (std::size_t i = 0; i < rank; ++i) {
    // Fix the eigenvector phase: largest-magnitude component real positive.
    const CVector& v = eig.eigenvectors[i];
    std::size_t pivot = 0;
    for (std::size_t k = 1; k < 4; ++k)
      if (std::abs(v[k]) > std::abs(v[pivot]) + 1e-12) pivot = k;
    const Complex phase = std::conj(v[pivot]) / std::abs(v[pivot]);
    const double amp = std::sqrt(eig.eigenvalues[i]);
    for (std::size_t k = 0; k < 4; ++k) psi[k * rank + i] = amp * phase * v[k];
  }
  return Purification(psi.normalized(), rank);
}

Purification purification_from_bell_diagonal(const BellDiagonal& bd) {
  CVector psi(16);
  for (int i = 0; i < 4; ++i) {
    const double amp = std::sqrt(bd[i]);
    const CVector bell = bell_state(static_cast<BellIndex>(i));
    for (std::size_t k = 0; k < 4; ++k) psi[k * 4 + i] = amp * bell[k];
  }
  return Purification(std::move(psi), 4);
}

EveEnsemble eve_conditionals(const Purification& p) {
  return EveEnsemble(p.eve_branch(0, 0), p.eve_branch(1, 1), p.eve_branch(0, 1), p.eve_branch(1, 0));
}

bool security_condition(const EveEnsemble& ens) {
  const double eps = ens.eps_b();
  if (eps >= 1.0) throw DomainError("security condition undefined for eps_B = 1");
  // exact ties (Lambda_1 = 1/2) come out of the vector arithmetic a few ulps
  // either way; anything that close is not a strict inequality
  const double lhs = eps / (1.0 - eps), rhs = ens.overlap();
  return lhs < rhs && rhs - lhs > 1e-12 * rhs;
}

JointTable z_measurement_distribution(const TwoQubitState& s) {
  std::array<double, 4> p{};
  for (std::size_t i = 0; i < 4; ++i) p[i] = s.rho()(i, i).real();
  double total = p[0] + p[1] + p[2] + p[3];
  for (double& x : p) x /= total;
  return JointTable(p);
}

double mutual_info_ab(const JointTable& p) {
  const double pa[2] = {p(0, 0) + p(0, 1), p(1, 0) + p(1, 1)};
  const double pb[2] = {p(0, 0) + p(1, 0), p(0, 1) + p(1, 1)};
  double info = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double pab = p(a, b);
      if (pab <= 0.0) continue;
      info += pab * std::log2(pab / (pa[a] * pb[b]));
    }
  return std::max(0.0, info);
}

}  // namespace simcap::states

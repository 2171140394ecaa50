#pragma once

// Two-qubit state model: density matrices, Bell-diagonal weights,
// purifications and the eavesdropper's conditional ensemble after a
// z-basis measurement by both honest parties.

#include <array>
#include <cstddef>

#include "simcap/qlin.hpp"

namespace simcap::states {

/// Bell basis, in the canonical ordering used everywhere in the library.
enum class BellIndex { PhiPlus = 0, PsiPlus = 1, PsiMinus = 2, PhiMinus = 3 };

qlin::CVector bell_state(BellIndex index);

/// A validated density matrix rho_AB (4x4, Hermitian, PSD, unit trace,
/// all within 1e-10).
class TwoQubitState {
 public:
  explicit TwoQubitState(qlin::CMatrix rho);

  /// Hermitian-symmetrizes and trace-normalizes before validating; for
  /// matrices produced by numerical pipelines.
  static TwoQubitState normalized(const qlin::CMatrix& m);
  static TwoQubitState pure(const qlin::CVector& psi);

  const qlin::CMatrix& rho() const noexcept { return rho_; }

 private:
  qlin::CMatrix rho_;
};

/// Weights of a Bell-diagonal state. `canonical` reorders by the local
/// Pauli on Bob's side that moves the largest weight onto |Phi+>; the
/// applied permutation is kept.
class BellDiagonal {
 public:
  /// Validates and brings the largest weight to slot 0.
  static BellDiagonal canonical(const std::array<double, 4>& weights);
  /// Validates only; the ordering is kept as given.
  static BellDiagonal raw(const std::array<double, 4>& weights);

  double operator[](std::size_t i) const { return lambdas_[i]; }
  const std::array<double, 4>& lambdas() const noexcept { return lambdas_; }
  bool is_canonical() const noexcept;

  /// Slot i of lambdas() holds input weight source_index()[i].
  const std::array<int, 4>& source_index() const noexcept { return source_; }
  /// Pauli on Bob's qubit (0=I, 1=X, 2=Y, 3=Z) realizing the reordering.
  int bob_pauli() const noexcept { return bob_pauli_; }

 private:
  BellDiagonal(const std::array<double, 4>& lambdas, const std::array<int, 4>& source, int pauli);

  std::array<double, 4> lambdas_{};
  std::array<int, 4> source_{0, 1, 2, 3};
  int bob_pauli_ = 0;
};

/// |Psi_ABE> stored with index (2a + b) * eve_dim + e.
class Purification {
 public:
  Purification(qlin::CVector state, std::size_t eve_dim);

  const qlin::CVector& state() const noexcept { return state_; }
  std::size_t eve_dim() const noexcept { return eve_dim_; }
  /// tr_E |Psi><Psi|.
  qlin::CMatrix reduced_ab() const;
  /// (<ab| (x) 1_E)|Psi>, the non-normalized vector on Eve's space.
  qlin::CVector eve_branch(int a, int b) const;

 private:
  qlin::CVector state_;
  std::size_t eve_dim_;
};

/// Eve's non-normalized states conditioned on the honest z outcomes.
class EveEnsemble {
 public:
  EveEnsemble(qlin::CVector e00, qlin::CVector e11, qlin::CVector e01, qlin::CVector e10);

  const qlin::CVector& e00() const noexcept { return e00_; }
  const qlin::CVector& e11() const noexcept { return e11_; }
  const qlin::CVector& e01() const noexcept { return e01_; }
  const qlin::CVector& e10() const noexcept { return e10_; }
  const qlin::CVector& branch(int a, int b) const;

  /// |<e0|e1>| of the normalized equal-outcome states.
  double overlap() const noexcept { return overlap_; }
  /// Bob's single-round error probability.
  double eps_b() const noexcept { return eps_b_; }
  /// Normalized equal-outcome state for a = b = bit.
  qlin::CVector equal_outcome_state(int bit) const;

  /// Equal-outcome states written in the 2-D plane span{|1>, |4>} of Eve's
  /// space (components 0 and 3). Throws DomainError if they leave it.
  std::array<qlin::CVector, 2> plane_states() const;

 private:
  qlin::CVector e00_, e11_, e01_, e10_;
  double overlap_ = 0.0;
  double eps_b_ = 0.0;
};

/// Joint distribution P(a, b) of the honest z outcomes, index 2a + b.
class JointTable {
 public:
  explicit JointTable(const std::array<double, 4>& p);

  double operator()(int a, int b) const { return p_[2 * a + b]; }
  const std::array<double, 4>& probabilities() const noexcept { return p_; }
  double error_probability() const noexcept { return p_[1] + p_[2]; }

 private:
  std::array<double, 4> p_;
};

enum class Entanglement { Entangled, Separable, Boundary };

const char* to_string(Entanglement e);

/// Smallest eigenvalue of the partial transpose on B.
double min_pt_eigenvalue(const qlin::CMatrix& rho);

qlin::CMatrix bell_diagonal_matrix(const BellDiagonal& bd);
TwoQubitState bell_diagonal_state(const BellDiagonal& bd);
/// p |Phi+><Phi+| + (1 - p) I/4.
TwoQubitState werner_state(double p);

/// PPT verdict. Entangled when the smallest partial-transpose eigenvalue is
/// below -tol. Within the +-tol band the state is Boundary if rho has full
/// rank (smallest eigenvalue > tol), otherwise Separable: zero PT
/// eigenvalues of rank-deficient states (product states, classically
/// correlated states) come from the kernel of rho itself.
Entanglement is_entangled(const TwoQubitState& s, double tol);
/// Lambda_1 > 1/2 for canonical weights.
bool is_entangled_bell(const BellDiagonal& bd);

/// sum_i sqrt(r_i) |i>|i_e> over the eigenvalues r_i > 1e-12.
Purification purify(const TwoQubitState& s);
/// sum_i sqrt(Lambda_i) |Bell_i>|i>, Eve dimension 4.
Purification purification_from_bell_diagonal(const BellDiagonal& bd);

EveEnsemble eve_conditionals(const Purification& p);

/// eps_B / (1 - eps_B) < |<e1|e0>|, strict: a relative gap below 1e-12 counts
/// as a tie. Throws DomainError when eps_B = 1.
bool security_condition(const EveEnsemble& ens);

JointTable z_measurement_distribution(const TwoQubitState& s);
/// Shannon mutual information I(A:B) in bits.
double mutual_info_ab(const JointTable& p);

}  // namespace simcap::states

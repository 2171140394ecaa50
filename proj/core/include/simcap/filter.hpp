#pragma once

// Local filtering F_A (x) F_B that maps a two-qubit state, with some
// probability, onto a Bell-diagonal state.
//
// Procedure: alternately whiten the marginals,
//   rho <- (G (x) 1) rho (G (x) 1)^H / tr,  G = (2 tr_B rho)^(-1/2),
// and likewise on B, until both marginals equal 1/2 within tolerance (near
// rank-deficient inputs finish with a few Newton steps instead). The
// state is then (1 + sum_ij T_ij s_i (x) s_j)/4 and a signed SVD of the real
// correlation block T = O_A diag(d) O_B^T with O_A, O_B in SO(3) gives the
// local unitaries that make it Bell-diagonal. A final Pauli on Bob's side
// puts the largest weight on |Phi+>.

#include <array>

#include "simcap/qlin.hpp"
#include "simcap/states.hpp"

namespace simcap::filter {

using Mat3 = std::array<std::array<double, 3>, 3>;

struct FilterOptions {
  int max_iterations = 1000;
  int newton_steps = 50;  // fallback once max_iterations whitening rounds are spent
  double tolerance = 1e-10;       // marginal residual declaring convergence
  double singular_tolerance = 1e-9;  // smallest admissible marginal eigenvalue
  double bell_residual_limit = 1e-8;
};

struct FilterResult {
  qlin::CMatrix f_a;  // largest singular value 1
  qlin::CMatrix f_b;
  qlin::CMatrix u_a;  // unitaries aligning the filtered state with the Bell basis
  qlin::CMatrix u_b;
  states::BellDiagonal lambdas;
  double p_success = 0.0;
  int iterations = 0;
  double bell_residual = 0.0;  // largest off-diagonal Bell-basis entry of the output

  /// (U_A F_A (x) U_B F_B).
  qlin::CMatrix local_operator() const;
};

/// Throws SingularMarginalError when a marginal eigenvalue drops below
/// `singular_tolerance` and ConvergenceError when neither `max_iterations`
/// whitening rounds nor the Newton fallback reach `tolerance`.
FilterResult bell_diagonalize(const states::TwoQubitState& s, const FilterOptions& options = {});

/// (K rho K^H) / tr for the local operator of `result`, with the probability.
std::pair<qlin::CMatrix, double> apply_filter(const FilterResult& result, const qlin::CMatrix& rho);

/// T_ij = tr(rho s_i (x) s_j), i, j over X, Y, Z.
Mat3 correlation_matrix(const qlin::CMatrix& rho);

/// Signed SVD: t = rot_a diag(d) rot_b^T with rot_a, rot_b proper rotations.
/// For an already diagonal t the rotations are the identity.
struct SignedSvd {
  Mat3 rot_a;
  std::array<double, 3> d;
  Mat3 rot_b;
};
SignedSvd signed_svd(const Mat3& t);

/// SU(2) element U with U s_j U^H = sum_k r_kj s_k.
qlin::CMatrix su2_from_rotation(const Mat3& r);
/// Adjoint action r_kj = tr(s_k U s_j U^H) / 2.
Mat3 rotation_from_su2(const qlin::CMatrix& u);

}  // namespace simcap::filter

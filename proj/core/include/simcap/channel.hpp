#pragma once

// Qubit channels in Choi form, the entanglement-based vs prepare-and-measure
// picture of the key protocol, and entanglement-breaking detection.
//
// Convention: choi = (1 (x) U)(|Phi+><Phi+|), the channel acting on the
// second factor. Blocks C_jj' = (1/2) U(|j><j'|).

#include <array>
#include <optional>
#include <vector>

#include "simcap/filter.hpp"
#include "simcap/qlin.hpp"
#include "simcap/random.hpp"
#include "simcap/states.hpp"

namespace simcap::channel {

class QubitChannel {
 public:
  /// Throws DomainError when sum K^H K differs from 1 by more than 1e-10.
  static QubitChannel from_kraus(std::vector<qlin::CMatrix> kraus);
  /// Checks PSD, unit trace and tr_out choi = 1/2 (all within 1e-10).
  static QubitChannel from_choi(qlin::CMatrix choi);
  /// Measure-and-prepare form U(rho) = sum_k tr(L_k rho) rho_k.
  static QubitChannel from_measure_prepare(const std::vector<qlin::CMatrix>& effects,
                                           const std::vector<qlin::CMatrix>& states);

  static QubitChannel identity();
  /// U(rho) = p rho + (1 - p) 1/2, p in [-1/3, 1]. Choi is the Werner state.
  static QubitChannel depolarizing(double p);
  /// U(rho) = (1 - p) rho + p Z rho Z.
  static QubitChannel dephasing(double p);
  /// Measure z, resend the outcome.
  static QubitChannel measure_resend_z();

  const std::optional<std::vector<qlin::CMatrix>>& kraus() const noexcept { return kraus_; }
  const qlin::CMatrix& choi() const noexcept { return choi_; }

  /// U(x) for any 2x2 operator x.
  qlin::CMatrix apply(const qlin::CMatrix& x) const;

 private:
  QubitChannel(std::optional<std::vector<qlin::CMatrix>> kraus, qlin::CMatrix choi);

  std::optional<std::vector<qlin::CMatrix>> kraus_;
  qlin::CMatrix choi_;
};

class ProbeState {
 public:
  /// Unit norm within 1e-12.
  explicit ProbeState(qlin::CVector phi);
  static ProbeState phi_plus();
  /// cos t |00> + sin t |11>.
  static ProbeState schmidt(double theta);

  const qlin::CVector& phi() const noexcept { return phi_; }

 private:
  qlin::CVector phi_;
};

enum class Verdict { Breaking, Entangling, Boundary };
const char* to_string(Verdict v);

qlin::CMatrix choi_from_kraus(const std::vector<qlin::CMatrix>& kraus);

/// (1 (x) U)(|phi><phi|).
states::TwoQubitState apply_to_half(const QubitChannel& ch, const ProbeState& probe);

/// PPT test on the Choi state; same band rule as states::is_entangled.
Verdict is_entanglement_breaking(const QubitChannel& ch, double tol);

struct ProbeSearch {
  std::optional<ProbeState> probe;  // set only for entangling channels
  Verdict verdict = Verdict::Breaking;
  double min_pt = 0.0;  // PT minimum eigenvalue of the probe output (Choi for no probe)
};
/// Tries |Phi+>, the Choi eigenvectors and a Schmidt grid under a few
/// input-side rotations; keeps the most negative PT eigenvalue.
ProbeSearch best_probe(const QubitChannel& ch, double tol);

struct PmStates {
  std::array<qlin::CVector, 2> psi;  // states Bob receives for a = 0, 1
  std::array<double, 2> priors;
};
/// Throws DomainError when one z-branch of the probe has zero weight.
PmStates pm_states(const ProbeState& probe);

/// Largest difference between the filtered joint z-distributions computed
/// from the entangled picture and from the prepare-and-measure picture.
double pm_equivalence_check(const QubitChannel& ch, const ProbeState& probe);

/// Full key pipeline on a channel: probe search, filtering of the probe
/// output, and the security condition. Breaking channels are probed with
/// |Phi+> so the pipeline still reports their (insecure) Bell weights.
struct KeyAnalysis {
  ProbeSearch search;
  std::optional<filter::FilterResult> filter;  // empty when the marginal is singular
  std::optional<states::BellDiagonal> lambdas;
  bool secure = false;
  double eps_b = 0.0;
  double overlap = 1.0;
};
KeyAnalysis analyze_key(const QubitChannel& ch, double tol);

/// Haar isometry into C^2 (x) C^env_dim, environment traced out.
QubitChannel random_channel(Rng& rng, std::size_t env_dim);
/// Measure-and-prepare channel with `outcomes` full-rank effects and random
/// mixed preparations.
QubitChannel random_breaking_channel(Rng& rng, std::size_t outcomes);

}  // namespace simcap::channel

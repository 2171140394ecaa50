#pragma once

// Advantage distillation on z-basis outcomes of a Bell-diagonal state, the
// eavesdropper's individual POVM attacks, and Monte-Carlo / exact
// evaluation of the error probabilities of Bob and Eve.
//
// Eve's measurements live on the 2-D plane span{|1>, |4>} of her space that
// carries the equal-outcome states e0, e1 (plane coordinates (c1, c4)). In
// error rounds her state lies in the orthogonal plane; the simulation gives
// her a conclusive error-flag outcome there, which tells her the round was
// an error but nothing about Alice's bit.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "simcap/qlin.hpp"
#include "simcap/random.hpp"
#include "simcap/states.hpp"

namespace simcap::adsim {

enum class OutcomeLabel { Guess0, Guess1, Inconclusive };

const char* to_string(OutcomeLabel label);

struct PovmElement {
  qlin::CMatrix op;  // 2x2 positive operator on Eve's equal-outcome plane
  OutcomeLabel label = OutcomeLabel::Inconclusive;

  static PovmElement rank_one(double weight, const qlin::CVector& direction, OutcomeLabel label);
};

/// Finite POVM on Eve's 2-D equal-outcome plane. Completeness is checked
/// at construction (residual <= 1e-10).
class Povm {
 public:
  explicit Povm(std::vector<PovmElement> elements);

  /// Single outcome M_1 = 1: Eve learns nothing.
  static Povm trivial();

  std::size_t size() const noexcept { return elements_.size(); }
  const PovmElement& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<PovmElement>& elements() const noexcept { return elements_; }
  double completeness_residual() const;

 private:
  std::vector<PovmElement> elements_;
};

/// tr(E_0 M_i) and tr(E_1 M_i) for every element.
struct OutcomeTable {
  std::vector<double> p0;
  std::vector<double> p1;
};

OutcomeTable outcome_probabilities(const states::EveEnsemble& ens, const Povm& povm);

/// sum_i sqrt(tr(E_0 M_i) tr(E_1 M_i)); never below the overlap.
double exponent_sum(const states::EveEnsemble& ens, const Povm& povm);

/// Angle theta = atan(lambda_4 / lambda_1) with e0 = (cos, sin), e1 = (cos, -sin)
/// in plane coordinates. Throws DomainError if the ensemble is not of that form.
double plane_angle(const states::EveEnsemble& ens);

Povm povm_xbasis();
/// Unambiguous discrimination: c|e1_perp><e1_perp| (-> 0), c|e0_perp><e0_perp|
/// (-> 1), c_?|+z><+z| (inconclusive). Throws DomainError for overlap 0 or 1.
Povm povm_usd(const states::EveEnsemble& ens);
/// m0 = (cos b, sin b), m1 = (cos b, -sin b) with weight 1/(2 sin^2 b) and the
/// inconclusive |+z> with weight 1 - cot^2 b (dropped when it vanishes).
/// Valid for b in [pi/4, pi/2 - theta].
Povm povm_family(const states::EveEnsemble& ens, double beta);
/// Random rank-one POVM with `outcomes` elements (S^{-1/2} v_i construction).
Povm random_povm(Rng& rng, std::size_t outcomes);

// --------------------------------------------------------------------------
// Protocol primitives

using Bits = std::vector<std::uint8_t>;

enum class EveBranch { E00 = 0, E11 = 1, E01 = 2, E10 = 3 };

struct Round {
  int a = 0;
  int b = 0;
  EveBranch branch = EveBranch::E00;
};

/// One z-measured round; P(a, b) = ||e_ab||^2.
Round sample_round(const states::BellDiagonal& lambdas, Rng& rng);

/// x_i = a_i xor x.
Bits ad_encode(std::span<const std::uint8_t> a_block, int x);
/// Accepts with the common value of b_i xor x_i, rejects (nullopt) otherwise.
/// Throws DimensionError on a length mismatch.
std::optional<int> ad_decode(std::span<const std::uint8_t> b_block, std::span<const std::uint8_t> x_vec);

/// eps^N / ((1 - eps)^N + eps^N) for eps in [0, 1).
double eps_bn_analytic(double eps_b, int n);

// --------------------------------------------------------------------------
// Eve's error bounds

/// Exact tie-event bound: (1/2)(1/2^N) sum over 2 sum n_i = N of
/// N!/prod(2n_i)! prod C(2n_i, n_i) (tr(E0 M_i) tr(E1 M_i))^{n_i}.
/// Zero for odd N. Uses log-domain terms beyond N = 64.
double eve_bound_exact(const states::EveEnsemble& ens, const Povm& povm, int n);

struct AsymptoticBound {
  double value;  // (1/2)(1/2^{M-1}) (sum_i sqrt(tr(E0 M_i) tr(E1 M_i)))^N
  double floor;  // (1/2)(1/2^{M-1}) |<e0|e1>|^N
};
AsymptoticBound eve_bound_asym(const states::EveEnsemble& ens, const Povm& povm, int n);

/// Independent oracle for eve_bound_exact: enumerates all 2^N strings and all
/// M^N outcome sequences. Throws DomainError when 2^N M^N > 1e8.
double brute_force_eve_bound(const states::EveEnsemble& ens, const Povm& povm, int n);

// --------------------------------------------------------------------------
// Monte-Carlo simulation

enum class Decision { Bayes, Majority };

struct AdConfig {
  int n = 1;                   // block length N
  std::uint64_t trials = 1;    // accepted blocks to collect
  std::uint64_t seed = 0;
  Povm strategy = povm_xbasis();
  states::BellDiagonal lambdas = states::BellDiagonal::canonical({1.0, 0.0, 0.0, 0.0});
  Decision decision = Decision::Bayes;
  unsigned threads = 1;
  std::uint64_t max_attempts_per_block = 10'000'000;
};

struct AdResult {
  int n = 0;
  std::uint64_t accepted_blocks = 0;
  std::uint64_t clean_blocks = 0;  // accepted blocks without error rounds (x = y)
  std::uint64_t attempts = 0;
  double eps_bn_emp = 0.0;
  double eps_bn_stderr = 0.0;
  /// Eve's error over clean accepted blocks, the regime of e0/e1.
  double eps_en_emp = 0.0;
  double eps_en_stderr = 0.0;
  /// Eve's error over all accepted blocks.
  double eps_en_accepted_emp = 0.0;
  double eps_en_accepted_stderr = 0.0;
  double eps_bn_analytic = 0.0;
  double eve_bound_exact = 0.0;
  double eve_bound_asym = 0.0;
  double eve_bound_floor = 0.0;
};

/// Runs cfg.trials accepted blocks. Block k draws its randomness from
/// Rng::for_stream(cfg.seed, k) only, so the result is identical for any
/// thread count. Eve guesses x by exact likelihood comparison of the two
/// candidate strings (or majority vote), ties broken by a fair coin.
AdResult simulate(const AdConfig& cfg);

/// Least-squares slope of log(eps_en_emp) against N. Needs at least four
/// results, all with eps_en_emp > 0.
double rate_fit(std::span<const AdResult> results);

}  // namespace simcap::adsim

#include "simcap/adsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "simcap/error.hpp"

namespace simcap::adsim {

using qlin::CMatrix;
using qlin::Complex;
using qlin::CVector;

namespace {

// Probabilities below this are structural zeros (orthogonal directions).
constexpr double kZeroProbability = 1e-15;

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

__extension__ typedef unsigned __int128 u128;

// C(n, k) exactly for n <= 64.
double binomial_exact(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  u128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  return static_cast<double>(r);
}

// Visits every composition (n_1..n_m) of `total` into m non-negative parts.
template <typename Fn>
void for_each_composition(int total, std::size_t m, Fn&& fn) {
  std::vector<int> parts(m, 0);
  auto rec = [&](auto&& self, std::size_t i, int remaining) -> void {
    if (i + 1 == m) {
      parts[i] = remaining;
      fn(parts);
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      parts[i] = k;
      self(self, i + 1, remaining - k);
    }
  };
  rec(rec, 0, total);
}

double log_binomial_count(int total, std::size_t m) {
  // log C(total + m - 1, m - 1)
  return std::lgamma(total + static_cast<double>(m)) - std::lgamma(total + 1.0) -
         std::lgamma(static_cast<double>(m));
}

// Cumulative sampler over a small discrete distribution.
class Sampler {
 public:
  Sampler() = default;
  explicit Sampler(const std::vector<double>& p) : cumulative_(p.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      acc += p[i];
      cumulative_[i] = acc;
    }
    for (auto& c : cumulative_) c /= acc;
  }
  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform();
    for (std::size_t i = 0; i + 1 < cumulative_.size(); ++i)
      if (u < cumulative_[i]) return i;
    return cumulative_.size() - 1;
  }

 private:
  std::vector<double> cumulative_;
};

struct BlockCounts {
  std::uint64_t accepted = 0;
  std::uint64_t clean = 0;
  std::uint64_t attempts = 0;
  std::uint64_t bob_errors = 0;
  std::uint64_t eve_errors_clean = 0;
  std::uint64_t eve_errors_all = 0;

  BlockCounts& operator+=(const BlockCounts& o) {
    accepted += o.accepted;
    clean += o.clean;
    attempts += o.attempts;
    bob_errors += o.bob_errors;
    eve_errors_clean += o.eve_errors_clean;
    eve_errors_all += o.eve_errors_all;
    return *this;
  }
};

struct SimContext {
  const AdConfig& cfg;
  std::size_t outcomes;  // Eve's plane outcomes; index `outcomes` is the error flag
  std::vector<double> p0, p1;
  std::vector<double> llr_weight;  // log p0 - log p1 (finite entries only)
  std::vector<OutcomeLabel> labels;
  Sampler given0, given1;
};

// Eve's guess for x from her outcomes and the public vector x_vec.
int eve_guess(const SimContext& ctx, std::span<const std::uint8_t> x_vec,
              std::span<const std::size_t> outcome, Rng& rng) {
  const std::size_t m = ctx.outcomes;
  if (ctx.cfg.decision == Decision::Majority) {
    long votes = 0;  // > 0 favours x = 0
    for (std::size_t i = 0; i < x_vec.size(); ++i) {
      if (outcome[i] >= m) continue;
      const OutcomeLabel label = ctx.labels[outcome[i]];
      if (label == OutcomeLabel::Inconclusive) continue;
      const int g = label == OutcomeLabel::Guess0 ? 0 : 1;
      votes += ((x_vec[i] ^ g) == 0) ? 1 : -1;
    }
    if (votes == 0) return rng.bit();
    return votes > 0 ? 0 : 1;
  }

  // Hypothesis x = 0 means a = x_vec, x = 1 means a = complement.
  std::vector<long> d(m, 0);
  bool zero_h0 = false, zero_h1 = false;
  for (std::size_t i = 0; i < x_vec.size(); ++i) {
    const std::size_t j = outcome[i];
    if (j >= m) continue;  // error flag: identical likelihood under both
    const bool bit0 = x_vec[i] == 0;
    d[j] += bit0 ? 1 : -1;
    const double under_h0 = bit0 ? ctx.p0[j] : ctx.p1[j];
    const double under_h1 = bit0 ? ctx.p1[j] : ctx.p0[j];
    if (under_h0 == 0.0) zero_h0 = true;
    if (under_h1 == 0.0) zero_h1 = true;
  }
  if (zero_h0 && !zero_h1) return 1;
  if (zero_h1 && !zero_h0) return 0;
  if (zero_h0 && zero_h1) throw NumericError("Eve's outcome sequence has zero likelihood");

  double llr = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (d[j] == 0) continue;
    const double term = static_cast<double>(d[j]) * ctx.llr_weight[j];
    llr += term;
    scale += std::abs(term);
  }
  if (std::abs(llr) <= 1e-9 * scale || scale == 0.0) return rng.bit();
  return llr > 0 ? 0 : 1;
}

BlockCounts run_block(const SimContext& ctx, std::uint64_t block) {
  const AdConfig& cfg = ctx.cfg;
  const std::size_t n = static_cast<std::size_t>(cfg.n);
  Rng rng = Rng::for_stream(cfg.seed, block);
  BlockCounts counts;
  std::vector<Round> rounds(n);

  for (;;) {
    if (counts.attempts >= cfg.max_attempts_per_block) {
      throw DomainError("no accepted block within " + std::to_string(cfg.max_attempts_per_block) +
                        " attempts (N = " + std::to_string(cfg.n) + ")");
    }
    ++counts.attempts;
    const int x = rng.bit();
    // Bob rejects as soon as two rounds disagree in their error pattern, so
    // the remaining rounds of a rejected block need not be drawn.
    bool rejected = false;
    for (std::size_t i = 0; i < n; ++i) {
      rounds[i] = sample_round(cfg.lambdas, rng);
      const bool err = rounds[i].a != rounds[i].b;
      const bool first_err = rounds[0].a != rounds[0].b;
      if (err != first_err) {
        rejected = true;
        break;
      }
    }
    if (rejected) continue;

    Bits a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<std::uint8_t>(rounds[i].a);
      b[i] = static_cast<std::uint8_t>(rounds[i].b);
    }
    const Bits x_vec = ad_encode(a, x);
    const auto y = ad_decode(b, x_vec);
    if (!y) throw NumericError("internal: accepted block rejected by decoder");

    std::vector<std::size_t> outcome(n);
    bool clean = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (rounds[i].a != rounds[i].b) {
        outcome[i] = ctx.outcomes;
        clean = false;
      } else {
        outcome[i] = rounds[i].a == 0 ? ctx.given0.draw(rng) : ctx.given1.draw(rng);
      }
    }
    const int guess = eve_guess(ctx, x_vec, outcome, rng);

    counts.accepted = 1;
    counts.bob_errors = (*y != x) ? 1 : 0;
    counts.eve_errors_all = (guess != x) ? 1 : 0;
    if (clean) {
      counts.clean = 1;
      counts.eve_errors_clean = counts.eve_errors_all;
    }
    return counts;
  }
}

}  // namespace

const char* to_string(OutcomeLabel label) {
  switch (label) {
    case OutcomeLabel::Guess0: return "guess-0";
    case OutcomeLabel::Guess1: return "guess-1";
    case OutcomeLabel::Inconclusive: return "inconclusive";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// POVMs

PovmElement PovmElement::rank_one(double weight, const CVector& direction, OutcomeLabel label) {
  if (!(weight > 0.0)) throw DomainError("POVM weight must be positive");
  if (direction.dim() != 2) throw DimensionError("POVM direction must live on a 2-D plane");
  if (std::abs(direction.norm() - 1.0) > 1e-12) throw DomainError("POVM direction must be a unit vector");
  return PovmElement{Complex(weight) * qlin::projector(direction), label};
}

Povm::Povm(std::vector<PovmElement> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw DomainError("POVM needs at least one element");
  for (const auto& e : elements_) {
    if (e.op.rows() != 2 || e.op.cols() != 2) throw DimensionError("POVM elements must be 2x2");
    const auto eig = qlin::herm_eig(e.op);
    if (eig.eigenvalues.back() < -1e-12) throw DomainError("POVM element is not positive");
  }
  const double residual = completeness_residual();
  if (residual > 1e-10) {
    throw DomainError("POVM elements do not sum to the identity (residual " + std::to_string(residual) + ")");
  }
}

Povm Povm::trivial() {
  return Povm({PovmElement{CMatrix::identity(2), OutcomeLabel::Inconclusive}});
}

double Povm::completeness_residual() const {
  CMatrix total(2, 2);
  for (const auto& e : elements_) total += e.op;
  return qlin::max_abs_diff(total, CMatrix::identity(2));
}

OutcomeTable outcome_probabilities(const states::EveEnsemble& ens, const Povm& povm) {
  const auto plane = ens.plane_states();
  OutcomeTable t;
  for (const auto& e : povm.elements()) {
    double q0 = qlin::expectation(e.op, plane[0]).real();
    double q1 = qlin::expectation(e.op, plane[1]).real();
    t.p0.push_back(q0 < kZeroProbability ? 0.0 : q0);
    t.p1.push_back(q1 < kZeroProbability ? 0.0 : q1);
  }
  return t;
}

double exponent_sum(const states::EveEnsemble& ens, const Povm& povm) {
  const auto t = outcome_probabilities(ens, povm);
  double s = 0.0;
  for (std::size_t i = 0; i < t.p0.size(); ++i) s += std::sqrt(t.p0[i] * t.p1[i]);
  return s;
}

double plane_angle(const states::EveEnsemble& ens) {
  const auto plane = ens.plane_states();
  const CVector& e0 = plane[0];
  const CVector& e1 = plane[1];
  const double c = e0[0].real();
  const double s = e0[1].real();
  const bool real_form = std::abs(e0[0].imag()) < 1e-10 && std::abs(e0[1].imag()) < 1e-10 &&
                         c >= -1e-10 && s >= -1e-10 && std::abs(e1[0] - Complex(c)) < 1e-10 &&
                         std::abs(e1[1] + Complex(s)) < 1e-10;
  if (!real_form) throw DomainError("equal-outcome states are not of the form (cos t, +-sin t)");
  return std::atan2(std::max(0.0, s), std::max(0.0, c));
}

Povm povm_xbasis() {
  const double r = 1.0 / std::numbers::sqrt2;
  return Povm({PovmElement::rank_one(1.0, CVector{r, r}, OutcomeLabel::Guess0),
               PovmElement::rank_one(1.0, CVector{r, -r}, OutcomeLabel::Guess1)});
}

Povm povm_usd(const states::EveEnsemble& ens) {
  const double ov = ens.overlap();
  if (ov <= 1e-12 || ov >= 1.0 - 1e-12) {
    throw DomainError("unambiguous discrimination needs overlap in (0, 1), got " + std::to_string(ov));
  }
  const double theta = plane_angle(ens);
  const double c = 1.0 / (2.0 * std::cos(theta) * std::cos(theta));
  const double t = std::tan(theta);
  const double c_inconclusive = 1.0 - t * t;
  const CVector e1_perp{std::sin(theta), std::cos(theta)};
  const CVector e0_perp{-std::sin(theta), std::cos(theta)};
  return Povm({PovmElement::rank_one(c, e1_perp, OutcomeLabel::Guess0),
               PovmElement::rank_one(c, e0_perp, OutcomeLabel::Guess1),
               PovmElement::rank_one(c_inconclusive, CVector{1.0, 0.0}, OutcomeLabel::Inconclusive)});
}

Povm povm_family(const states::EveEnsemble& ens, double beta) {
  const double theta = plane_angle(ens);
  const double lo = std::numbers::pi / 4.0;
  const double hi = std::numbers::pi / 2.0 - theta;
  if (!(beta >= lo - 1e-12 && beta <= hi + 1e-12)) {
    throw DomainError("family angle " + std::to_string(beta) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  const double sb = std::sin(beta);
  const double cb = std::cos(beta);
  const double c = 1.0 / (2.0 * sb * sb);
  const double cot = cb / sb;
  const double c_inconclusive = 1.0 - cot * cot;
  std::vector<PovmElement> elements{
      PovmElement::rank_one(c, CVector{cb, sb}, OutcomeLabel::Guess0),
      PovmElement::rank_one(c, CVector{cb, -sb}, OutcomeLabel::Guess1)};
  if (c_inconclusive > 1e-14) {
    elements.push_back(
        PovmElement::rank_one(c_inconclusive, CVector{1.0, 0.0}, OutcomeLabel::Inconclusive));
  }
  return Povm(std::move(elements));
}

Povm random_povm(Rng& rng, std::size_t outcomes) {
  if (outcomes < 2) throw DomainError("random_povm needs at least two outcomes");
  for (;;) {
    std::vector<CVector> v;
    CMatrix s(2, 2);
    for (std::size_t i = 0; i < outcomes; ++i) {
      v.push_back(CVector{Complex(rng.normal(), rng.normal()), Complex(rng.normal(), rng.normal())});
      s += qlin::projector(v.back());
    }
    if (qlin::herm_eig(s).eigenvalues.back() < 1e-6) continue;
    const CMatrix root = qlin::psd_sqrt_inv(s, 0.0);
    std::vector<PovmElement> elements;
    for (std::size_t i = 0; i < outcomes; ++i) {
      const CVector m = root * v[i];
      const double w = std::norm(m.norm());
      const OutcomeLabel label = i % 3 == 0   ? OutcomeLabel::Guess0
                                 : i % 3 == 1 ? OutcomeLabel::Guess1
                                              : OutcomeLabel::Inconclusive;
      elements.push_back(PovmElement::rank_one(w, m.normalized(), label));
    }
    return Povm(std::move(elements));
  }
}

// ---------------------------------------------------------------------------
// Protocol primitives

Round sample_round(const states::BellDiagonal& lambdas, Rng& rng) {
  const double same = 0.5 * (lambdas[0] + lambdas[3]);
  const double diff = 0.5 * (lambdas[1] + lambdas[2]);
  const double u = rng.uniform() * (2.0 * same + 2.0 * diff);
  if (u < same) return {0, 0, EveBranch::E00};
  if (u < 2.0 * same) return {1, 1, EveBranch::E11};
  if (u < 2.0 * same + diff) return {0, 1, EveBranch::E01};
  return {1, 0, EveBranch::E10};
}

Bits ad_encode(std::span<const std::uint8_t> a_block, int x) {
  Bits out(a_block.size());
  for (std::size_t i = 0; i < a_block.size(); ++i)
    out[i] = static_cast<std::uint8_t>((a_block[i] ^ x) & 1);
  return out;
}

std::optional<int> ad_decode(std::span<const std::uint8_t> b_block, std::span<const std::uint8_t> x_vec) {
  if (b_block.size() != x_vec.size()) {
    throw DimensionError("ad_decode: block length " + std::to_string(b_block.size()) +
                         " vs x_vec length " + std::to_string(x_vec.size()));
  }
  if (b_block.empty()) throw DimensionError("ad_decode: empty block");
  const int y = (b_block[0] ^ x_vec[0]) & 1;
  for (std::size_t i = 1; i < b_block.size(); ++i)
    if (((b_block[i] ^ x_vec[i]) & 1) != y) return std::nullopt;
  return y;
}

double eps_bn_analytic(double eps_b, int n) {
  if (!(eps_b >= 0.0 && eps_b < 1.0)) throw DomainError("eps_b must lie in [0, 1)");
  if (n < 1) throw DomainError("block length must be >= 1");
  if (eps_b == 0.0) return 0.0;
  const double r = eps_b / (1.0 - eps_b);
  if (r <= 1.0) {
    const double rn = std::pow(r, n);
    return rn / (1.0 + rn);
  }
  return 1.0 / (1.0 + std::pow(1.0 / r, n));
}

// ---------------------------------------------------------------------------
// Bounds

double eve_bound_exact(const states::EveEnsemble& ens, const Povm& povm, int n) {
  if (n < 1) throw DomainError("block length must be >= 1");
  if (n % 2 != 0) return 0.0;
  const auto t = outcome_probabilities(ens, povm);
  const std::size_t m = povm.size();
  const int half = n / 2;
  if (log_binomial_count(half, m) > std::log(1e8)) {
    throw DomainError("eve_bound_exact: too many outcome-count vectors to enumerate");
  }
  std::vector<double> q(m);
  for (std::size_t i = 0; i < m; ++i) q[i] = t.p0[i] * t.p1[i];

  CompensatedSum sum;
  if (n <= 64) {
    for_each_composition(half, m, [&](const std::vector<int>& parts) {
      double term = 1.0;
      int remaining = n;
      for (std::size_t i = 0; i < m; ++i) {
        const int k = parts[i];
        if (k > 0 && q[i] == 0.0) return;
        term *= binomial_exact(remaining, 2 * k) * binomial_exact(2 * k, k) * std::pow(q[i], k);
        remaining -= 2 * k;
      }
      sum.add(term);
    });
    return 0.5 * std::ldexp(sum.value(), -n);
  }
  // N!/prod (2k)! * prod C(2k, k) = N! / prod (k!)^2
  const double log_prefactor = std::lgamma(n + 1.0) - n * std::numbers::ln2;
  for_each_composition(half, m, [&](const std::vector<int>& parts) {
    double log_term = log_prefactor;
    for (std::size_t i = 0; i < m; ++i) {
      const int k = parts[i];
      if (k == 0) continue;
      if (q[i] == 0.0) return;
      log_term += -2.0 * std::lgamma(k + 1.0) + k * std::log(q[i]);
    }
    sum.add(std::exp(log_term));
  });
  return 0.5 * sum.value();
}

AsymptoticBound eve_bound_asym(const states::EveEnsemble& ens, const Povm& povm, int n) {
  if (n < 0) throw DomainError("block length must be >= 0");
  const double prefactor = 0.5 * std::ldexp(1.0, -static_cast<int>(povm.size() - 1));
  return {prefactor * std::pow(exponent_sum(ens, povm), n), prefactor * std::pow(ens.overlap(), n)};
}

double brute_force_eve_bound(const states::EveEnsemble& ens, const Povm& povm, int n) {
  if (n < 1) throw DomainError("block length must be >= 1");
  const std::size_t m = povm.size();
  const double size = std::pow(2.0, n) * std::pow(static_cast<double>(m), n);
  if (size > 1e8) throw DomainError("brute_force_eve_bound: 2^N M^N exceeds 1e8");
  const auto t = outcome_probabilities(ens, povm);

  // count[j][bit]: rounds with outcome j and Alice bit `bit`.
  std::vector<std::array<int, 2>> count(m, {0, 0});
  int zeros = 0;
  CompensatedSum tie_probability;
  auto rec = [&](auto&& self, int pos, double prob) -> void {
    if (pos == n) {
      if (2 * zeros != n) return;
      for (std::size_t j = 0; j < m; ++j)
        if (count[j][0] != count[j][1]) return;
      tie_probability.add(prob);
      return;
    }
    for (int bit = 0; bit < 2; ++bit) {
      zeros += bit == 0;
      for (std::size_t j = 0; j < m; ++j) {
        const double pj = bit == 0 ? t.p0[j] : t.p1[j];
        ++count[j][bit];
        self(self, pos + 1, prob * 0.5 * pj);
        --count[j][bit];
      }
      zeros -= bit == 0;
    }
  };
  rec(rec, 0, 1.0);
  return 0.5 * tie_probability.value();
}

// ---------------------------------------------------------------------------
// Simulation

AdResult simulate(const AdConfig& cfg) {
  if (cfg.n < 1) throw DomainError("block length must be >= 1");
  if (cfg.trials < 1) throw DomainError("trials must be >= 1");
  if (!cfg.lambdas.is_canonical()) throw DomainError("simulate expects canonical Bell weights");

  const auto ens = states::eve_conditionals(states::purification_from_bell_diagonal(cfg.lambdas));
  const auto table = outcome_probabilities(ens, cfg.strategy);

  SimContext ctx{cfg, cfg.strategy.size(), table.p0, table.p1, {}, {}, Sampler(table.p0),
                 Sampler(table.p1)};
  for (std::size_t j = 0; j < ctx.outcomes; ++j) {
    const bool finite = ctx.p0[j] > 0.0 && ctx.p1[j] > 0.0;
    ctx.llr_weight.push_back(finite ? std::log(ctx.p0[j]) - std::log(ctx.p1[j]) : 0.0);
    ctx.labels.push_back(cfg.strategy[j].label);
  }

  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(
                                                                            std::min<std::uint64_t>(cfg.trials, 1024))));
  std::vector<BlockCounts> partial(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      const std::uint64_t begin = cfg.trials * w / workers;
      const std::uint64_t end = cfg.trials * (w + 1) / workers;
      for (std::uint64_t k = begin; k < end; ++k) partial[w] += run_block(ctx, k);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  BlockCounts total;
  for (const auto& p : partial) total += p;

  auto rate = [](std::uint64_t hits, std::uint64_t n) {
    return n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
  };
  auto stderr_of = [](double p, std::uint64_t n) {
    return n == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  };

  AdResult r;
  r.n = cfg.n;
  r.accepted_blocks = total.accepted;
  r.clean_blocks = total.clean;
  r.attempts = total.attempts;
  r.eps_bn_emp = rate(total.bob_errors, total.accepted);
  r.eps_bn_stderr = stderr_of(r.eps_bn_emp, total.accepted);
  r.eps_en_emp = rate(total.eve_errors_clean, total.clean);
  r.eps_en_stderr = stderr_of(r.eps_en_emp, total.clean);
  r.eps_en_accepted_emp = rate(total.eve_errors_all, total.accepted);
  r.eps_en_accepted_stderr = stderr_of(r.eps_en_accepted_emp, total.accepted);
  r.eps_bn_analytic = eps_bn_analytic(ens.eps_b(), cfg.n);
  r.eve_bound_exact = eve_bound_exact(ens, cfg.strategy, cfg.n);
  const auto asym = eve_bound_asym(ens, cfg.strategy, cfg.n);
  r.eve_bound_asym = asym.value;
  r.eve_bound_floor = asym.floor;
  return r;
}

double rate_fit(std::span<const AdResult> results) {
  if (results.size() < 4) throw DomainError("rate_fit needs at least four block lengths");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : results) {
    if (!(r.eps_en_emp > 0.0)) {
      throw DomainError("rate_fit: zero empirical eps_EN at N = " + std::to_string(r.n) +
                        " (insufficient trials)");
    }
    const double x = r.n;
    const double y = std::log(r.eps_en_emp);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(results.size());
  const double denom = k * sxx - sx * sx;
  if (denom == 0.0) throw DomainError("rate_fit needs distinct block lengths");
  return (k * sxy - sx * sy) / denom;
}

}  // namespace simcap::adsim

#include "simcap/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "simcap/error.hpp"
#include "simcap/filter.hpp"

namespace simcap::channel {

using qlin::CMatrix;
using qlin::Complex;
using qlin::CVector;
using qlin::Subsystem;

namespace {

constexpr double kChannelTolerance = 1e-10;

// Outputs of rank-deficient channels can whiten slowly (linear rate close to
// 1); the equivalence check only needs some valid filter, so allow more steps.
filter::FilterOptions channel_filter_options() {
  filter::FilterOptions o;
  o.max_iterations = 100000;
  return o;
}

CMatrix ket_bra(std::size_t j, std::size_t k) {
  CMatrix m(2, 2);
  m(j, k) = 1.0;
  return m;
}

CMatrix choi_from_blocks(const std::array<std::array<CMatrix, 2>, 2>& images) {
  CMatrix choi(4, 4);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) choi(2 * j + r, 2 * k + c) = 0.5 * images[j][k](r, c);
  return choi;
}

void symmetrize(CMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    m(i, i) = m(i, i).real();
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const Complex avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
      m(i, j) = avg;
      m(j, i) = std::conj(avg);
    }
  }
}

void check_choi(const CMatrix& choi) {
  if (choi.rows() != 4 || choi.cols() != 4) throw DimensionError("Choi matrix must be 4x4");
  const double herm = qlin::hermiticity_residual(choi);
  if (herm > kChannelTolerance) {
    throw DomainError("Choi matrix is not Hermitian (residual " + std::to_string(herm) + ")");
  }
  const double min_eig = qlin::herm_eig(choi).eigenvalues.back();
  if (min_eig < -kChannelTolerance) {
    throw DomainError("Choi matrix is not positive (min eigenvalue " + std::to_string(min_eig) + ")");
  }
  const double tr = qlin::trace(choi).real();
  if (std::abs(tr - 1.0) > kChannelTolerance) {
    throw DomainError("Choi matrix trace " + std::to_string(tr) + " != 1");
  }
  const CMatrix input_marginal = qlin::partial_trace(choi, 2, 2, Subsystem::A);
  const double tp = qlin::max_abs_diff(input_marginal, Complex(0.5) * CMatrix::identity(2));
  if (tp > kChannelTolerance) {
    throw DomainError("channel is not trace preserving (residual " + std::to_string(tp) + ")");
  }
}

Verdict verdict_from(states::Entanglement e) {
  switch (e) {
    case states::Entanglement::Entangled: return Verdict::Entangling;
    case states::Entanglement::Separable: return Verdict::Breaking;
    case states::Entanglement::Boundary: return Verdict::Boundary;
  }
  return Verdict::Boundary;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Breaking: return "breaking";
    case Verdict::Entangling: return "entangling";
    case Verdict::Boundary: return "boundary";
  }
  return "?";
}

CMatrix choi_from_kraus(const std::vector<CMatrix>& kraus) {
  if (kraus.empty()) throw DomainError("empty Kraus list");
  CMatrix completeness(2, 2);
  for (const auto& k : kraus) {
    if (k.rows() != 2 || k.cols() != 2) throw DimensionError("Kraus operators must be 2x2");
    completeness += qlin::adjoint(k) * k;
  }
  const double residual = qlin::max_abs_diff(completeness, CMatrix::identity(2));
  if (residual > kChannelTolerance) {
    throw DomainError("Kraus operators are not complete (residual " + std::to_string(residual) + ")");
  }
  const CMatrix phi = qlin::projector(states::bell_state(states::BellIndex::PhiPlus));
  CMatrix choi(4, 4);
  for (const auto& k : kraus) {
    const CMatrix local = qlin::tensor(CMatrix::identity(2), k);
    choi += local * phi * qlin::adjoint(local);
  }
  symmetrize(choi);
  return choi;
}

QubitChannel::QubitChannel(std::optional<std::vector<CMatrix>> kraus, CMatrix choi)
    : kraus_(std::move(kraus)), choi_(std::move(choi)) {}

QubitChannel QubitChannel::from_kraus(std::vector<CMatrix> kraus) {
  CMatrix choi = choi_from_kraus(kraus);
  check_choi(choi);
  return QubitChannel(std::move(kraus), std::move(choi));
}

QubitChannel QubitChannel::from_choi(CMatrix choi) {
  check_choi(choi);
  symmetrize(choi);
  return QubitChannel(std::nullopt, std::move(choi));
}

QubitChannel QubitChannel::from_measure_prepare(const std::vector<CMatrix>& effects,
                                                const std::vector<CMatrix>& prepared) {
  if (effects.empty() || effects.size() != prepared.size()) {
    throw DomainError("measure-and-prepare needs matching, non-empty effect and state lists");
  }
  CMatrix total(2, 2);
  for (const auto& e : effects) total += e;
  if (qlin::max_abs_diff(total, CMatrix::identity(2)) > kChannelTolerance) {
    throw DomainError("measurement effects do not sum to the identity");
  }
  // U(|j><k|) = sum_l <k|L_l|j> rho_l
  std::array<std::array<CMatrix, 2>, 2> images;
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k) {
      CMatrix img(2, 2);
      for (std::size_t l = 0; l < effects.size(); ++l) img += effects[l](k, j) * prepared[l];
      images[j][k] = img;
    }
  return from_choi(choi_from_blocks(images));
}

QubitChannel QubitChannel::identity() { return from_kraus({CMatrix::identity(2)}); }

QubitChannel QubitChannel::depolarizing(double p) {
  if (!(p >= -1.0 / 3.0 - 1e-15 && p <= 1.0)) throw DomainError("depolarizing parameter must lie in [-1/3, 1]");
  const double a = std::sqrt(std::max(0.0, (1.0 + 3.0 * p) / 4.0));
  const double b = std::sqrt(std::max(0.0, (1.0 - p) / 4.0));
  return from_kraus({Complex(a) * CMatrix::identity(2), Complex(b) * qlin::pauli::x(),
                     Complex(b) * qlin::pauli::y(), Complex(b) * qlin::pauli::z()});
}

QubitChannel QubitChannel::dephasing(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("dephasing parameter must lie in [0, 1]");
  return from_kraus({Complex(std::sqrt(1.0 - p)) * CMatrix::identity(2), Complex(std::sqrt(p)) * qlin::pauli::z()});
}

QubitChannel QubitChannel::measure_resend_z() {
  return from_measure_prepare({ket_bra(0, 0), ket_bra(1, 1)}, {ket_bra(0, 0), ket_bra(1, 1)});
}

CMatrix QubitChannel::apply(const CMatrix& x) const {
  if (x.rows() != 2 || x.cols() != 2) throw DimensionError("channel input must be 2x2");
  CMatrix out(2, 2);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k) {
      if (x(j, k) == 0.0) continue;
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) out(r, c) += 2.0 * x(j, k) * choi_(2 * j + r, 2 * k + c);
    }
  return out;
}

ProbeState::ProbeState(CVector phi) : phi_(std::move(phi)) {
  if (phi_.dim() != 4) throw DimensionError("probe state must have dimension 4");
  const double n = phi_.norm();
  if (std::abs(n - 1.0) > 1e-12) throw DomainError("probe state norm " + std::to_string(n) + " != 1");
}

ProbeState ProbeState::phi_plus() { return ProbeState(states::bell_state(states::BellIndex::PhiPlus)); }

ProbeState ProbeState::schmidt(double theta) {
  return ProbeState(CVector{std::cos(theta), 0.0, 0.0, std::sin(theta)});
}

states::TwoQubitState apply_to_half(const QubitChannel& ch, const ProbeState& probe) {
  const CVector& phi = probe.phi();
  CMatrix out(4, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t ip = 0; ip < 2; ++ip)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t jp = 0; jp < 2; ++jp) {
          const Complex coeff = phi[2 * i + j] * std::conj(phi[2 * ip + jp]);
          if (coeff == 0.0) continue;
          for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c)
              out(2 * i + r, 2 * ip + c) += coeff * 2.0 * ch.choi()(2 * j + r, 2 * jp + c);
        }
  symmetrize(out);
  return states::TwoQubitState::normalized(out);
}

Verdict is_entanglement_breaking(const QubitChannel& ch, double tol) {
  return verdict_from(states::is_entangled(states::TwoQubitState(ch.choi()), tol));
}

ProbeSearch best_probe(const QubitChannel& ch, double tol) {
  ProbeSearch result;
  result.verdict = is_entanglement_breaking(ch, tol);
  result.min_pt = states::min_pt_eigenvalue(ch.choi());
  if (result.verdict != Verdict::Entangling) return result;

  std::vector<ProbeState> candidates{ProbeState::phi_plus()};
  for (const auto& v : qlin::herm_eig(ch.choi()).eigenvectors) candidates.emplace_back(v.normalized());

  const double r = 1.0 / std::numbers::sqrt2;
  const std::array<CMatrix, 3> rotations{
      CMatrix::identity(2),
      CMatrix{{r, r}, {r, -r}},
      CMatrix{{r, r}, {Complex(0, r), Complex(0, -r)}},
  };
  constexpr int kGrid = 16;
  for (int g = 1; g < kGrid; ++g) {
    const double theta = 0.5 * std::numbers::pi * g / kGrid;
    const CVector base = ProbeState::schmidt(theta).phi();
    for (const auto& rot : rotations) {
      const CVector v = qlin::tensor(CMatrix::identity(2), rot) * base;
      candidates.emplace_back(v.normalized());
    }
  }

  double best = 0.0;
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double m = states::min_pt_eigenvalue(apply_to_half(ch, candidates[i]).rho());
    if (i == 0 || m < best - 1e-15) {
      best = m;
      best_index = i;
    }
  }
  result.probe = candidates[best_index];
  result.min_pt = best;
  return result;
}

PmStates pm_states(const ProbeState& probe) {
  const CVector& phi = probe.phi();
  PmStates out;
  for (std::size_t a = 0; a < 2; ++a) {
    const CVector branch{phi[2 * a], phi[2 * a + 1]};
    const double weight = std::norm(branch.norm());
    if (weight <= 1e-15) {
      throw DomainError("probe has zero weight on Alice's z outcome " + std::to_string(a));
    }
    out.priors[a] = weight;
    out.psi[a] = branch.normalized();
  }
  return out;
}

double pm_equivalence_check(const QubitChannel& ch, const ProbeState& probe) {
  const auto rho = apply_to_half(ch, probe);
  const auto filt = filter::bell_diagonalize(rho, channel_filter_options());
  const CMatrix k_b = filt.u_b * filt.f_b;
  const CMatrix k_b_h = qlin::adjoint(k_b);

  std::array<CMatrix, 2> bob_effect;
  for (std::size_t b = 0; b < 2; ++b) bob_effect[b] = k_b_h * ket_bra(b, b) * k_b;

  // Entanglement-based picture.
  std::array<double, 4> eb{};
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      const CMatrix op = qlin::tensor(ket_bra(a, a), bob_effect[b]);
      eb[2 * a + b] = qlin::trace(op * rho.rho()).real();
    }

  // Prepare-and-measure picture.
  const auto pm = pm_states(probe);
  std::array<double, 4> prep{};
  for (std::size_t a = 0; a < 2; ++a) {
    const CMatrix received = ch.apply(qlin::projector(pm.psi[a]));
    for (std::size_t b = 0; b < 2; ++b)
      prep[2 * a + b] = pm.priors[a] * qlin::trace(bob_effect[b] * received).real();
  }

  double eb_total = 0.0, pm_total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    eb_total += eb[i];
    pm_total += prep[i];
  }
  if (!(eb_total > 0.0) || !(pm_total > 0.0)) throw NumericError("filter annihilates the channel output");
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(eb[i] / eb_total - prep[i] / pm_total));
  return worst;
}

KeyAnalysis analyze_key(const QubitChannel& ch, double tol) {
  KeyAnalysis out;
  out.search = best_probe(ch, tol);
  const ProbeState probe = out.search.probe ? *out.search.probe : ProbeState::phi_plus();
  const auto rho = apply_to_half(ch, probe);
  try {
    out.filter = filter::bell_diagonalize(rho, channel_filter_options());
  } catch (const SingularMarginalError&) {
    // A pure marginal means a product-like output: nothing to distil.
    return out;
  }
  out.lambdas = out.filter->lambdas;
  const auto ens = states::eve_conditionals(states::purification_from_bell_diagonal(*out.lambdas));
  out.secure = states::security_condition(ens);
  out.eps_b = ens.eps_b();
  out.overlap = ens.overlap();
  return out;
}

QubitChannel random_channel(Rng& rng, std::size_t env_dim) {
  if (env_dim < 1 || env_dim > 4) throw DomainError("environment dimension must be 1..4");
  const CMatrix u = random::unitary(rng, 2 * env_dim);
  // Isometry = first two columns; row index = out * env_dim + e.
  std::vector<CMatrix> kraus(env_dim, CMatrix(2, 2));
  for (std::size_t e = 0; e < env_dim; ++e)
    for (std::size_t out = 0; out < 2; ++out)
      for (std::size_t in = 0; in < 2; ++in) kraus[e](out, in) = u(out * env_dim + e, in);
  return QubitChannel::from_kraus(std::move(kraus));
}

QubitChannel random_breaking_channel(Rng& rng, std::size_t outcomes) {
  if (outcomes < 1) throw DomainError("measure-and-prepare channel needs at least one outcome");
  std::vector<CMatrix> g;
  CMatrix total(2, 2);
  for (std::size_t k = 0; k < outcomes; ++k) {
    g.push_back(random::ginibre_state(rng, 2, 2));
    total += g.back();
  }
  const CMatrix s = qlin::psd_sqrt_inv(total, 0.0);
  std::vector<CMatrix> effects, prepared;
  for (std::size_t k = 0; k < outcomes; ++k) {
    CMatrix e = s * g[k] * s;
    symmetrize(e);
    effects.push_back(e);
    prepared.push_back(random::ginibre_state(rng, 2, 2));
  }
  return QubitChannel::from_measure_prepare(effects, prepared);
}

}  // namespace simcap::channel

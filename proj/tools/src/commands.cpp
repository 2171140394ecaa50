#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "simcap/error.hpp"
#include "simcap/random.hpp"
#include "simcap_cli/cli.hpp"

namespace simcap::cli {

using json = nlohmann::json;
using qlin::CMatrix;
using qlin::CVector;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

json to_json(const CVector& v) {
  json out = json::array();
  for (std::size_t i = 0; i < v.dim(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

std::string joined(const std::array<double, 4>& w) {
  return fmt(w[0]) + "," + fmt(w[1]) + "," + fmt(w[2]) + "," + fmt(w[3]);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write output file " + path.string());
  f << content;
}

// Writes `content` to --out (plus manifest) or to the stream.
void emit(const GlobalOptions& g, const std::string& command, std::vector<std::pair<std::string, std::string>> params,
          const std::string& content, Clock::time_point t0, std::ostream& out) {
  if (g.out.empty()) {
    out << content;
    return;
  }
  write_text_file(g.out, content);
  params.emplace_back("tol", fmt(g.tol));
  params.emplace_back("threads", std::to_string(resolve_threads(g.threads)));
  write_manifest({command, std::move(params), g.seed, seconds_since(t0), {g.out}});
}

// Runs fn(i) for i in [0, count) over `threads` workers, contiguous chunks.
void parallel_for(std::uint64_t count, unsigned threads, const std::function<void(std::uint64_t)>& fn) {
  const unsigned workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, count)));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      const std::uint64_t begin = count * w / workers;
      const std::uint64_t end = count * (w + 1) / workers;
      for (std::uint64_t i = begin; i < end; ++i) fn(i);
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
}

// Smallest N with eps_BN(N) below the x-basis floor (1/4) overlap^N.
std::optional<int> minimal_block_length(double eps_b, double overlap) {
  if (eps_b == 0.0) return 1;
  const double r = eps_b / (1.0 - eps_b);
  if (!(r < overlap)) return std::nullopt;
  const double lr = std::log(r);
  const double lo = std::log(overlap);
  for (int n = 1; n <= 1000000; ++n) {
    const double lhs = n * lr - std::log1p(std::exp(n * lr));
    const double rhs = std::log(0.25) + n * lo;
    if (lhs < rhs) return n;
  }
  return std::nullopt;
}

std::string verdict_text(bool b) { return b ? "true" : "false"; }

}  // namespace

// ---------------------------------------------------------------------------
// analyze-state

AnalyzeStateReport analyze_state(const states::TwoQubitState& s, double tol) {
  AnalyzeStateReport r;
  r.ppt = states::is_entangled(s, tol);
  r.min_pt = states::min_pt_eigenvalue(s.rho());
  try {
    r.filter = filter::bell_diagonalize(s);
  } catch (const NumericError& e) {
    r.filter_error = e.what();
    return r;
  }
  const auto ens = states::eve_conditionals(states::purification_from_bell_diagonal(r.filter->lambdas));
  r.eps_b = ens.eps_b();
  r.overlap = ens.overlap();
  r.secure = states::security_condition(ens);
  r.mutual_info = states::mutual_info_ab(
      states::z_measurement_distribution(states::bell_diagonal_state(r.filter->lambdas)));
  if (r.secure) r.min_block_length = minimal_block_length(r.eps_b, r.overlap);
  return r;
}

int cmd_analyze_state(const std::filesystem::path& input, const GlobalOptions& g, std::ostream& out) {
  const auto t0 = Clock::now();
  const InputDocument doc = load_input(input);
  if (!doc.state) throw InputError("field 'kind': analyze-state needs density_matrix or bell_diagonal, got " + doc.kind);
  const AnalyzeStateReport r = analyze_state(*doc.state, g.tol);

  std::ostringstream text;
  json j;
  text << "kind: " << doc.kind << '\n';
  text << "ppt: " << states::to_string(r.ppt) << '\n';
  text << "min_pt_eigenvalue: " << fmt(r.min_pt) << '\n';
  j["kind"] = doc.kind;
  j["ppt"] = states::to_string(r.ppt);
  j["min_pt_eigenvalue"] = r.min_pt;
  if (!r.filter) {
    text << "filter_error: " << r.filter_error << '\n';
    j["filter_error"] = r.filter_error;
  } else {
    const auto& f = *r.filter;
    text << "p_success: " << fmt(f.p_success) << '\n';
    text << "filter_iterations: " << f.iterations << '\n';
    text << "lambdas: " << joined(f.lambdas.lambdas()) << '\n';
    text << "f_a: " << to_json(f.f_a).dump() << '\n';
    text << "f_b: " << to_json(f.f_b).dump() << '\n';
    text << "u_a: " << to_json(f.u_a).dump() << '\n';
    text << "u_b: " << to_json(f.u_b).dump() << '\n';
    text << "eps_b: " << fmt(r.eps_b) << '\n';
    text << "overlap: " << fmt(r.overlap) << '\n';
    text << "secure: " << verdict_text(r.secure) << '\n';
    text << "mutual_info_ab: " << fmt(r.mutual_info) << '\n';
    text << "min_block_length: " << (r.min_block_length ? std::to_string(*r.min_block_length) : "none") << '\n';
    j["filter"] = {{"f_a", to_json(f.f_a)},     {"f_b", to_json(f.f_b)},
                   {"u_a", to_json(f.u_a)},     {"u_b", to_json(f.u_b)},
                   {"p_success", f.p_success}, {"iterations", f.iterations},
                   {"bell_residual", f.bell_residual}};
    j["lambdas"] = f.lambdas.lambdas();
    j["eps_b"] = r.eps_b;
    j["overlap"] = r.overlap;
    j["secure"] = r.secure;
    j["mutual_info_ab"] = r.mutual_info;
    j["min_block_length"] = r.min_block_length ? json(*r.min_block_length) : json(nullptr);
  }
  out << text.str();
  if (!g.out.empty()) {
    write_text_file(g.out, j.dump(2) + "\n");
    write_manifest({"analyze-state", {{"input", input.string()}, {"tol", fmt(g.tol)}}, g.seed, seconds_since(t0), {g.out}});
  }
  return r.filter ? kOk : kNumericError;
}

// ---------------------------------------------------------------------------
// ad-sim

const std::vector<std::string>& ad_sim_columns() {
  static const std::vector<std::string> cols{
      "n",          "accepted_blocks",      "clean_blocks",           "attempts",        "eps_bn_emp",
      "eps_bn_stderr", "eps_bn_analytic",   "eps_en_emp",             "eps_en_stderr",   "eps_en_accepted_emp",
      "eps_en_accepted_stderr", "eve_bound_exact", "eve_bound_asym", "eve_bound_floor"};
  return cols;
}

int cmd_ad_sim(const AdSimOptions& o, const GlobalOptions& g, std::ostream& out) {
  const auto t0 = Clock::now();
  const auto [lo, hi] = parse_range(o.n);
  if (o.trials < 1) throw InputError("--trials must be >= 1");
  states::BellDiagonal lambdas = [&] {
    try {
      return states::BellDiagonal::canonical(o.lambdas);
    } catch (const Error& e) {
      throw InputError(std::string("--lambdas: ") + e.what());
    }
  }();
  const auto ens = states::eve_conditionals(states::purification_from_bell_diagonal(lambdas));

  adsim::AdConfig cfg;
  cfg.strategy = parse_strategy(o.strategy, ens);
  cfg.lambdas = lambdas;
  cfg.trials = o.trials;
  cfg.seed = g.seed;
  cfg.threads = resolve_threads(g.threads);
  if (o.decision == "bayes") {
    cfg.decision = adsim::Decision::Bayes;
  } else if (o.decision == "majority") {
    cfg.decision = adsim::Decision::Majority;
  } else {
    throw InputError("--decision: expected bayes or majority, got '" + o.decision + "'");
  }

  std::ostringstream csv;
  csv << "# schema=" << kAdSimSchema << '\n';
  const auto& cols = ad_sim_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) csv << (i ? "," : "") << cols[i];
  csv << '\n';
  for (int n = lo; n <= hi; ++n) {
    cfg.n = n;
    const auto r = adsim::simulate(cfg);
    csv << r.n << ',' << r.accepted_blocks << ',' << r.clean_blocks << ',' << r.attempts << ',' << fmt(r.eps_bn_emp)
        << ',' << fmt(r.eps_bn_stderr) << ',' << fmt(r.eps_bn_analytic) << ',' << fmt(r.eps_en_emp) << ','
        << fmt(r.eps_en_stderr) << ',' << fmt(r.eps_en_accepted_emp) << ',' << fmt(r.eps_en_accepted_stderr) << ','
        << fmt(r.eve_bound_exact) << ',' << fmt(r.eve_bound_asym) << ',' << fmt(r.eve_bound_floor) << '\n';
  }
  emit(g, "ad-sim",
       {{"lambdas", joined(o.lambdas)}, {"n", o.n}, {"strategy", o.strategy}, {"decision", o.decision},
        {"trials", std::to_string(o.trials)},
        {"eps_en_emp_conditioning", "accepted blocks without error rounds"},
        {"eps_en_accepted_emp_conditioning", "all accepted blocks"}},
       csv.str(), t0, out);
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

namespace {

enum class Outcome : std::uint8_t { Agree, Counterexample, Skipped, FilterFailure };

struct StateCheck {
  Outcome outcome = Outcome::Agree;
  bool entangled = false;
};

struct ChannelCheck {
  Outcome outcome = Outcome::Agree;
  bool entangling = false;
  double pm = 0.0;
};

StateCheck check_state(std::uint64_t seed, std::uint64_t i, double tol) {
  Rng rng = Rng::for_stream(seed, i);
  const CMatrix rho = i % 2 == 0 ? random::spectrum_state(rng, 4) : random::ginibre_state(rng, 4, 4);
  const states::TwoQubitState s(rho);
  StateCheck c;
  const auto ppt = states::is_entangled(s, tol);
  c.entangled = ppt == states::Entanglement::Entangled;
  if (ppt == states::Entanglement::Boundary) {
    c.outcome = Outcome::Skipped;
    return c;
  }
  try {
    const auto f = filter::bell_diagonalize(s);
    if (std::abs(f.lambdas[0] - 0.5) <= 1e-9) {
      c.outcome = Outcome::Skipped;
      return c;
    }
    const bool secure =
        states::security_condition(states::eve_conditionals(states::purification_from_bell_diagonal(f.lambdas)));
    c.outcome = secure == c.entangled ? Outcome::Agree : Outcome::Counterexample;
  } catch (const NumericError&) {
    c.outcome = Outcome::FilterFailure;
  }
  return c;
}

ChannelCheck check_channel(std::uint64_t seed, std::uint64_t j, double tol) {
  Rng rng = Rng::for_stream(mix64(seed ^ 0x6368616e6e656cULL), j);
  const auto ch = channel::random_channel(rng, 1 + j % 4);
  ChannelCheck c;
  try {
    const auto k = channel::analyze_key(ch, tol);
    c.entangling = k.search.verdict == channel::Verdict::Entangling;
    const auto probe = k.search.probe ? *k.search.probe : channel::ProbeState::phi_plus();
    c.pm = channel::pm_equivalence_check(ch, probe);
    if (k.search.verdict == channel::Verdict::Boundary) {
      c.outcome = Outcome::Skipped;
    } else if (!k.lambdas) {
      c.outcome = Outcome::FilterFailure;
    } else if (std::abs((*k.lambdas)[0] - 0.5) <= 1e-9) {
      c.outcome = Outcome::Skipped;
    } else {
      c.outcome = k.secure == c.entangling ? Outcome::Agree : Outcome::Counterexample;
    }
  } catch (const NumericError&) {
    c.outcome = Outcome::FilterFailure;
  }
  return c;
}

}  // namespace

VerifySummary run_verify(const VerifyOptions& o, std::uint64_t seed, unsigned threads, double tol) {
  std::vector<StateCheck> sc(o.samples);
  std::vector<ChannelCheck> cc(o.channel_samples);
  parallel_for(o.samples, threads, [&](std::uint64_t i) { sc[i] = check_state(seed, i, tol); });
  parallel_for(o.channel_samples, threads, [&](std::uint64_t j) { cc[j] = check_channel(seed, j, tol); });

  VerifySummary s;
  s.states = o.samples;
  for (const auto& c : sc) {
    s.state_entangled += c.entangled;
    s.state_counterexamples += c.outcome == Outcome::Counterexample;
    s.state_skipped += c.outcome == Outcome::Skipped;
    s.state_filter_failures += c.outcome == Outcome::FilterFailure;
  }
  s.channels = o.channel_samples;
  for (const auto& c : cc) {
    s.channel_entangling += c.entangling;
    s.channel_counterexamples += c.outcome == Outcome::Counterexample;
    s.channel_skipped += c.outcome == Outcome::Skipped;
    s.channel_filter_failures += c.outcome == Outcome::FilterFailure;
    s.max_pm_discrepancy = std::max(s.max_pm_discrepancy, c.pm);
  }
  return s;
}

int cmd_verify(const VerifyOptions& o, const GlobalOptions& g, std::ostream& out) {
  const auto t0 = Clock::now();
  if (o.samples < 1) throw InputError("--samples must be >= 1");
  const auto s = run_verify(o, g.seed, resolve_threads(g.threads), g.tol);
  const bool violated = s.state_counterexamples > 0 || s.channel_counterexamples > 0 || s.max_pm_discrepancy > 1e-10;
  const bool failed = s.state_filter_failures > 0 || s.channel_filter_failures > 0;

  std::ostringstream r;
  r << "seed: " << g.seed << '\n';
  r << "tol: " << fmt(g.tol) << '\n';
  r << "states: " << s.states << '\n';
  r << "states_entangled: " << s.state_entangled << '\n';
  r << "states_counterexamples: " << s.state_counterexamples << '\n';
  r << "states_boundary_skipped: " << s.state_skipped << '\n';
  r << "states_filter_failures: " << s.state_filter_failures << '\n';
  r << "channels: " << s.channels << '\n';
  r << "channels_entangling: " << s.channel_entangling << '\n';
  r << "channels_counterexamples: " << s.channel_counterexamples << '\n';
  r << "channels_boundary_skipped: " << s.channel_skipped << '\n';
  r << "channels_filter_failures: " << s.channel_filter_failures << '\n';
  r << "max_pm_discrepancy: " << fmt(s.max_pm_discrepancy) << '\n';
  r << "result: " << (violated ? "counterexample" : failed ? "incomplete" : "ok") << '\n';
  emit(g, "verify",
       {{"samples", std::to_string(o.samples)}, {"channel_samples", std::to_string(o.channel_samples)}}, r.str(), t0,
       out);
  if (violated) return kPropertyViolation;
  return failed ? kNumericError : kOk;
}

// ---------------------------------------------------------------------------
// analyze-channel

int cmd_analyze_channel(const std::filesystem::path& input, const GlobalOptions& g, std::ostream& out) {
  const auto t0 = Clock::now();
  const InputDocument doc = load_input(input);
  if (!doc.channel) throw InputError("field 'kind': analyze-channel needs kraus or choi, got " + doc.kind);
  const auto& ch = *doc.channel;

  const auto key = channel::analyze_key(ch, g.tol);
  const auto probe = key.search.probe ? *key.search.probe : channel::ProbeState::phi_plus();
  const auto pm = channel::pm_states(probe);

  std::ostringstream text;
  json j;
  const double choi_min_pt = states::min_pt_eigenvalue(ch.choi());
  text << "kind: " << doc.kind << '\n';
  text << "eb_verdict: " << channel::to_string(key.search.verdict) << '\n';
  text << "choi_min_pt_eigenvalue: " << fmt(choi_min_pt) << '\n';
  j["kind"] = doc.kind;
  j["eb_verdict"] = channel::to_string(key.search.verdict);
  j["choi_min_pt_eigenvalue"] = choi_min_pt;
  if (key.search.probe) {
    text << "best_probe: " << to_json(key.search.probe->phi()).dump() << '\n';
    text << "probe_min_pt_eigenvalue: " << fmt(key.search.min_pt) << '\n';
    j["best_probe"] = to_json(key.search.probe->phi());
    j["probe_min_pt_eigenvalue"] = key.search.min_pt;
  } else {
    text << "best_probe: none (pm statistics below use |Phi+>)\n";
    j["best_probe"] = nullptr;
  }
  text << "pm_psi_0: " << to_json(pm.psi[0]).dump() << '\n';
  text << "pm_psi_1: " << to_json(pm.psi[1]).dump() << '\n';
  text << "pm_priors: " << fmt(pm.priors[0]) << "," << fmt(pm.priors[1]) << '\n';
  j["pm_states"] = {{"psi", {to_json(pm.psi[0]), to_json(pm.psi[1])}}, {"priors", pm.priors}};

  int code = kOk;
  if (!key.lambdas) {
    text << "filter_error: singular marginal\n";
    text << "secure: false\n";
    j["filter_error"] = "singular marginal";
    j["secure"] = false;
  } else {
    const double disc = channel::pm_equivalence_check(ch, probe);
    text << "pm_discrepancy: " << fmt(disc) << '\n';
    text << "lambdas: " << joined(key.lambdas->lambdas()) << '\n';
    text << "eps_b: " << fmt(key.eps_b) << '\n';
    text << "overlap: " << fmt(key.overlap) << '\n';
    text << "secure: " << verdict_text(key.secure) << '\n';
    j["pm_discrepancy"] = disc;
    j["lambdas"] = key.lambdas->lambdas();
    j["eps_b"] = key.eps_b;
    j["overlap"] = key.overlap;
    j["secure"] = key.secure;
    if (disc > 1e-10) code = kPropertyViolation;
  }
  out << text.str();
  if (!g.out.empty()) {
    write_text_file(g.out, j.dump(2) + "\n");
    write_manifest({"analyze-channel", {{"input", input.string()}, {"tol", fmt(g.tol)}}, g.seed, seconds_since(t0), {g.out}});
  }
  return code;
}

// ---------------------------------------------------------------------------
// sweep

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{"l1",          "l2",           "l3",      "l4",
                                             "ppt",         "entangled",    "secure",  "eps_b",
                                             "overlap",     "bob_exponent", "eve_exponent", "min_block_length"};
  return cols;
}

int cmd_sweep(const SweepOptions& o, const GlobalOptions& g, std::ostream& out) {
  const auto t0 = Clock::now();
  std::vector<std::array<double, 4>> grid;
  if (o.mode == "point") {
    grid.push_back(parse_lambdas(o.lambdas));
  } else {
    if (o.steps < 1) throw InputError("--steps must be >= 1");
    const int k = o.steps;
    if (o.mode == "simplex") {
      for (int a = 0; a <= k; ++a)
        for (int b = 0; a + b <= k; ++b)
          for (int c = 0; a + b + c <= k; ++c) {
            const int d = k - a - b - c;
            grid.push_back({double(a) / k, double(b) / k, double(c) / k, double(d) / k});
          }
    } else if (o.mode == "slice") {
      if (!(o.l4 >= 0.0 && o.l4 <= 1.0)) throw InputError("--l4 must lie in [0, 1]");
      for (int i = 0; i <= k; ++i) {
        const double l1 = (1.0 - o.l4) * i / k;
        const double rest = 0.5 * (1.0 - o.l4 - l1);
        grid.push_back({l1, rest, rest, o.l4});
      }
    } else {
      throw InputError("--mode: expected simplex, slice or point, got '" + o.mode + "'");
    }
  }

  std::vector<std::string> rows(grid.size());
  parallel_for(grid.size(), resolve_threads(g.threads), [&](std::uint64_t i) {
    const auto& w = grid[i];
    states::BellDiagonal raw = [&] {
      try {
        return states::BellDiagonal::raw(w);
      } catch (const Error& e) {
        throw InputError(std::string("Bell weights: ") + e.what());
      }
    }();
    const auto canon = states::BellDiagonal::canonical(w);
    const auto ppt = states::is_entangled(states::bell_diagonal_state(raw), g.tol);
    const auto ens = states::eve_conditionals(states::purification_from_bell_diagonal(canon));
    const bool secure = states::security_condition(ens);
    const double eps = ens.eps_b();
    const auto n_min = secure ? minimal_block_length(eps, ens.overlap()) : std::nullopt;
    std::ostringstream row;
    row << fmt(w[0]) << ',' << fmt(w[1]) << ',' << fmt(w[2]) << ',' << fmt(w[3]) << ',' << states::to_string(ppt)
        << ',' << (states::is_entangled_bell(canon) ? 1 : 0) << ',' << (secure ? 1 : 0) << ',' << fmt(eps) << ','
        << fmt(ens.overlap()) << ',' << fmt(std::log(eps / (1.0 - eps))) << ',' << fmt(std::log(ens.overlap()))
        << ',' << (n_min ? std::to_string(*n_min) : "") << '\n';
    rows[i] = row.str();
  });

  std::ostringstream csv;
  csv << "# schema=" << kSweepSchema << '\n';
  const auto& cols = sweep_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) csv << (i ? "," : "") << cols[i];
  csv << '\n';
  for (const auto& r : rows) csv << r;
  emit(g, "sweep",
       {{"mode", o.mode}, {"steps", std::to_string(o.steps)}, {"l4", fmt(o.l4)}, {"lambdas", o.lambdas}},
       csv.str(), t0, out);
  return kOk;
}

}  // namespace simcap::cli

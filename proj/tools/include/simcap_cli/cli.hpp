#pragma once

// Library behind the `simcap` executable. Every command is a plain function
// so tests can drive it in-process; `run` adds flag parsing and maps
// exceptions to exit codes.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simcap/adsim.hpp"
#include "simcap/channel.hpp"
#include "simcap/filter.hpp"
#include "simcap/states.hpp"

namespace simcap::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kNumericError = 3, kPropertyViolation = 4 };

struct GlobalOptions {
  double tol = 1e-9;
  std::uint64_t seed = 0;
  std::string out;       // empty: write to the output stream
  unsigned threads = 0;  // 0: hardware concurrency
};

unsigned resolve_threads(unsigned requested);

// ---------------------------------------------------------------------------
// Input documents

/// Parsed input file. Exactly one of state / channel is set.
struct InputDocument {
  std::string kind;
  std::optional<states::TwoQubitState> state;
  std::optional<states::BellDiagonal> bell;  // set for kind = bell_diagonal
  std::optional<channel::QubitChannel> channel;
};

/// Throws InputError naming the offending field.
InputDocument parse_input(const std::string& text);
InputDocument load_input(const std::filesystem::path& path);

/// "0.7,0.1,0.1,0.1"
std::array<double, 4> parse_lambdas(const std::string& text);
/// "a..b" inclusive or a single integer.
std::pair<int, int> parse_range(const std::string& text);
/// xbasis | usd | trivial | family:<beta>
adsim::Povm parse_strategy(const std::string& text, const states::EveEnsemble& ens);

// ---------------------------------------------------------------------------
// Output helpers

/// %.17g
std::string fmt(double x);
/// SHA-256 of a file as lowercase hex.
std::string sha256_file(const std::filesystem::path& path);

struct ManifestInfo {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;
  std::uint64_t seed = 0;
  double duration_seconds = 0.0;
  std::vector<std::filesystem::path> outputs;
};
/// Writes <first output>.manifest.json and returns its path.
std::filesystem::path write_manifest(const ManifestInfo& info);

// ---------------------------------------------------------------------------
// Commands. Each returns an exit code and writes its report / CSV to `out`.

struct AnalyzeStateReport {
  states::Entanglement ppt = states::Entanglement::Separable;
  double min_pt = 0.0;
  std::optional<filter::FilterResult> filter;
  std::string filter_error;
  double eps_b = 0.0;
  double overlap = 0.0;
  bool secure = false;
  double mutual_info = 0.0;
  std::optional<int> min_block_length;
};
AnalyzeStateReport analyze_state(const states::TwoQubitState& s, double tol);
int cmd_analyze_state(const std::filesystem::path& input, const GlobalOptions& g, std::ostream& out);

struct AdSimOptions {
  std::array<double, 4> lambdas{0.7, 0.1, 0.1, 0.1};
  std::string n = "1..10";
  std::string strategy = "xbasis";
  std::string decision = "bayes";
  std::uint64_t trials = 100000;
};
inline constexpr const char* kAdSimSchema = "simcap.ad-sim.v1";
const std::vector<std::string>& ad_sim_columns();
int cmd_ad_sim(const AdSimOptions& o, const GlobalOptions& g, std::ostream& out);

struct VerifyOptions {
  std::uint64_t samples = 10000;
  std::uint64_t channel_samples = 1000;
};
struct VerifySummary {
  std::uint64_t states = 0;
  std::uint64_t state_entangled = 0;
  std::uint64_t state_counterexamples = 0;
  std::uint64_t state_skipped = 0;
  std::uint64_t state_filter_failures = 0;
  std::uint64_t channels = 0;
  std::uint64_t channel_entangling = 0;
  std::uint64_t channel_counterexamples = 0;
  std::uint64_t channel_skipped = 0;
  std::uint64_t channel_filter_failures = 0;
  double max_pm_discrepancy = 0.0;
};
VerifySummary run_verify(const VerifyOptions& o, std::uint64_t seed, unsigned threads, double tol);
int cmd_verify(const VerifyOptions& o, const GlobalOptions& g, std::ostream& out);

int cmd_analyze_channel(const std::filesystem::path& input, const GlobalOptions& g, std::ostream& out);

struct SweepOptions {
  std::string mode = "slice";  // simplex | slice | point
  int steps = 20;
  double l4 = 0.0;              // slice: fixed Lambda_4, Lambda_2 = Lambda_3
  std::string lambdas;          // point
};
inline constexpr const char* kSweepSchema = "simcap.sweep.v1";
const std::vector<std::string>& sweep_columns();
int cmd_sweep(const SweepOptions& o, const GlobalOptions& g, std::ostream& out);

/// Full command line entry point.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace simcap::cli

#include <CLI11.hpp>

#include <ostream>

#include "simcap/error.hpp"
#include "simcap/version.hpp"
#include "simcap_cli/cli.hpp"

namespace simcap::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"simcap: two-qubit key distillation analysis and simulation"};
  app.set_version_flag("--version", std::string(simcap::version()));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::string lambdas_text = "0.7,0.1,0.1,0.1";
  app.add_option("--tol", g.tol, "PPT / boundary tolerance")->capture_default_str();
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--out", g.out, "output file (a manifest is written next to it)");
  app.add_option("--threads", g.threads, "worker threads, 0 = all cores")->capture_default_str();

  std::filesystem::path input;
  auto* analyze_state = app.add_subcommand("analyze-state", "PPT, filtering and security of a two-qubit state");
  analyze_state->add_option("input", input, "JSON state file")->required();

  AdSimOptions ad;
  auto* ad_sim = app.add_subcommand("ad-sim", "Monte-Carlo advantage distillation against an individual attack");
  ad_sim->add_option("--lambdas", lambdas_text, "Bell weights l1,l2,l3,l4")->capture_default_str();
  ad_sim->add_option("--n", ad.n, "block length or range a..b")->capture_default_str();
  ad_sim->add_option("--strategy", ad.strategy, "xbasis | usd | trivial | family:<beta>")->capture_default_str();
  ad_sim->add_option("--decision", ad.decision, "bayes | majority")->capture_default_str();
  ad_sim->add_option("--trials", ad.trials, "accepted blocks per N")->capture_default_str();

  VerifyOptions ver;
  auto* verify = app.add_subcommand("verify", "random sweep: entanglement vs key verdict");
  verify->add_option("--samples", ver.samples, "random two-qubit states")->capture_default_str();
  verify->add_option("--channel-samples", ver.channel_samples, "random channels")->capture_default_str();

  auto* analyze_channel = app.add_subcommand("analyze-channel", "entanglement breaking and key verdict of a channel");
  analyze_channel->add_option("input", input, "JSON channel file (kraus or choi)")->required();

  SweepOptions sw;
  auto* sweep = app.add_subcommand("sweep", "grid over Bell-diagonal weights");
  sweep->add_option("--mode", sw.mode, "simplex | slice | point")->capture_default_str();
  sweep->add_option("--steps", sw.steps, "grid resolution")->capture_default_str();
  sweep->add_option("--l4", sw.l4, "slice: fixed l4 with l2 = l3")->capture_default_str();
  sweep->add_option("--lambdas", sw.lambdas, "point: l1,l2,l3,l4");

  std::vector<std::string> argv_store{"simcap"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*analyze_state) return cmd_analyze_state(input, g, out);
    if (*ad_sim) {
      ad.lambdas = parse_lambdas(lambdas_text);
      return cmd_ad_sim(ad, g, out);
    }
    if (*verify) return cmd_verify(ver, g, out);
    if (*analyze_channel) return cmd_analyze_channel(input, g, out);
    if (*sweep) return cmd_sweep(sw, g, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericError;
  }
  return kInputError;
}

}  // namespace simcap::cli

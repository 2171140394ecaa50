#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unistd.h>

#include "simcap/error.hpp"
#include "simcap_cli/cli.hpp"

using namespace simcap;
using namespace simcap::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SIMCAP_TEST_DATA;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

// value of "key: value" in a text report
std::string field(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
  return {};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("simcap_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

}  // namespace

TEST_CASE("input parsing") {
  const auto doc = parse_input(R"({"kind":"bell_diagonal","lambdas":[0.7,0.1,0.1,0.1]})");
  CHECK(doc.kind == "bell_diagonal");
  REQUIRE(doc.state.has_value());
  REQUIRE(doc.bell.has_value());

  const auto dm = parse_input(R"({"kind":"density_matrix","matrix":[[0.5,0,0,0.5],[0,0,0,0],[0,0,0,0],[0.5,0,0,[0.5,0]]]})");
  REQUIRE(dm.state.has_value());

  CHECK(load_input(kData / "identity_channel.json").channel.has_value());
  CHECK(load_input(kData / "depolarizing_07_choi.json").channel.has_value());

  auto fails_on = [](const std::string& text, const std::string& name) {
    try {
      parse_input(text);
    } catch (const InputError& e) {
      return std::string(e.what()).find(name) != std::string::npos;
    }
    return false;
  };
  CHECK(fails_on(R"({"lambdas":[1,0,0,0]})", "kind"));
  CHECK(fails_on(R"({"kind":"tensor"})", "kind"));
  CHECK(fails_on(R"({"kind":"bell_diagonal","lambdas":[1,0,0]})", "lambdas"));
  CHECK(fails_on(R"({"kind":"density_matrix","matrix":[[1,0],[0,0]]})", "matrix"));
  CHECK(fails_on(R"({"kind":"kraus","kraus":[[[2,0],[0,2]]]})", "kraus"));
  CHECK(fails_on("not json", "JSON"));
}

TEST_CASE("flag helpers") {
  CHECK(parse_range("1..10") == std::pair{1, 10});
  CHECK(parse_range("4") == std::pair{4, 4});
  CHECK_THROWS_AS(parse_range("5..2"), InputError);
  CHECK_THROWS_AS(parse_range("a..b"), InputError);
  CHECK(parse_lambdas("0.7,0.1,0.1,0.1")[0] == 0.7);
  CHECK_THROWS_AS(parse_lambdas("0.7,0.1"), InputError);
  CHECK(fmt(0.1) == "0.10000000000000001");
  CHECK(fmt(0.0) == "0");
}

TEST_CASE("analyze-state examples") {
  const auto bell = invoke({"analyze-state", (kData / "bell_07.json").string()});
  CHECK(bell.code == 0);
  CHECK(field(bell.out, "secure") == "true");
  CHECK(std::stod(field(bell.out, "eps_b")) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(std::stod(field(bell.out, "overlap")) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(field(bell.out, "ppt") == "entangled");

  const auto w = invoke({"analyze-state", (kData / "werner_02.json").string()});
  CHECK(w.code == 0);
  CHECK(field(w.out, "secure") == "false");
  CHECK(field(w.out, "ppt") == "separable");

  const auto w6 = invoke({"analyze-state", (kData / "werner_06.json").string()});
  CHECK(field(w6.out, "secure") == "true");

  const auto bad = invoke({"analyze-state", (kData / "malformed.json").string()});
  CHECK(bad.code == kInputError);
  CHECK(bad.err.find("matrix") != std::string::npos);

  CHECK(invoke({"analyze-state", (kData / "missing.json").string()}).code == kInputError);
  CHECK(invoke({"analyze-state"}).code == kInputError);
  CHECK(invoke({"no-such-command"}).code == kInputError);
}

TEST_CASE("analyze-state JSON output and manifest") {
  TempDir tmp;
  const fs::path out = tmp.path / "bell.json";
  const auto r = invoke({"--out", out.string(), "analyze-state", (kData / "bell_07.json").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("secure").get<bool>());
  const auto m = nlohmann::json::parse(slurp(fs::path(out.string() + ".manifest.json")));
  CHECK(m.at("command") == "analyze-state");
  CHECK(m.at("outputs").at(0).at("sha256") == sha256_file(out));
}

TEST_CASE("analyze-channel examples") {
  const auto id = invoke({"analyze-channel", (kData / "identity_channel.json").string()});
  CHECK(id.code == 0);
  CHECK(field(id.out, "eb_verdict") == "entangling");
  CHECK(field(id.out, "secure") == "true");
  CHECK(field(id.out, "best_probe").find("0.7071067811865475") != std::string::npos);

  const auto mr = invoke({"analyze-channel", (kData / "measure_resend.json").string()});
  CHECK(field(mr.out, "eb_verdict") == "breaking");
  CHECK(field(mr.out, "secure") == "false");

  const auto boundary = invoke({"--tol", "1e-7", "analyze-channel", (kData / "depolarizing_boundary.json").string()});
  CHECK(boundary.code == 0);
  CHECK(field(boundary.out, "eb_verdict") == "boundary");

  const auto dep = invoke({"analyze-channel", (kData / "depolarizing_07_choi.json").string()});
  CHECK(field(dep.out, "eb_verdict") == "entangling");
  CHECK(std::stod(field(dep.out, "pm_discrepancy")) <= 1e-12);

  TempDir tmp;
  const fs::path bad = tmp.path / "bad.json";
  std::ofstream(bad) << R"({"kind":"kraus","kraus":[[[1,0],[0,0.5]]]})";
  const auto r = invoke({"analyze-channel", bad.string()});
  CHECK(r.code == kInputError);
  CHECK(r.err.find("kraus") != std::string::npos);
}

TEST_CASE("ad-sim CSV") {
  const auto r = invoke({"--seed", "7", "ad-sim", "--lambdas", "0.7,0.1,0.1,0.1", "--n", "1..4", "--strategy", "usd",
                         "--trials", "20000"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind(std::string("# schema=") + kAdSimSchema + "\n", 0) == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == ad_sim_columns());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].size() == ad_sim_columns().size());
    CHECK(std::stoi(rows[i][0]) == int(i));
  }
  // N = 3 row: USD closed form
  const double emp = std::stod(rows[3][7]), se = std::stod(rows[3][8]);
  CHECK(std::abs(emp - 0.5 * std::pow(0.75, 3)) <= 3 * se);

  const auto again = invoke({"--seed", "7", "--threads", "3", "ad-sim", "--lambdas", "0.7,0.1,0.1,0.1", "--n", "1..4",
                             "--strategy", "usd", "--trials", "20000"});
  CHECK(again.out == r.out);

  CHECK(invoke({"ad-sim", "--n", "0..3"}).code == kInputError);
  CHECK(invoke({"ad-sim", "--strategy", "bogus"}).code == kInputError);
  CHECK(invoke({"ad-sim", "--lambdas", "0.3,0.3,0.3,0.3"}).code == kInputError);
  CHECK(invoke({"ad-sim", "--trials", "0"}).code == kInputError);
}

TEST_CASE("ad-sim x-basis stays above the exact bound") {
  const auto r = invoke({"--seed", "3", "ad-sim", "--n", "2..6", "--strategy", "xbasis", "--trials", "20000"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(std::stod(rows[i][7]) >= std::stod(rows[i][11]) - 3 * std::stod(rows[i][8]));
}

TEST_CASE("verify") {
  const auto r = invoke({"--seed", "1", "verify", "--samples", "500", "--channel-samples", "100"});
  CHECK(r.code == 0);
  CHECK(field(r.out, "states_counterexamples") == "0");
  CHECK(field(r.out, "channels_counterexamples") == "0");
  CHECK(field(r.out, "result") == "ok");
  CHECK(invoke({"--seed", "1", "--threads", "2", "verify", "--samples", "500", "--channel-samples", "100"}).out == r.out);

  const auto one = invoke({"verify", "--samples", "1", "--channel-samples", "1"});
  CHECK(one.code == 0);
  CHECK(invoke({"verify", "--samples", "0"}).code == kInputError);
}

TEST_CASE("sweep") {
  const auto r = invoke({"sweep", "--mode", "slice", "--steps", "40", "--l4", "0.1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind(std::string("# schema=") + kSweepSchema + "\n", 0) == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() > 10);
  CHECK(rows[0] == sweep_columns());
  const double step = 0.9 / 40;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == sweep_columns().size());
    const double l1 = std::stod(rows[i][0]);
    const bool secure = rows[i][6] == "1";
    if (l1 > 0.5 + step) CHECK(secure);
    if (l1 < 0.5 - step) CHECK_FALSE(secure);
    CHECK(secure == (l1 > 0.5));
  }

  const auto pt = invoke({"sweep", "--mode", "point", "--lambdas", "0.7,0.1,0.1,0.1"});
  const auto prow = csv_rows(pt.out);
  REQUIRE(prow.size() == 2);
  CHECK(prow[1][6] == "1");
  CHECK(std::stod(prow[1][7]) == doctest::Approx(0.2));
  CHECK(std::stod(prow[1][8]) == doctest::Approx(0.75));
  CHECK(prow[1][11] == "2");

  const auto simplex = invoke({"sweep", "--mode", "simplex", "--steps", "6"});
  CHECK(csv_rows(simplex.out).size() == 1 + 84);  // C(9, 3) grid points

  CHECK(invoke({"sweep", "--mode", "cube"}).code == kInputError);
  CHECK(invoke({"sweep", "--steps", "0"}).code == kInputError);
}

TEST_CASE("CSV output file and manifest digest") {
  TempDir tmp;
  const fs::path out = tmp.path / "sim.csv";
  const std::vector<std::string> args{"--seed", "11", "--out", out.string(), "ad-sim", "--n", "2..3", "--trials", "500"};
  REQUIRE(invoke(args).code == 0);
  const std::string first = slurp(out);
  const auto m = nlohmann::json::parse(slurp(fs::path(out.string() + ".manifest.json")));
  CHECK(m.at("command") == "ad-sim");
  CHECK(m.at("seed") == 11);
  CHECK(m.at("outputs").at(0).at("sha256") == sha256_file(out));
  REQUIRE(invoke(args).code == 0);
  CHECK(slurp(out) == first);
}

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "simcap/error.hpp"
#include "simcap/version.hpp"
#include "simcap_cli/cli.hpp"

namespace simcap::cli {

using json = nlohmann::json;
using qlin::CMatrix;
using qlin::Complex;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw InputError("field '" + field + "': " + why);
}

Complex parse_complex(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    bad_field(field, "expected a number or an [re, im] pair");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

CMatrix parse_matrix(const json& v, std::size_t dim, const std::string& field) {
  if (!v.is_array() || v.size() != dim) bad_field(field, "expected " + std::to_string(dim) + " rows");
  CMatrix m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    if (!v[r].is_array() || v[r].size() != dim) {
      bad_field(row_field, "expected " + std::to_string(dim) + " entries");
    }
    for (std::size_t c = 0; c < dim; ++c)
      m(r, c) = parse_complex(v[r][c], row_field + "[" + std::to_string(c) + "]");
  }
  return m;
}

const json& require(const json& doc, const std::string& key) {
  if (!doc.contains(key)) bad_field(key, "missing");
  return doc.at(key);
}

double parse_double(const std::string& s, const std::string& what) {
  double x = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) throw InputError(what + ": cannot parse '" + s + "' as a number");
  return x;
}

int parse_int(const std::string& s, const std::string& what) {
  int x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError(what + ": cannot parse '" + s + "' as an integer");
  }
  return x;
}

}  // namespace

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

InputDocument parse_input(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("input is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("input must be a JSON object");
  const json& kind_node = require(doc, "kind");
  if (!kind_node.is_string()) bad_field("kind", "expected a string");

  InputDocument out;
  out.kind = kind_node.get<std::string>();
  try {
    if (out.kind == "density_matrix") {
      out.state = states::TwoQubitState(parse_matrix(require(doc, "matrix"), 4, "matrix"));
    } else if (out.kind == "bell_diagonal") {
      const json& l = require(doc, "lambdas");
      if (!l.is_array() || l.size() != 4) bad_field("lambdas", "expected 4 numbers");
      std::array<double, 4> w{};
      for (std::size_t i = 0; i < 4; ++i) {
        if (!l[i].is_number()) bad_field("lambdas[" + std::to_string(i) + "]", "expected a number");
        w[i] = l[i].get<double>();
      }
      out.bell = states::BellDiagonal::raw(w);
      out.state = states::bell_diagonal_state(*out.bell);
    } else if (out.kind == "kraus") {
      const json& k = require(doc, "kraus");
      if (!k.is_array() || k.empty()) bad_field("kraus", "expected a non-empty list of 2x2 matrices");
      std::vector<CMatrix> ops;
      for (std::size_t i = 0; i < k.size(); ++i) ops.push_back(parse_matrix(k[i], 2, "kraus[" + std::to_string(i) + "]"));
      out.channel = channel::QubitChannel::from_kraus(std::move(ops));
    } else if (out.kind == "choi") {
      out.channel = channel::QubitChannel::from_choi(parse_matrix(require(doc, "matrix"), 4, "matrix"));
    } else {
      bad_field("kind", "unknown kind '" + out.kind + "' (density_matrix, bell_diagonal, kraus, choi)");
    }
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    const std::string field = out.kind == "bell_diagonal" ? "lambdas" : out.kind == "kraus" ? "kraus" : "matrix";
    bad_field(field, e.what());
  }
  return out;
}

InputDocument load_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_input(ss.str());
}

std::array<double, 4> parse_lambdas(const std::string& text) {
  std::array<double, 4> w{};
  std::stringstream ss(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 4) throw InputError("--lambdas: expected exactly 4 comma-separated values");
    w[i++] = parse_double(item, "--lambdas");
  }
  if (i != 4) throw InputError("--lambdas: expected exactly 4 comma-separated values");
  return w;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  int lo = 0, hi = 0;
  if (dots == std::string::npos) {
    lo = hi = parse_int(text, "--n");
  } else {
    lo = parse_int(text.substr(0, dots), "--n");
    hi = parse_int(text.substr(dots + 2), "--n");
  }
  if (lo < 1 || hi < lo) throw InputError("--n: need 1 <= a <= b in 'a..b', got '" + text + "'");
  return {lo, hi};
}

adsim::Povm parse_strategy(const std::string& text, const states::EveEnsemble& ens) {
  if (text == "xbasis") return adsim::povm_xbasis();
  if (text == "usd") return adsim::povm_usd(ens);
  if (text == "trivial") return adsim::Povm::trivial();
  if (text.rfind("family:", 0) == 0) {
    return adsim::povm_family(ens, parse_double(text.substr(7), "--strategy family angle"));
  }
  throw InputError("--strategy: unknown strategy '" + text + "' (xbasis, usd, trivial, family:<beta>)");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string() + " for hashing");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

std::filesystem::path write_manifest(const ManifestInfo& info) {
  if (info.outputs.empty()) throw InputError("manifest needs at least one output file");
  json params = json::object();
  for (const auto& [k, v] : info.params) params[k] = v;
  json outputs = json::array();
  for (const auto& p : info.outputs) outputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  const json doc = {{"command", info.command},
                    {"params", params},
                    {"seed", info.seed},
                    {"version", simcap::version()},
                    {"duration_seconds", info.duration_seconds},
                    {"outputs", outputs}};
  std::filesystem::path path = info.outputs.front();
  path += ".manifest.json";
  std::ofstream f(path);
  if (!f) throw InputError("cannot write manifest " + path.string());
  f << doc.dump(2) << '\n';
  return path;
}

}  // namespace simcap::cli

#include "doctest.h"

#include "strip/cli.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using strip::cli::run;

namespace {

/// Fresh scratch directory removed on scope exit.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("strip_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

int call(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int rc = run(args, o, e);
  if (out) *out = o.str();
  return rc;
}

}  // namespace

TEST_CASE("fnv1a reference values") {
  CHECK(strip::cli::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(strip::cli::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(strip::cli::fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("ids writes one row per grid point plus a manifest") {
  Scratch s("ids");
  const std::string out = s / "ids.csv";
  REQUIRE(call({"ids", "--emin", "-2", "--emax", "5", "--esteps", "140", "--box-length", "100", "--mesh", "0.01",
                "--seed", "7", "--out", out}) == 0);
  const std::string csv = slurp(out);
  CHECK(count_lines(csv) == 141);
  CHECK(csv.rfind("energy,ids,box_length,mesh,boundary,seed\r\n", 0) == 0);

  const auto m = nlohmann::json::parse(slurp(out + ".manifest.json"));
  CHECK(m["subcommand"] == "ids");
  CHECK(m["seed"] == 7);
  CHECK(m["parameters"]["esteps"] == "140");
  CHECK(m["parameters"]["mesh"] == "0.01");
  CHECK(m["outputs"][0] == out);
  CHECK(m.contains("version"));
  CHECK(m.contains("wall_time_seconds"));
  CHECK(m["model"]["channels"] == 2);
}

TEST_CASE("ids cache reuses identical tables") {
  Scratch s("cache");
  const std::vector<std::string> base{"ids", "--emin", "0", "--emax", "4", "--esteps", "9", "--box-length", "20",
                                      "--mesh", "0.05", "--seed", "3", "--cache-dir", s / "c"};
  auto first = base, second = base, other = base;
  first.insert(first.end(), {"--out", s / "a.csv"});
  second.insert(second.end(), {"--out", s / "b.csv"});
  other[12] = "4";
  other.insert(other.end(), {"--out", s / "c.csv"});
  REQUIRE(call(first) == 0);
  REQUIRE(call(second) == 0);
  REQUIRE(call(other) == 0);
  CHECK(slurp(s / "a.csv") == slurp(s / "b.csv"));
  CHECK(nlohmann::json::parse(slurp(s / "a.csv.manifest.json"))["cache_hit"] == false);
  CHECK(nlohmann::json::parse(slurp(s / "b.csv.manifest.json"))["cache_hit"] == true);
  CHECK(nlohmann::json::parse(slurp(s / "c.csv.manifest.json"))["cache_hit"] == false);
}

TEST_CASE("lyapunov output is byte-identical across runs and thread counts") {
  const std::vector<std::string> args{"lyapunov", "--energy", "3", "--cells", "100000", "--seed", "7"};
  std::string a, b, c;
  REQUIRE(call(args, &a) == 0);
  REQUIRE(call(args, &b) == 0);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  REQUIRE(call(threaded, &c) == 0);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.rfind("energy,gamma_1,gamma_2,gamma_3,gamma_4,se_1,se_2,se_3,se_4,cells,seed\r\n", 0) == 0);
  CHECK(count_lines(a) == 2);
}

TEST_CASE("thouless summary schema") {
  Scratch s("thouless");
  REQUIRE(call({"ids", "--emin", "-2", "--emax", "20", "--esteps", "221", "--box-length", "50", "--mesh", "0.02",
                "--seed", "2", "--out", s / "ids.csv"}) == 0);
  REQUIRE(call({"lyapunov", "--emin", "3", "--emax", "4", "--esteps", "10", "--cells", "4000", "--seed", "7", "--out",
                s / "gamma.csv"}) == 0);
  REQUIRE(call({"thouless", "--ids", s / "ids.csv", "--gamma", s / "gamma.csv", "--out", s / "fit.json", "--csv",
                s / "fit.csv"}) == 0);
  const auto fit = nlohmann::json::parse(slurp(s / "fit.json"));
  CHECK(fit["alpha"].is_number());
  CHECK(fit["rms"].is_number());
  CHECK(fit["alpha_vs_rew_i"].is_null());
  CHECK(fit["channels"] == 2);
  CHECK(fs::exists(s / "fit.json.manifest.json"));
  CHECK(slurp(s / "fit.csv").rfind("energy,gamma_sum,thouless_rhs,residual\r\n", 0) == 0);

  REQUIRE(call({"thouless", "--ids", s / "ids.csv", "--gamma", s / "gamma.csv", "--rew-i", "-1.8", "--out",
                s / "fit2.json"}) == 0);
  const auto fit2 = nlohmann::json::parse(slurp(s / "fit2.json"));
  CHECK(fit2["alpha_vs_rew_i"].get<double>() == doctest::Approx(fit2["alpha"].get<double>() + 1.8));

  REQUIRE(call({"hoelder", "--input", s / "ids.csv", "--out", s / "h.json"}) == 0);
  const auto h = nlohmann::json::parse(slurp(s / "h.json"));
  CHECK(h["alpha"].get<double>() > 0.0);
  CHECK(h["alpha"].get<double>() <= 1.0);
}

TEST_CASE("rank and bounds outputs") {
  std::string csv, js;
  REQUIRE(call({"rank", "--energy", "3"}, &csv) == 0);
  CHECK(csv.rfind("energy,rank,n_generators,min_power_used\r\n3,10,", 0) == 0);
  REQUIRE(call({"bounds", "--lo", "2.5", "--hi", "4.5", "--samples", "50"}, &js) == 0);
  const auto b = nlohmann::json::parse(js);
  CHECK(b["max_growth_ratio"].size() == 2);
  for (const auto& r : b["max_growth_ratio"]) CHECK(r.get<double>() <= 1.0);
}

TEST_CASE("parameter errors exit with 1") {
  CHECK(call({}) == 1);
  CHECK(call({"nonsense"}) == 1);
  CHECK(call({"ids", "--bogus", "1"}) == 1);
  CHECK(call({"ids", "--esteps", "5", "--emin", "0", "--emax", "1", "--mesh", "0.3"}) == 1);
  CHECK(call({"ids", "--esteps", "5", "--emin", "0", "--emax", "1", "--boundary", "periodic"}) == 1);
  CHECK(call({"lyapunov"}) == 1);
  CHECK(call({"lyapunov", "--energy", "3", "--cells", "10"}) == 1);
  CHECK(call({"thouless", "--ids", "/nonexistent.csv", "--gamma", "/nonexistent.csv"}) == 1);
  CHECK(call({"lyapunov", "--model", "/nonexistent.json", "--energy", "3"}) == 1);
  CHECK(call({"--help"}) == 0);
}

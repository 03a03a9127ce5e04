#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "carpet/cache.hpp"
#include "carpet/io.hpp"

using namespace carpet;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path cli_path() {
  for (const char* cand : {"../tools/carpet-cli", "tools/carpet-cli", "build/tools/carpet-cli"}) {
    if (fs::exists(cand)) return fs::absolute(cand);
  }
  return {};
}

int run_cli(const fs::path& cli, const std::string& args, const fs::path& workdir) {
  const std::string cmd = "cd " + workdir.string() + " && " + cli.string() + " " + args;
  return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("graph serialization shape") {
  const CellGraph g1 = build_cell_graph(1, CellAdjacency::kFull);
  const json j = to_json(g1);
  CHECK(j["kind"] == "cell");
  CHECK(j["level"] == 1);
  CHECK(j["vertex_count"] == 8);
  CHECK(j["vertices"].size() == 8);
  CHECK(j["vertices"][0] == "1");
  CHECK(j["edges"].size() == 12);
  CHECK(j["subsets"]["left"].size() == 3);

  const PointGraph s1 = build_point_graph(1, PointKind::kSimple);
  const json js = to_json(s1);
  CHECK(js["kind"] == "point-simple");
  CHECK(js["vertices"].size() == 4);
  CHECK(js["edges"][0].size() == 3);  // [i, j, owner word]

  // word strings round-trip
  CHECK(Word("158").str() == "158");
  CHECK(Word("").str() == "");
  CHECK_THROWS_AS(Word("190"), BadWord);

  // lattice points serialize with their exact denominator
  const json jp = to_json(LatticePoint{-3, 9, 2});
  CHECK(jp["x"] == -3);
  CHECK(jp["y"] == 9);
  CHECK(jp["denom_level"] == 2);
}

TEST_CASE("scaling csv columns") {
  ScalingTable t;
  t.p = 2.0;
  t.family = "lr";
  t.rows = {{1, 2.0, true, 3}, {2, 1.5, true, 4}, {3, 1.2, true, 5}};
  t.ratios = {2.0 / 1.5, 1.5 / 1.2};
  t.rho_hat_ratio = 1.25;
  t.rho_hat_fit = 1.26;
  t.beta_hat_ratio = beta_from_rho(1.25);
  t.beta_hat_fit = beta_from_rho(1.26);
  const std::string csv = scaling_table_csv({t});
  CHECK(csv.rfind("family,p,n,value,ratio,rho_ratio,rho_fit,beta_ratio,beta_fit,wall_ms\n", 0) ==
        0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  // a data line carries 10 columns
  const auto first = csv.find('\n') + 1;
  const std::string line = csv.substr(first, csv.find('\n', first) - first);
  CHECK(std::count(line.begin(), line.end(), ',') == 9);
}

TEST_CASE("timing fields are stripped recursively") {
  json j{{"wall_ms", 12},
         {"inner", {{"wall_ms", 5}, {"x", 1}}},
         {"arr", json::array({{{"wall_ms", 7}, {"y", 2}}})}};
  strip_timing(j);
  CHECK(!j.contains("wall_ms"));
  CHECK(!j["inner"].contains("wall_ms"));
  CHECK(!j["arr"][0].contains("wall_ms"));
  CHECK(j["inner"]["x"] == 1);
}

TEST_CASE("content hash is stable and spreads") {
  const std::string h = content_hash("abc");
  CHECK(h.size() == 32);
  CHECK(h == content_hash("abc"));
  CHECK(h != content_hash("abd"));
}

TEST_CASE("run cache store, lookup, collision and corruption") {
  const fs::path dir = fs::temp_directory_path() / "carpet-cache-test";
  fs::remove_all(dir);
  RunCache cache(dir.string());

  CHECK(!cache.lookup("key-1").has_value());
  cache.store("key-1", json{{"v", 42}});
  auto hit = cache.lookup("key-1");
  REQUIRE(hit.has_value());
  CHECK((*hit)["v"] == 42);

  // equality check guards against hash collisions: a mismatched stored key
  // reads as a miss
  {
    std::ofstream out(dir / (content_hash("key-2") + ".json"), std::ios::binary);
    out << json{{"key", "something-else"}, {"record", {{"v", 1}}}}.dump();
  }
  CHECK(!cache.lookup("key-2").has_value());

  // corrupted entries are reported and read as misses
  {
    std::ofstream out(dir / (content_hash("key-3") + ".json"), std::ios::binary);
    out << "{ not json";
  }
  bool corrupt = false;
  CHECK(!cache.lookup("key-3", &corrupt).has_value());
  CHECK(corrupt);

  CHECK(cache.clear() == 3);
  fs::remove_all(dir);
}

TEST_CASE("cli determinism and cache correctness") {
  const fs::path cli = cli_path();
  if (cli.empty()) SKIP("carpet-cli binary not found next to the test binary");

  const fs::path work = fs::temp_directory_path() / "carpet-cli-test";
  fs::remove_all(work);
  fs::create_directories(work);

  // two fresh runs with distinct caches: results identical after dropping
  // wall-clock fields
  REQUIRE(run_cli(cli,
                  "poincare --kind sigma --n 1 --p 2 --seed 7 --cache-dir c1 --out r1.json",
                  work) == 0);
  REQUIRE(run_cli(cli,
                  "poincare --kind sigma --n 1 --p 2 --seed 7 --cache-dir c2 --out r2.json",
                  work) == 0);
  json r1 = json::parse(slurp(work / "r1.json"));
  json r2 = json::parse(slurp(work / "r2.json"));
  strip_timing(r1);
  strip_timing(r2);
  CHECK(r1.dump() == r2.dump());

  // rerun against the first cache: byte-identical output file
  REQUIRE(run_cli(cli,
                  "poincare --kind sigma --n 1 --p 2 --seed 7 --cache-dir c1 --out r3.json",
                  work) == 0);
  CHECK(slurp(work / "r1.json") == slurp(work / "r3.json"));

  // cached and recomputed numeric payloads agree bit-exactly
  CHECK(json::parse(slurp(work / "r1.json"))["result"]["value"].get<double>() ==
        json::parse(slurp(work / "r2.json"))["result"]["value"].get<double>());

  // cache gc empties the directory
  REQUIRE(run_cli(cli, "cache gc --cache-dir c1", work) == 0);
  std::size_t remaining = 0;
  for (const auto& e : fs::directory_iterator(work / "c1"))
    remaining += e.path().extension() == ".json" ? 1 : 0;
  CHECK(remaining == 0);

  // exit codes: usage, budget, all-rows-failed, nonconvergence
  CHECK(run_cli(cli, "conductance --family bogus --n 1 --p 2 >/dev/null 2>&1", work) != 0);
  const int usage = run_cli(cli, "scaling rho --family lr >/dev/null 2>&1", work);
  CHECK(WEXITSTATUS(usage) == 2);  // missing required --p
  const int budget = run_cli(cli, "graph build --kind cell --n 10 >/dev/null 2>&1", work);
  CHECK(WEXITSTATUS(budget) == 3);
  const int allfail = run_cli(
      cli, "scaling rho --p 2 --family lr --n-min 3 --n-max 5 --budget 10 >/dev/null 2>&1", work);
  CHECK(WEXITSTATUS(allfail) == 4);
  const int noconv = run_cli(
      cli, "solve dirichlet --kind cell --n 2 --p 1.5 --tol 1e-17 --cache-dir c3 >/dev/null 2>&1",
      work);
  CHECK(WEXITSTATUS(noconv) == 5);

  fs::remove_all(work);
}

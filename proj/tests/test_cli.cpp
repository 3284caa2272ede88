#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

using nlohmann::json;

struct TmpDir {
  std::string path;
  TmpDir() {
    char tmpl[] = "/tmp/spectral_cli_XXXXXX";
    path = mkdtemp(tmpl);
  }
  ~TmpDir() { std::system(("rm -rf " + path).c_str()); }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_in(const std::string& dir, const std::string& args) {
  std::string cmd = "cd " + dir + " && " + SPECTRAL_CLI_PATH + " " + args +
                    " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("reports are byte-identical across runs and carry the schema fields") {
  TmpDir t;
  write_file(t.path + "/ex2.json", "{\"kind\":\"example2\",\"n\":4}\n");
  REQUIRE(run_in(t.path, "operator analyze --spec ex2.json --out a.json") == 0);
  REQUIRE(run_in(t.path, "operator analyze --spec ex2.json --out b.json") == 0);
  auto a = read_file(t.path + "/a.json");
  CHECK(a == read_file(t.path + "/b.json"));

  auto j = json::parse(a);
  CHECK(j["schema_version"] == "1");
  CHECK(j.contains("content_hash"));
  CHECK(j["config"]["command"] == "operator analyze");
  auto& r = j["report"];
  for (const char* key : {"validation", "cyclic", "graph_period", "norm_2_4",
                          "norm_2_3", "norm_2_inf", "norm_2_2", "certificate",
                          "rate", "eigencheck"})
    CHECK(r.contains(key));
  CHECK(r["cyclic"]["d"] == 2);
}

TEST_CASE("measure coeffs output matches the golden file byte for byte") {
  TmpDir t;
  write_file(t.path + "/leb.json", "{\"kind\":\"lebesgue\"}\n");
  REQUIRE(run_in(t.path,
                 "measure coeffs --spec leb.json --n-max 3 --out got.json") == 0);
  auto got = read_file(t.path + "/got.json");
  auto want = read_file(std::string(SPECTRAL_GOLDEN_DIR) +
                        "/measure_coeffs_lebesgue.json");
  CHECK(got == want);
}

TEST_CASE("validation failures exit 2 with a message") {
  TmpDir t;
  CHECK(run_in(t.path, "measure analyze --spec missing.json") == 2);
  write_file(t.path + "/bad.json", "{\"kind\":\"unknown\"}\n");
  CHECK(run_in(t.path, "measure analyze --spec bad.json") == 2);
  write_file(t.path + "/broken.json", "{\"kind\": \n");
  CHECK(run_in(t.path, "measure analyze --spec broken.json") == 2);
  // invalid operator: negative entry
  write_file(t.path + "/negop.json",
             "{\"mu\":[0.5,0.5],\"S\":[[1.5,-0.5],[-0.5,1.5]]}\n");
  CHECK(run_in(t.path, "operator analyze --spec negop.json") == 2);
  CHECK(run_in(t.path, "measure") == 2);  // missing subcommand
}

TEST_CASE("ud test writes a report and per-sample csv") {
  TmpDir t;
  write_file(t.path + "/leb.json", "{\"kind\":\"lebesgue\"}\n");
  REQUIRE(run_in(t.path,
                 "ud test --measure leb.json --seq "
                 "'{\"kind\":\"arith\",\"a\":0,\"b\":1}' --N 2000 --samples 10 "
                 "--seed 7 --out r.json --csv s.csv") == 0);
  auto j = json::parse(read_file(t.path + "/r.json"));
  CHECK(j["report"]["experiment"]["samples"].size() == 10);
  CHECK(j["report"]["del"]["series"]["verdict"] == "Converges");
  auto csv = read_file(t.path + "/s.csv");
  CHECK(csv.rfind("x,max_weyl,discrepancy,pass\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
}

TEST_CASE("construct product-pair emits loadable specs") {
  TmpDir t;
  REQUIRE(run_in(t.path,
                 "measure construct product-pair --degree 256 --out pair") == 0);
  auto s1 = json::parse(read_file(t.path + "/pair/nu1.json"));
  CHECK(s1["kind"] == "product_pair");
  REQUIRE(run_in(t.path,
                 "measure coeffs --spec pair/nu1.json --n-max 8 --out c.json") ==
          0);
  auto j = json::parse(read_file(t.path + "/c.json"));
  // even coefficients vanish for the odd-frequency component
  for (const auto& row : j["report"]["coefficients"]) {
    std::int64_t n = row["n"];
    if (n != 0 && n % 2 == 0) CHECK(double(row["re"]) == 0.0);
  }
}

TEST_CASE("help succeeds and unknown flags fail cleanly") {
  TmpDir t;
  CHECK(run_in(t.path, "--help") == 0);
  CHECK(run_in(t.path, "measure analyze --nope") == 2);
}

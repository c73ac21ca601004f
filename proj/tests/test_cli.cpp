#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "json.hpp"
#include "support/test_helpers.hpp"

using testutil::read_text;
using testutil::run_cli;
using testutil::TempDir;
using testutil::write_text;

TEST_CASE("cli test command on degenerate all-zero data") {
  TempDir dir("cli_test");
  write_text(dir.path / "zeros.csv", "x\n0\n0\n0\n");
  const auto out = (dir.path / "out").string();
  const int rc = run_cli("test --data " + (dir.path / "zeros.csv").string() +
                         " --p 1 --method SN-1S --out " + out + " > /dev/null");
  REQUIRE(rc == 0);
  const auto payload = nlohmann::json::parse(read_text(dir.path / "out" / "test_outcome.json"));
  CHECK(payload["method"] == "SN-1S");
  CHECK(payload["statistic"] == 0.0);
  CHECK(payload["reject"] == false);
  CHECK(payload["retained"] == 1);
  CHECK(payload["critical_value"].get<double>() > 0.0);
}

TEST_CASE("cli rejects unknown tokens with exit code 2") {
  TempDir dir("cli_bad");
  write_text(dir.path / "d.csv", "1\n2\n");
  CHECK(run_cli("test --data " + (dir.path / "d.csv").string() +
                " --p 1 --method SN-3S --out " + (dir.path / "o").string()) == 2);

  write_text(dir.path / "cfg.json", R"({"simulate":{"designs":[99],"R":1,"methods":["SN-1S"]}})");
  CHECK(run_cli("simulate --config " + (dir.path / "cfg.json").string() + " --seed 1 --out " +
                (dir.path / "o").string()) == 2);

  CHECK(run_cli("nonsense") == 2);
}

TEST_CASE("cli simulate requires a seed") {
  TempDir dir("cli_seed");
  write_text(dir.path / "cfg.json",
             R"({"simulate":{"designs":[3],"p":[10],"R":1,"B":50,"n":40,"methods":["SN-1S"]}})");
  CHECK(run_cli("simulate --config " + (dir.path / "cfg.json").string() + " --out " +
                (dir.path / "o").string()) == 2);
}

TEST_CASE("cli test with a bootstrap method requires a seed") {
  TempDir dir("cli_seed_boot");
  write_text(dir.path / "d.csv", "0\n0\n0\n0\n0\n0\n0\n0\n0\n0\n0\n0\n");
  const std::string base = "test --data " + (dir.path / "d.csv").string() +
                           " --p 1 --method MB-1S --out " + (dir.path / "o").string();
  CHECK(run_cli(base + " > /dev/null") == 2);
  CHECK(run_cli(base + " --seed 4 > /dev/null") == 0);
}

TEST_CASE("cli simulate is byte-deterministic across thread counts") {
  TempDir dir("cli_det");
  write_text(dir.path / "cfg.json",
             R"({"simulate":{"designs":[3,5],"p":[12],"rho":[0.0,0.5],"error_laws":["t4"],
                 "R":4,"B":60,"n":50,
                 "methods":["SN-1S","MB-Lasso","EB-2S"],"lasso_C":[2],"beta_n":[0.001]}})");
  const std::string base = "simulate --config " + (dir.path / "cfg.json").string() + " --seed 31 ";
  REQUIRE(run_cli(base + "--threads 1 --out " + (dir.path / "o1").string()) == 0);
  REQUIRE(run_cli(base + "--threads 3 --out " + (dir.path / "o2").string()) == 0);
  REQUIRE(run_cli(base + "--threads 3 --out " + (dir.path / "o3").string()) == 0);
  const auto csv1 = read_text(dir.path / "o1" / "simulate_rejections.csv");
  const auto csv2 = read_text(dir.path / "o2" / "simulate_rejections.csv");
  const auto csv3 = read_text(dir.path / "o3" / "simulate_rejections.csv");
  REQUIRE(!csv1.empty());
  CHECK(csv1 == csv2);
  CHECK(csv2 == csv3);
  CHECK(read_text(dir.path / "o1" / "simulate_retained.csv") ==
        read_text(dir.path / "o2" / "simulate_retained.csv"));
  CHECK(read_text(dir.path / "o1" / "simulate_report.json") ==
        read_text(dir.path / "o2" / "simulate_report.json"));
}

TEST_CASE("cli reports runtime failures with exit code 1") {
  TempDir dir("cli_runtime");
  // a regular file blocks creation of the output directory
  write_text(dir.path / "blocker", "not a directory\n");
  write_text(dir.path / "cfg.json", R"({"diagnose":{"M_steps":3,"p_steps":3,"p_max":10}})");
  CHECK(run_cli("diagnose --config " + (dir.path / "cfg.json").string() + " --out " +
                (dir.path / "blocker" / "sub").string()) == 1);
}

TEST_CASE("cli paper profile widens the default grids") {
  TempDir dir("cli_paper");
  // profile defaults supply rho {0, 0.5, 0.9} and both error laws; the
  // config overrides keep the run small.
  write_text(dir.path / "cfg.json",
             R"({"simulate":{"designs":[1],"p":[15],"R":1,"B":25,"n":40,"methods":["SN-1S"]}})");
  REQUIRE(run_cli("simulate --profile paper --config " + (dir.path / "cfg.json").string() +
                  " --seed 2 --out " + (dir.path / "o").string()) == 0);
  const auto csv = read_text(dir.path / "o" / "simulate_rejections.csv");
  std::size_t rows = 0;
  for (char ch : csv) rows += (ch == '\n');
  CHECK(rows == 6 + 1);  // 3 rho values x 2 error laws
  CHECK(csv.find("1,uniform,15,0.9,") != std::string::npos);
}

TEST_CASE("cli diagnose emits the expected grid shape") {
  TempDir dir("cli_diag");
  write_text(dir.path / "cfg.json", R"({"diagnose":{"M_steps":5,"p_steps":4,"p_max":100}})");
  REQUIRE(run_cli("diagnose --config " + (dir.path / "cfg.json").string() + " --out " +
                  (dir.path / "o").string()) == 0);
  const auto csv = read_text(dir.path / "o" / "diagnose_heatmap.csv");
  std::size_t rows = 0;
  for (char ch : csv) rows += (ch == '\n');
  CHECK(rows == 5 * 4 + 1);
}

TEST_CASE("cli confset scans a grid from config") {
  TempDir dir("cli_confset");
  write_text(dir.path / "ok.csv", "0\n0\n0\n");
  write_text(dir.path / "viol.csv", "1\n1\n1\n");
  write_text(dir.path / "cfg.json", R"({
    "confset": {
      "p": 1, "method": "SN-1S", "alpha": 0.05,
      "grid": [
        {"label": "inside", "data": "ok.csv"},
        {"label": "outside", "data": "viol.csv"},
        {"label": "broken", "data": "missing.csv"}
      ]
    }
  })");
  REQUIRE(run_cli("confset --config " + (dir.path / "cfg.json").string() + " --out " +
                  (dir.path / "o").string()) == 0);
  const auto csv = read_text(dir.path / "o" / "confset.csv");
  CHECK(csv.find("inside,1,") != std::string::npos);
  CHECK(csv.find("outside,0,inf,") != std::string::npos);
  CHECK(csv.find("broken,0,,,,,1,") != std::string::npos);
}

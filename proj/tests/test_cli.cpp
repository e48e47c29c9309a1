#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../tools/cli_app.hpp"
#include "spde/field.hpp"

namespace cli = spde::cli;
using nlohmann::json;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}
}  // namespace

TEST_CASE("constants subcommand exits cleanly") {
  CHECK(cli::run({"constants", "--B", "-o", "/tmp/spde_cli_b.csv"}) == 0);
  const std::string csv = slurp("/tmp/spde_cli_b.csv");
  CHECK(csv.find("B,,,2.3574") != std::string::npos);
}

TEST_CASE("simulate writes a reproducible field plus manifest") {
  const std::vector<std::string> args = {
      "simulate", "--N", "12", "--M", "6", "--T", "1", "--b", "0.1",
      "--sigma2", "0.1", "--theta2", "0.5", "--theta1", "-0.4", "--theta0", "0.3",
      "--K", "200", "--seed", "7", "-o", "/tmp/spde_cli_f1.bin"};
  CHECK(cli::run(args) == 0);
  auto args2 = args;
  args2.back() = "/tmp/spde_cli_f2.bin";
  CHECK(cli::run(args2) == 0);
  CHECK(slurp("/tmp/spde_cli_f1.bin") == slurp("/tmp/spde_cli_f2.bin"));

  json manifest;
  std::ifstream in("/tmp/spde_cli_f1.bin.manifest.json");
  in >> manifest;
  CHECK(manifest["schema"] == 1);
  CHECK(manifest["options"]["seed"] == 7);
  CHECK(manifest["outputs"].contains("/tmp/spde_cli_f1.bin"));

  // regenerate bit-identically from the manifest's option echo
  const auto& o = manifest["options"];
  std::vector<std::string> replay = {
      "simulate",
      "--N", std::to_string(int(o["N"])), "--M", std::to_string(int(o["M"])),
      "--T", std::to_string(double(o["T"])), "--b", std::to_string(double(o["b"])),
      "--sigma2", std::to_string(double(o["sigma2"])),
      "--theta2", std::to_string(double(o["theta2"])),
      "--theta1", std::to_string(double(o["theta1"])),
      "--theta0", std::to_string(double(o["theta0"])),
      "--K", std::to_string(int(o["K"])),
      "--seed", std::to_string(std::uint64_t(o["seed"])),
      "--scheme", std::string(o["scheme"]),
      "-o", "/tmp/spde_cli_f3.bin"};
  CHECK(cli::run(replay) == 0);
  CHECK(slurp("/tmp/spde_cli_f3.bin") == slurp("/tmp/spde_cli_f1.bin"));
}

TEST_CASE("csv and binary field files round-trip") {
  CHECK(cli::run({"simulate", "--N", "5", "--M", "4", "--K", "64", "--sigma2", "0.1",
                  "--theta2", "0.5", "--theta1", "-0.4", "--theta0", "0.3", "--seed",
                  "3", "-o", "/tmp/spde_cli_rt.csv"}) == 0);
  CHECK(cli::run({"simulate", "--N", "5", "--M", "4", "--K", "64", "--sigma2", "0.1",
                  "--theta2", "0.5", "--theta1", "-0.4", "--theta0", "0.3", "--seed",
                  "3", "-o", "/tmp/spde_cli_rt.bin"}) == 0);
  const spde::Field a = spde::read_field("/tmp/spde_cli_rt.csv");
  const spde::Field b = spde::read_field("/tmp/spde_cli_rt.bin");
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
  CHECK(a.grid.N == 5);
  CHECK(a.grid.b == 0.1);
}

TEST_CASE("qv consumes a field file") {
  CHECK(cli::run({"qv", "-i", "/tmp/spde_cli_f1.bin", "--theta2", "0.5", "--kappa",
                  "-0.8", "-o", "/tmp/spde_cli_qv.json"}) == 0);
  json j;
  std::ifstream in("/tmp/spde_cli_qv.json");
  in >> j;
  CHECK(j["schema"] == 1);
  for (const char* key : {"vt", "vsp", "vdouble", "vr"}) {
    CHECK(j.contains(key));
    CHECK(j[key].get<double>() >= 0.0);
  }
  // missing theta2 is a usage error
  CHECK(cli::run({"qv", "-i", "/tmp/spde_cli_f1.bin"}) == 2);
}

TEST_CASE("estimate echoes the auto-selected coarse lags") {
  CHECK(cli::run({"simulate", "--N", "256", "--M", "4", "--K", "1000", "--sigma2", "0.1",
                  "--theta2", "0.5", "--theta1", "-0.4", "--theta0", "0.3", "--seed",
                  "5", "-o", "/tmp/spde_cli_fav.bin"}) == 0);
  CHECK(cli::run({"estimate", "--method", "eta-avg", "-i", "/tmp/spde_cli_fav.bin",
                  "-o", "/tmp/spde_cli_eta.json"}) == 0);
  json j;
  std::ifstream in("/tmp/spde_cli_eta.json");
  in >> j;
  CHECK(j["diagnostics"]["v"] == 4.0);
  CHECK(j["diagnostics"]["w"] == 1.0);
  CHECK(j["estimate"].size() == 3);
}

TEST_CASE("validation failures exit with status 2") {
  CHECK(cli::run({"simulate", "--N", "4", "--M", "4", "--theta0", "99", "-o",
                  "/tmp/spde_cli_bad.bin"}) == 2);
  CHECK(cli::run({"simulate", "--frobnicate", "1", "-o", "/tmp/x.bin"}) == 2);
  CHECK(cli::run({"estimate", "--method", "nope", "-i", "/tmp/spde_cli_f1.bin"}) == 2);
  CHECK(cli::run({"estimate", "--method", "sigma2-sp", "-i", "/tmp/spde_cli_f1.bin"}) == 2);
  CHECK(cli::run({"qv", "-i", "/tmp/does_not_exist.bin", "--theta2", "0.5"}) == 1);
}

TEST_CASE("config file provides defaults, flags override") {
  {
    std::ofstream cfg("/tmp/spde_cli_cfg.json");
    cfg << R"({"simulate": {"N": 8, "M": 4, "K": 64, "sigma2": 0.1, "theta2": 0.5,
                "theta1": -0.4, "theta0": 0.3, "seed": 9,
                "output": "/tmp/spde_cli_cfg_out.bin"}})";
  }
  CHECK(cli::run({"--config", "/tmp/spde_cli_cfg.json", "simulate"}) == 0);
  const spde::Field a = spde::read_field("/tmp/spde_cli_cfg_out.bin");
  CHECK(a.grid.N == 8);
  CHECK(cli::run({"--config", "/tmp/spde_cli_cfg.json", "simulate", "--N", "10", "-o",
                  "/tmp/spde_cli_cfg_out2.bin"}) == 0);
  const spde::Field b = spde::read_field("/tmp/spde_cli_cfg_out2.bin");
  CHECK(b.grid.N == 10);
  CHECK(b.grid.M == 4);
}

TEST_CASE("mc subcommand produces versioned outputs") {
  CHECK(cli::run({"mc", "--grids", "8x4", "--reps", "3", "--K", "64", "--methods",
                  "sigma2-double", "--seed", "2", "-o", "/tmp/spde_cli_mc_"}) == 0);
  const std::string csv = slurp("/tmp/spde_cli_mc_records.csv");
  CHECK(csv.rfind("schema=1", 0) == 0);
  json j;
  std::ifstream in("/tmp/spde_cli_mc_summary.json");
  in >> j;
  CHECK(j["schema"] == 1);
}

TEST_CASE("rates subcommand prints the table") {
  CHECK(cli::run({"rates", "--M-list", "8,16", "--N-list", "64", "-o",
                  "/tmp/spde_cli_rates.csv"}) == 0);
  const std::string csv = slurp("/tmp/spde_cli_rates.csv");
  CHECK(csv.find("M,N,rate,J_sigma2,J_rho2") == 0);
  CHECK(cli::run({"rates", "--format", "md", "-o", "/tmp/spde_cli_rates.md"}) == 0);
  CHECK(slurp("/tmp/spde_cli_rates.md").rfind("| M |", 0) == 0);
}

// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "emloc/container.hpp"
#include "support.hpp"

using emloc::test::slurp;
using emloc::test::spit;
using emloc::test::TempDir;
using nlohmann::json;

namespace
{

int run(const std::string &args, const TempDir &dir)
{
  const std::string cmd = std::string("'") + EMLOC_CLI + "' " + args + " > '" + (dir / "stdout.txt").string() +
                          "' 2> '" + (dir / "stderr.txt").string() + "'";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::size_t line_count(const std::filesystem::path &p)
{
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

json minimal_scenario(std::size_t n_points)
{
  json j = json::parse(R"({
    "schema": "emloc.scenario/1",
    "grid": {"origin": [-0.5, -0.5, -0.5], "spacing": 1.0, "dims": [1, 1, 1]},
    "surface": {"center": [0, 0, 0], "radius": 3.0, "n_points": 4},
    "sources": [{"type": "dipole", "position": [0.0, 0.0, 0.0], "moment": [0, 0, 1]}],
    "frequencies": {"omegas": [2.0]},
    "inversion": {"lambda": 0.0, "max_iters": 20}
  })");
  j["surface"]["n_points"] = n_points;
  return j;
}

json small_scenario(double lambda)
{
  json j = json::parse(R"({
    "schema": "emloc.scenario/1",
    "grid": {"origin": [-0.5, -0.5, -0.5], "spacing": 0.25, "dims": [4, 4, 4]},
    "surface": {"center": [0, 0, 0], "radius": 3.0, "n_points": 200},
    "sources": [{"type": "ball", "center": [0.1, 0.0, 0.0], "radius": 0.3, "moment": [0, 0, 1]}],
    "frequencies": {"band": {"kappa_min": 3.0, "kappa_max": 9.0, "count": 3}},
    "noise": {"level": 0.01, "seed": 3},
    "inversion": {"lambda": 0.0, "gamma0": 1.0, "max_iters": 100, "kernel": "fft"},
    "imaging": {"broadband": true}
  })");
  j["inversion"]["lambda"] = lambda;
  return j;
}

std::string scenario_file(const TempDir &dir, const std::string &name, const json &j)
{
  spit(dir / name, j.dump(2));
  return "--scenario '" + (dir / name).string() + "'";
}

std::string out_flag(const TempDir &dir, const std::string &sub) { return " --out '" + (dir / sub).string() + "'"; }

} // namespace

TEST_CASE("cli: forward row counts and byte-identical reruns")
{
  TempDir dir("cli_fwd");
  const std::string sc4 = scenario_file(dir, "m4.json", minimal_scenario(4));
  const std::string sc8 = scenario_file(dir, "m8.json", minimal_scenario(8));

  REQUIRE(run("forward " + sc4 + out_flag(dir, "a"), dir) == 0);
  CHECK(line_count(dir / "a/data_data.csv") == 1 + 4);
  CHECK(line_count(dir / "a/data_mesh.csv") == 1 + 4);
  const json meta = json::parse(slurp(dir / "a/data.json"));
  CHECK(meta["n_points"] == 4);
  CHECK(meta["n_freqs"] == 1);

  REQUIRE(run("forward " + sc4 + out_flag(dir, "b"), dir) == 0);
  CHECK(slurp(dir / "a/data_data.csv") == slurp(dir / "b/data_data.csv"));
  CHECK(slurp(dir / "a/data.json") == slurp(dir / "b/data.json"));
  CHECK(slurp(dir / "a/source.csv") == slurp(dir / "b/source.csv"));

  REQUIRE(run("forward " + sc4 + " --threads 3" + out_flag(dir, "c"), dir) == 0);
  CHECK(slurp(dir / "a/data_data.csv") == slurp(dir / "c/data_data.csv"));

  REQUIRE(run("forward " + sc8 + out_flag(dir, "d"), dir) == 0);
  CHECK(line_count(dir / "d/data_data.csv") == 1 + 8);
  CHECK(json::parse(slurp(dir / "d/data.json"))["n_freqs"] == 1);

  // Image with mismatched mesh size: dimension error.
  CHECK(run("image " + sc4 + out_flag(dir, "d"), dir) == 2);
  CHECK(slurp(dir / "stderr.txt").find("dimension mismatch") != std::string::npos);
  CHECK(run("image " + sc4 + out_flag(dir, "a"), dir) == 0);
  CHECK(run("image " + sc4 + " --data '" + (dir / "d/data.json").string() + "'" + out_flag(dir, "e"), dir) == 2);
}

TEST_CASE("cli: full pipeline, sparsity limit and determinism")
{
  TempDir dir("cli_pipe");
  const std::string sc = scenario_file(dir, "s.json", small_scenario(0.0));
  for (const char *fmt : {"csv", "bin"})
  {
    const std::string out = out_flag(dir, fmt);
    const std::string f = std::string(" --format ") + fmt;
    REQUIRE(run("forward " + sc + out + f, dir) == 0);
    REQUIRE(run("image " + sc + out + f, dir) == 0);
    REQUIRE(run("invert " + sc + out + f, dir) == 0);
  }
  for (const char *name : {"images.json", "broadband.json", "slice_sum.pgm", "slice_broadband.pgm", "image_report.json",
                           "j_lambda.json", "trace.csv", "summary.json", "j_lambda.pgm"})
    CHECK(std::filesystem::exists(dir / "csv" / name));
  CHECK(std::filesystem::exists(dir / "bin/j_lambda.bin"));

  const json s0 = json::parse(slurp(dir / "csv/summary.json"));
  const json s0b = json::parse(slurp(dir / "bin/summary.json"));
  CHECK(s0["L"] == s0b["L"]); // format does not change the arithmetic
  CHECK(s0["diverged"] == false);
  const double lmax = s0["lambda_max"].get<double>();
  REQUIRE(lmax > 0.0);

  // Rerun into a fresh directory: byte-identical outputs.
  REQUIRE(run("forward " + sc + out_flag(dir, "again"), dir) == 0);
  REQUIRE(run("image " + sc + out_flag(dir, "again"), dir) == 0);
  REQUIRE(run("invert " + sc + out_flag(dir, "again"), dir) == 0);
  for (const char *name : {"data_data.csv", "image_000.csv", "broadband.csv", "j_lambda.csv", "trace.csv",
                           "summary.json", "image_report.json"})
    CHECK(slurp(dir / "csv" / name) == slurp(dir / "again" / name));

  // lambda well above lambda_max: the minimizer is exactly zero.
  const std::string big = scenario_file(dir, "big.json", small_scenario(10.0 * lmax));
  REQUIRE(run("invert " + big + out_flag(dir, "csv"), dir) == 0);
  const emloc::RealField j = emloc::read_real_field(dir / "csv/j_lambda.json");
  CHECK(emloc::count_nonzero_components(j) == 0);
  CHECK(json::parse(slurp(dir / "csv/summary.json"))["l0_components"] == 0);

  // Image grid differing from the scenario grid.
  json other = small_scenario(0.0);
  other["grid"]["dims"] = json::array({4, 4, 2});
  other["grid"]["origin"] = json::array({-0.5, -0.5, -0.25});
  other["sources"][0]["radius"] = 0.2;
  const std::string osc = scenario_file(dir, "other.json", other);
  CHECK(run("invert " + osc + out_flag(dir, "csv"), dir) == 2);
}

TEST_CASE("cli: usage errors exit with code 2")
{
  TempDir dir("cli_usage");
  const std::string sc = scenario_file(dir, "m.json", minimal_scenario(4));
  CHECK(run("", dir) == 2);
  CHECK(run("forward", dir) == 2);
  CHECK(run("frobnicate " + sc, dir) == 2);
  CHECK(run("forward --scenario '" + (dir / "nope.json").string() + "'", dir) == 2);
  CHECK(run("forward " + sc + " --format xml", dir) == 2);
  CHECK(run("image " + sc + out_flag(dir, "empty"), dir) == 2); // no data yet
  spit(dir / "broken.json", "{");
  CHECK(run("forward --scenario '" + (dir / "broken.json").string() + "'", dir) == 2);
  json cut = minimal_scenario(4);
  cut["surface"]["radius"] = 0.6;
  CHECK(run("forward " + scenario_file(dir, "cut.json", cut), dir) == 2);
  CHECK(run("--help", dir) == 0);
}

TEST_CASE("cli: validate reports the expected checks")
{
  TempDir dir("cli_validate");
  const std::string sc = scenario_file(dir, "s.json", small_scenario(0.0));
  const int code = run("validate " + sc + " --skip-rates" + out_flag(dir, "v"), dir);
  const json rep = json::parse(slurp(dir / "v/report.json"));
  std::vector<std::string> failed;
  for (const auto &c : rep["checks"])
    if (!c["pass"].get<bool>())
      failed.push_back(c["id"].get<std::string>());
  CHECK(code == (failed.empty() ? 0 : 1));
  // The only expected miss is the off-source decay of the truncated delta integral.
  REQUIRE(failed.size() == 1);
  CHECK(failed[0] == "delta.offsource_decay");
  CHECK(rep["coincidence_sign"] == -1);
  CHECK(slurp(dir / "stdout.txt") == slurp(dir / "v/report.txt"));
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"

using json = nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "skcone");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = skcone::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config(const char* name) { return std::string(SKCONE_CONFIG_DIR) + "/" + name + ".json"; }

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("skcone_cli_" + name);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("quartic spot values") {
  auto r = run({"quartic", "--case", "G", "--coeffs", "1,0,0,1"});
  CHECK(r.code == 0);
  CHECK(r.out == "1296\n");
  CHECK(r.err.empty());
  r = run({"quartic", "--case", "E6", "--coeffs", "1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1"});
  CHECK(r.out == "6\n");
  r = run({"quartic", "--case", "A", "--coeffs", "1,i"});
  CHECK(r.out == "0\n");
  r = run({"quartic", "--case", "A", "--coeffs", "2*i,0"});
  CHECK(r.out == "64\n");
}

TEST_CASE("quartic usage errors exit 2") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"quartic", "--case", "G", "--coeffs", "1,0,0"},
           {"quartic", "--case", "G", "--coeffs", "1,i,0,1"},
           {"quartic", "--case", "H", "--coeffs", "1"},
           {"quartic", "--case", "G", "--coeffs", "1,z0,0,1"},
           {"quartic", "--case", "G", "--coeffs", "1,,0,1"},
           {"quartic", "--case", "BD", "--coeffs", "1,2,3"}}) {
    const auto r = run(args);
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK_FALSE(r.err.empty());
  }
}

TEST_CASE("parse reports syntax errors with their offset") {
  const auto r = run({"parse", "--expr", "z0^^2", "--nvars", "1"});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(r.err.find("offset 3") != std::string::npos);
}

TEST_CASE("parse echoes the normalized tree and the homogeneity report") {
  auto r = run({"parse", "--expr", "((z1*z2)*z3)/z0", "--nvars", "4", "--samples", "5"});
  CHECK(r.code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["expr"] == "z1 * z2 * z3 / z0");
  CHECK(doc["homogeneity"]["samples"] == 5);
  CHECK(doc["homogeneity"]["euler_residual"].get<double>() < 1e-12);

  r = run({"parse", "--expr", "z0^3", "--nvars", "1"});
  CHECK(r.code == 1);
  doc = json::parse(r.out);
  CHECK(doc["homogeneity"]["euler_residual"].get<double>() >= 0.1);
  CHECK_FALSE(doc["homogeneity"]["pass"].get<bool>());
}

TEST_CASE("verify writes the report and summarizes on stdout") {
  const auto path = scratch("fs2.json");
  std::filesystem::remove(path);
  auto r = run({"verify", "--config", config("fs2"), "--samples", "4", "--out", path.string(), "--threads", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("PASS ", 0) == 0);
  std::ifstream in(path);
  const auto doc = json::parse(in);
  CHECK(doc["summary"]["failed"] == 0);

  r = run({"verify", "--config", config("fs2"), "--samples", "2", "--seed", "9"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["meta"]["seed"] == 9);
}

TEST_CASE("verify exit codes for failing checks and bad configs") {
  const auto bad_checks = scratch("cubic.json");
  std::ofstream(bad_checks) << R"({"prepotential": "z0^3", "n_vars": 1, "sample_count": 2,
                                   "base_point": [[0, 1]], "checks": ["expr.euler"]})";
  auto r = run({"verify", "--config", bad_checks.string()});
  CHECK(r.code == 1);
  CHECK(json::parse(r.out)["summary"]["failed"] == 2);

  const auto bad_key = scratch("badkey.json");
  std::ofstream(bad_key) << R"({"prepotential": "i*z0^2", "n_vars": 1, "base_point": [1], "colour": 1})";
  r = run({"verify", "--config", bad_key.string()});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(r.err.find("colour") != std::string::npos);

  const auto bad_expr = scratch("badexpr.json");
  std::ofstream(bad_expr) << R"({"prepotential": "i*z0^^2", "n_vars": 1, "base_point": [1]})";
  r = run({"verify", "--config", bad_expr.string()});
  CHECK(r.code == 2);

  r = run({"verify", "--config", "/nonexistent/config.json"});
  CHECK(r.code == 2);
}

TEST_CASE("sphere prints level-set data") {
  const auto r = run({"sphere", "--expr", "z1*z2*z3/z0", "--nvars", "4", "--point", "1,-i,-i,-i"});
  CHECK(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["kappa"] == -1);
  CHECK(doc["k"].get<double>() == doctest::Approx(-0.5));
  CHECK(doc["g_sigma_sigma"].get<double>() == doctest::Approx(-1.0));
  CHECK(doc["frame"].size() == 7);
  CHECK(run({"sphere", "--expr", "z1*z2*z3/z0", "--nvars", "4", "--point", "1,i,i"}).code == 2);
  CHECK(run({"sphere", "--expr", "z1*z2*z3/z0", "--nvars", "4", "--point", "0,i,i,i"}).code == 2);
}

TEST_CASE("projective prints metric values") {
  auto r = run({"projective", "--expr", "i*(z0^2+z1^2)", "--nvars", "2", "--point", "1,0", "--vector", "0,1"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["gbar"].get<double>() == doctest::Approx(1.0));
  r = run({"projective", "--expr", "i*(z0^2+z1^2)", "--nvars", "2", "--point", "1,0"});
  const auto m = json::parse(r.out)["gbar_matrix"];
  CHECK(m.size() == 4);
  CHECK(m[0][0].get<double>() == doctest::Approx(0.0));
  CHECK(m[1][1].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"quartic", "--case", "G"}).code == 2);
  CHECK(run({"parse", "--expr", "z0", "--nvars", "0"}).code == 2);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("verify") != std::string::npos);
}

}

#include <catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "mjflow/cli.hpp"

using namespace mjflow::cli;
namespace fs = std::filesystem;
using Catch::Matchers::WithinAbs;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mjflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

CliConfig parse_args(std::vector<std::string> args) {
  args.insert(args.begin(), "mjflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mjflow_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("parse") {
  const CliConfig c = parse_args({"classify", "--n", "2", "--a", "12", "--b", "6", "--k", "1"});
  CHECK(c.command == Command::Classify);
  CHECK(c.n == 2);
  CHECK(c.a == 12.0);
  CHECK(c.grid_size == 400);
  CHECK(c.t_max == 200.0);
  CHECK(c.tol == 1e-8);
  CHECK(c.snapshot_interval == 1.0);
  CHECK(c.init == InitChoice::Auto);
  CHECK_FALSE(c.format);

  CHECK_THROWS_AS(parse_args({"classify", "--n", "2", "--b", "6", "--k", "1"}), UsageError);
  CHECK_THROWS_AS(parse_args({"--n", "2", "--a", "3", "--b", "6", "--k", "1"}), UsageError);
  CHECK_THROWS_AS(parse_args({"flow", "--n", "2", "--a", "3", "--b", "6", "--k", "1", "--init", "x"}),
                  UsageError);
  CHECK_THROWS_AS(parse_args({"sweep", "--n", "2", "--a", "3", "--b", "6", "--k", "1"}), UsageError);

  const Result missing = invoke({"classify", "--n", "2", "--b", "6", "--k", "1"});
  CHECK(missing.code == kExitUsage);
  CHECK(missing.err.find("--a") != std::string::npos);
}

TEST_CASE("config file precedence") {
  const fs::path dir = scratch("config");
  const fs::path file = dir / "run.ini";
  std::ofstream(file) << "# flow settings\nn=2\na=12\nb=6\nk=1\ntol=1e-6\ngrid-size=64\n";
  const CliConfig from_file = parse_args({"flow", "--config", file.string()});
  CHECK(from_file.tol == 1e-6);
  CHECK(from_file.grid_size == 64);
  CHECK(from_file.a == 12.0);
  const CliConfig flag_wins = parse_args({"flow", "--config", file.string(), "--tol", "1e-9"});
  CHECK(flag_wins.tol == 1e-9);

  std::ofstream(dir / "bad.ini") << "n=2\na=12\nb=6\nk=1\nwarp=9\n";
  CHECK_THROWS_AS(parse_args({"flow", "--config", (dir / "bad.ini").string()}), UsageError);
}

TEST_CASE("out-dir from the environment") {
  ::setenv("MJFLOW_OUT_DIR", "/tmp/from_env", 1);
  CHECK(parse_args({"flow", "--n", "2", "--a", "12", "--b", "6", "--k", "1"}).out_dir ==
        "/tmp/from_env");
  CHECK(parse_args({"flow", "--n", "2", "--a", "12", "--b", "6", "--k", "1", "--out-dir", "x"})
            .out_dir == "x");
  ::unsetenv("MJFLOW_OUT_DIR");
}

TEST_CASE("classify") {
  const Result r = invoke({"classify", "--n", "2", "--a", "3", "--b", "3", "--k", "1"});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::ordered_json::parse(r.out);
  CHECK_THAT(j["c_k"].get<double>(), WithinAbs(-1.0 / 6, 1e-12));
  CHECK(j["regime"] == "unstable");
  CHECK(j.contains("lambda"));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"n", "a", "b", "k", "c", "c_k", "beta_n", "ck_plus_k",
                                         "regime", "lambda", "k_upper_bound"});

  const Result stable = invoke({"classify", "--n", "3", "--a", "4", "--b", "2", "--k", "1"});
  CHECK_FALSE(nlohmann::json::parse(stable.out).contains("lambda"));

  CHECK(invoke({"classify", "--n", "2", "--a", "3", "--b", "3", "--k", "-1"}).code == kExitUsage);
  CHECK(invoke({"classify", "--n", "1", "--a", "3", "--b", "3", "--k", "1"}).code == kExitUsage);
}

TEST_CASE("lambda") {
  const Result r = invoke({"lambda", "--n", "2", "--a", "12", "--b", "6", "--k", "1"});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK_THAT(j["lambda"].get<double>(), WithinAbs(1.0193, 5e-4));
  CHECK(j["residual"].get<double>() < 1e-10);
  CHECK(invoke({"lambda", "--n", "3", "--a", "4", "--b", "2", "--k", "1"}).code == kExitUsage);
}

TEST_CASE("closed form") {
  const Result r =
      invoke({"closed-form", "--n", "3", "--a", "4", "--b", "2", "--k", "1", "--grid-size", "10"});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 12);
  CHECK(lines[0] == "tau,psi,psi_prime");
  CHECK(lines[1].rfind("1,1,", 0) == 0);
  CHECK(lines[11].rfind("2,", 0) == 0);

  const Result s = invoke({"closed-form", "--n", "2", "--a", "12", "--b", "6", "--k", "1", "--s",
                           "1.5", "--grid-size", "9", "--format", "json"});
  REQUIRE(s.code == kExitOk);
  const auto j = nlohmann::json::parse(s.out);
  CHECK(j["tau"].size() == 10);
  CHECK_THAT(j["psi"][3].get<double>(), WithinAbs(3.1, 1e-12));
  CHECK(invoke({"closed-form", "--n", "2", "--a", "12", "--b", "6", "--k", "1", "--s", "7"}).code ==
        kExitUsage);
}

TEST_CASE("sweep") {
  const Result r = invoke({"sweep", "--n", "2", "--a", "12", "--b", "6", "--k", "1", "--vary", "k",
                           "--from", "0", "--to", "2", "--count", "5"});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "n,a,b,k,c_k,ck_plus_k,regime,lambda");
  CHECK(lines[1].find(",0,") != std::string::npos);
  CHECK(lines[3].find("unstable") != std::string::npos);
  CHECK(lines[5].find("out_of_theorem") != std::string::npos);

  const Result j = invoke({"sweep", "--n", "2", "--a", "12", "--b", "6", "--k", "1", "--vary", "a",
                           "--from", "2", "--to", "40", "--count", "20", "--format", "json"});
  const auto arr = nlohmann::json::parse(j.out);
  REQUIRE(arr.size() == 20);
  for (std::size_t i = 1; i < arr.size(); ++i) {
    CHECK(arr[i]["a"].get<double>() > arr[i - 1]["a"].get<double>());
  }
  CHECK(invoke({"sweep", "--n", "2", "--a", "12", "--b", "6", "--k", "1", "--vary", "a", "--from",
                "0.5", "--to", "2", "--count", "3"})
            .code == kExitUsage);
}

TEST_CASE("flow writes snapshots and a report") {
  const fs::path dir = scratch("flow");
  const Result r = invoke({"flow", "--n", "3", "--a", "4", "--b", "2", "--k", "1", "--grid-size",
                           "32", "--t-max", "1.5", "--snapshot-interval", "0.5", "--out-dir",
                           dir.string(), "--potentials"});
  REQUIRE(r.code == kExitOk);
  for (const char* name : {"snap_0.000000.csv", "snap_0.500000.csv", "snap_1.000000.csv",
                           "snap_1.500000.csv", "pot_1.500000.csv", "report.json"}) {
    CHECK(fs::exists(dir / name));
  }
  CHECK(slurp(dir / "snap_0.500000.csv").rfind("tau,psi,psi_prime,eta,trace\n", 0) == 0);
  CHECK(slurp(dir / "pot_1.500000.csv").rfind("s,g_prime,f_prime,f_hat\n", 0) == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["regime"] == "stable");
  CHECK(report.contains("converged"));

  CHECK(invoke({"flow", "--n", "3", "--a", "4", "--b", "2", "--k", "1", "--grid-size", "8",
                "--out-dir", dir.string()})
            .code == kExitUsage);
  CHECK(invoke({"flow", "--n", "2", "--a", "12", "--b", "6", "--k", "1", "--init",
                "supercritical", "--grid-size", "32", "--out-dir", dir.string()})
            .code == kExitUsage);
}

TEST_CASE("binary exit codes") {
  const std::string cli = MJFLOW_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(status("classify --n 2 --a 12 --b 6 --k 1") == 0);
  CHECK(status("classify --n 2 --b 6 --k 1") == 2);
  CHECK(status("--help") == 0);
}

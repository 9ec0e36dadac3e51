#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "coarsehom/cli.hpp"
#include "coarsehom/errors.hpp"

using namespace coarsehom;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("coarsehom_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Result cli(const std::string& args) {
  const fs::path out = scratch() / "stdout", err = scratch() / "stderr";
  const std::string cmd = std::string(COARSEHOM_CLI_PATH) + " " + args + " >" + out.string() +
                          " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

}  // namespace

TEST_CASE("decide on lattice(2) reports an obstruction") {
  const Result r = cli("decide --space lattice:2 --sizes 4,8,16,32");
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["payload"]["kind"] == "Obstructed");
  CHECK(j["payload"]["per_size"].size() == 4);
  CHECK_FALSE(j["diagnostics"].contains("wall_seconds"));
}

TEST_CASE("spectrum on circle 64 matches the closed form") {
  const Result r = cli("spectrum --mesh circle --subdiv 64");
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["payload"]["eigenvalues"].size() == 64);
  CHECK(j["payload"]["closed_form_relative_error"].get<double>() <= 1e-9);
}

TEST_CASE("reports are deterministic and round-trip") {
  const std::string args = "cut --space tree:3 --radius 4 --reach 2";
  const Result a = cli(args), b = cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(dump(Json::parse(a.out)) == a.out);
}

TEST_CASE("spec files, config files and csv output") {
  const fs::path space = write("space.json", R"({"family": "tree", "k": 3})");
  const fs::path out = scratch() / "profile.csv";
  const Result r = cli("profile --space " + space.string() + " --radii 1,2 --out " + out.string());
  REQUIRE(r.code == 0);
  CHECK(slurp(out) == "region_id,vol_R,vol_dR,ratio\nball(1),4,9,2.25\nball(2),10,18,1.8\n");

  const fs::path config = write("run.json", R"({
  "command": "tails",
  "space": {"family": "lattice", "n": 1},
  "radius": 5,
  "demand": "alternating"
})");
  const Result run = cli("run --config " + config.string());
  REQUIRE(run.code == 0);
  const Json j = Json::parse(run.out);
  CHECK(j["payload"]["feasible"] == true);
  CHECK(j["payload"]["verified"] == true);
  CHECK(j["config"]["space_source"] == "inline");
}

TEST_CASE("psc reads a saved verdict") {
  const fs::path verdict = scratch() / "verdict.json";
  REQUIRE(cli("decide --space tree:3 --sizes 3,4,5,6,7,8 --out " + verdict.string()).code == 0);
  const Result r = cli("psc --ahat 1 --verdict " + verdict.string());
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["payload"]["psc"] == "AdmitsUPSC");
}

TEST_CASE("configuration errors exit 2 and name the field") {
  const fs::path bad_space = write("bad_space.json", "{\n  \"family\": \"lattice\",\n  \"n\": 9\n}\n");
  Result r = cli("decide --sizes 4,8 --space " + bad_space.string());
  CHECK(r.code == 2);
  Json e = Json::parse(r.err);
  CHECK(e["error"] == "ConfigError");
  CHECK(e["field"] == "n");
  CHECK(e["line"] == 3);

  const fs::path unknown = write("unknown.json", "{\n  \"command\": \"decide\",\n  \"colour\": 1\n}\n");
  r = cli("run --config " + unknown.string());
  CHECK(r.code == 2);
  e = Json::parse(r.err);
  CHECK(e["field"] == "colour");
  CHECK(e["line"] == 3);

  r = cli("tails --space lattice:1");
  CHECK(r.code == 2);
  CHECK(Json::parse(r.err)["field"] == "radius");

  r = cli("decide --space lattice:2 --sizes 4,x");
  CHECK(r.code == 2);
  CHECK(Json::parse(r.err)["field"] == "sizes");

  r = cli("no-such-command");
  CHECK(r.code == 2);
}

TEST_CASE("reports with another schema tag are rejected") {
  const fs::path old = write("old.json", R"({"schema": "coarsehom.report/0", "command": "decide", "payload": {}})");
  const Result r = cli("psc --ahat 1 --verdict " + old.string());
  CHECK(r.code == 2);
  CHECK(Json::parse(r.err)["field"] == "schema");
}

TEST_CASE("RunConfig is strict") {
  CHECK_THROWS_AS(RunConfig::from_json(Json{{"command", "decide"}, {"epsilon", 0.1}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(Json{{"command", "cover"}, {"epsilon", -1.0}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(Json{{"command", "weyl"}, {"lambda", "5:1:4"}}), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json(Json{{"command", "frobnicate"}}), ConfigError);
  const RunConfig c = RunConfig::from_json(Json{{"command", "weyl"}, {"lambda", "1:100:3"}});
  REQUIRE(c.lambda.size() == 3);
  CHECK(c.lambda[1] == doctest::Approx(10.0));
  CHECK(RunConfig::from_json(c.to_json()).to_json() == c.to_json());
}

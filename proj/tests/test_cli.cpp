#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "brcap/io.hpp"

using namespace brcap;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("brcap-cli-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Result run(const std::string& args, const fs::path& dir) {
  const std::string out = (dir / "stdout.txt").string(), err = (dir / "stderr.txt").string();
  const std::string cmd = std::string(BRCAP_CLI_PATH) + " " + args + " > " + out + " 2> " + err;
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text(out);
  r.err = read_text(err);
  return r;
}

std::string common(const fs::path& dir) {
  return "--out " + (dir / "out").string() + " --cache-dir " + (dir / "cache").string();
}

}  // namespace

TEST_CASE("snake-a0 in d=6") {
  const fs::path dir = scratch("a0");
  const Result r = run("snake-a0 --d 6 " + common(dir), dir);
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["schema"] == kJsonSchema);
  CHECK(j["subcommand"] == "snake-a0");
  CHECK(j["result"]["a0"].get<double>() == doctest::Approx(6.0).epsilon(1e-5));
  CHECK(json::parse(read_text((dir / "out" / "snake-a0.json").string())) == j);
  const json m = json::parse(read_text((dir / "out" / "snake-a0.manifest.json").string()));
  CHECK(m["config"]["common"]["d"] == "6");
  CHECK(m["versions"].size() > 0);
  CHECK(m["artifacts"].size() == 1);
}

TEST_CASE("bcap methods agree") {
  const fs::path dir = scratch("bcap");
  const Result r = run("bcap --d 5 --set point:0,0,0,0,0 --radius 12 --method all --ladder 4,8 " + common(dir), dir);
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const auto& est = j["result"]["estimates"];
  REQUIRE(est.size() == 3);
  const double sum = est[0]["value"].get<double>();
  CHECK(est[2]["value"].get<double>() == doctest::Approx(sum).epsilon(1e-6));
  CHECK(est[1]["value"].get<double>() == doctest::Approx(sum).epsilon(0.05));
  CHECK(j["result"]["bcap"].get<double>() == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("invalid input exits with a JSON error") {
  const fs::path dir = scratch("invalid");
  const Result r = run("hit-mc --offspring custom --pmf 0.5,0.4,0.1 " + common(dir), dir);
  CHECK(r.code == 1);
  const json e = json::parse(r.err);
  CHECK(e["error"] == "validation_error");
  CHECK(e["exit_code"] == 1);
  CHECK(!e["message"].get<std::string>().empty());
  CHECK(run("bcap --method nearest " + common(dir), dir).code == 1);
  CHECK(run("nonsense", dir).code == 1);
}

TEST_CASE("artifacts do not depend on the thread count") {
  const fs::path dir = scratch("threads");
  const std::string args = "escape-mc --d 5 --x 2 --samples 400 --vmax 2000 --seed 9 --cache-dir " + (dir / "cache").string();
  std::string ref_csv, ref_json;
  json ref_manifest;
  for (int t : {1, 4, 8}) {
    CAPTURE(t);
    const fs::path out = dir / ("t" + std::to_string(t));
    REQUIRE(run(args + " --threads " + std::to_string(t) + " --out " + out.string(), dir).code == 0);
    const std::string csv = read_text((out / "escape-mc.csv").string()), js = read_text((out / "escape-mc.json").string());
    json m = json::parse(read_text((out / "escape-mc.manifest.json").string()));
    m.erase("timestamp");
    if (t == 1) {
      ref_csv = csv;
      ref_json = js;
      ref_manifest = m;
    } else {
      CHECK(csv == ref_csv);
      CHECK(js == ref_json);
      CHECK(m == ref_manifest);
    }
  }
}

TEST_CASE("INI configuration") {
  const fs::path dir = scratch("ini");
  const std::string ini = (dir / "run.ini").string();
  write_text(ini, "d = 6\n");
  const Result r = run("snake-a0 --config " + ini + " " + common(dir), dir);
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["result"]["a0"].get<double>() == doctest::Approx(6.0).epsilon(1e-5));
}

TEST_CASE("Green table cache") {
  const fs::path dir = scratch("cache");
  const std::string args = "green --d 5 --length 8 " + common(dir);
  const Result a = run(args, dir);
  REQUIRE(a.code == 0);
  std::size_t files = 0;
  fs::file_time_type stamp;
  for (const auto& e : fs::directory_iterator(dir / "cache")) {
    ++files;
    stamp = e.last_write_time();
  }
  CHECK(files == 1);
  const Result b = run(args, dir);
  REQUIRE(b.code == 0);
  CHECK(b.out == a.out);
  for (const auto& e : fs::directory_iterator(dir / "cache")) CHECK(e.last_write_time() == stamp);

  const fs::path nc = scratch("nocache");
  const Result c = run("green --d 5 --length 8 --no-cache " + common(nc), nc);
  REQUIRE(c.code == 0);
  CHECK(c.out == a.out);
  CHECK((!fs::exists(nc / "cache") || fs::is_empty(nc / "cache")));
}

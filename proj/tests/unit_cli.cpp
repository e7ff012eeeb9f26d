#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "helpers.hpp"

using nlohmann::json;

namespace {

const char* cli() { return std::getenv("MORAN_CLI"); }

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args, const std::string& env = "") {
  RunResult r;
  std::string out = "cli_stdout.tmp", err = "cli_stderr.tmp";
  std::string cmd = env + (env.empty() ? "" : " ") + std::string(cli()) + " " + args + " > " + out +
                    " 2> " + err;
  int rc = std::system(cmd.c_str());
  r.exit_code = (rc >= 0 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  std::remove(out.c_str());
  std::remove(err.c_str());
  return r;
}

bool hex16(const std::string& s) {
  if (s.size() != 16) return false;
  for (char c : s)
    if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

#define NEED_CLI()                                  \
  if (!cli()) {                                     \
    MESSAGE("MORAN_CLI not set; suite skipped");    \
    return;                                         \
  }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate emits a manifest-bearing report and exit 0") {
    NEED_CLI();
    RunResult r = run("validate " + th::spec_path("cantor-3") + " --depth 4");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["valid"] == true);
    CHECK(j["words_checked"] == 30);
    CHECK(j["manifest"]["tool_version"] == "1.0.0");
    CHECK(hex16(j["manifest"]["spec_fingerprint"].get<std::string>()));
  }

  TEST_CASE("domain violations exit 1 with machine-readable witnesses") {
    NEED_CLI();
    RunResult r = run("validate " + th::fixture_path("overlapping-offsets") + " --depth 2");
    REQUIRE(r.exit_code == 1);
    json j = json::parse(r.out);
    CHECK(j["valid"] == false);
    REQUIRE(!j["violations"].empty());
    CHECK(j["violations"][0]["kind"] == "overlap");
  }

  TEST_CASE("unreadable or malformed input exits 2") {
    NEED_CLI();
    CHECK(run("validate " + th::fixture_path("broken")).exit_code == 2);
    CHECK(run("validate " + th::fixture_path("bad-ratio")).exit_code == 2);
    CHECK(run("validate no_such_file.json").exit_code == 2);
    CHECK(run("frobnicate").exit_code == 2);
  }

  TEST_CASE("rearrange reports any determined verdict as success") {
    NEED_CLI();
    RunResult r = run("rearrange " + th::spec_path("dyadic-chain") + " --depth 4");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["verdict"] == "no");
    CHECK(j["witness"]["level"] == 1);
    CHECK(j["witness"]["offspring_sizes"] == json::array({4}));
  }

  TEST_CASE("sigma on a non-rearrangeable construction exits 3") {
    NEED_CLI();
    RunResult r = run("sigma " + th::spec_path("dyadic-chain") + " --depth 4");
    REQUIRE(r.exit_code == 3);
    json j = json::parse(r.out);
    CHECK(j["error"]["witness"]["level"] == 1);
  }

  TEST_CASE("comparison routing separates precondition from incompatibility") {
    NEED_CLI();
    RunResult three = run("lipschitz " + th::spec_path("dyadic-chain") + " " +
                          th::spec_path("cantor-3") + " --depth 4 --samples 10");
    CHECK(three.exit_code == 3);
    RunResult four = run("lipschitz " + th::spec_path("cantor-3") + " " +
                         th::spec_path("seeded-b") + " --depth 4 --samples 10");
    CHECK(four.exit_code == 4);
  }

  TEST_CASE("lipschitz on a construction against itself is exact") {
    NEED_CLI();
    RunResult r = run("lipschitz " + th::spec_path("cantor-3") + " " + th::spec_path("cantor-3") +
                      " --depth 6 --samples 200 --seed 5");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["stats"]["min_ratio"] == 1.0);
    CHECK(j["stats"]["max_ratio"] == 1.0);
  }

  TEST_CASE("word arguments are validated before use") {
    NEED_CLI();
    CHECK(run("geodesic " + th::spec_path("cantor-3") + " --depth 3 --from 1.1 --to 7.7")
              .exit_code == 2);
    RunResult ok = run("geodesic " + th::spec_path("ends-packed") +
                       " --depth 3 --from 1.2.2 --to 2.1.1");
    REQUIRE(ok.exit_code == 0);
    json j = json::parse(ok.out);
    CHECK(j["distance"] == 1);
    CHECK(j["gromov_product"]["twice"] == 5);
  }

  TEST_CASE("vertex budgets cap runaway builds through flag and environment") {
    NEED_CLI();
    std::string args = "build " + th::spec_path("cantor-3") + " --depth 12";
    CHECK(run(args).exit_code == 0);
    CHECK(run(args + " --budget 100").exit_code == 2);
    CHECK(run(args, "MORAN_MAX_VERTICES=100").exit_code == 2);
  }

  TEST_CASE("float-mode geometry cannot feed exact-only commands") {
    NEED_CLI();
    CHECK(run("map " + th::spec_path("rotated-2d") + " --depth 3 --ray 1.1.1").exit_code == 2);
  }

  TEST_CASE("reports are byte-identical across runs") {
    NEED_CLI();
    std::string cmd = "diagnose " + th::spec_path("seeded-b") + " --depth 4";
    RunResult a = run(cmd), b = run(cmd);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("elapsed") == std::string::npos);  // timing stays on stderr
  }

  TEST_CASE("render writes the svg and fingerprints it") {
    NEED_CLI();
    std::string svg_path = "cli_render.tmp.svg";
    RunResult r = run("render " + th::spec_path("ends-packed") + " --depth 3 --out " + svg_path);
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(hex16(j["svg_fingerprint"].get<std::string>()));
    std::string body = slurp(svg_path);
    CHECK(body.rfind("<?xml", 0) == 0);
    CHECK(body.find("<svg") != std::string::npos);
    RunResult again = run("render " + th::spec_path("ends-packed") + " --depth 3 --out " + svg_path);
    CHECK(slurp(svg_path) == body);
    std::remove(svg_path.c_str());
  }
}

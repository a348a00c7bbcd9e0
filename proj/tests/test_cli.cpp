#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "cli.hpp"
#include "crossenv/error.hpp"
#include "crossenv/json_io.hpp"
#include "crossenv/measure.hpp"

namespace fs = std::filesystem;
using namespace crossenv;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "crossenv");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const fs::path& workdir() {
  static const fs::path dir = [] {
    const char* env = std::getenv("CROSSENV_TEST_TMP");
    fs::path d = env ? fs::path(env) : fs::temp_directory_path() / "crossenv_cli_test";
    fs::create_directories(d);
    const Outcome o = call({"fixtures", "--dir", d.string()});
    REQUIRE(o.code == 0);
    return d;
  }();
  return dir;
}

std::string file(const std::string& name) { return (workdir() / name).string(); }

}  // namespace

TEST_CASE("point and lattice parsing") {
  CHECK(cli::parse_point("0.3-0.2i") == Point(0.3, -0.2));
  CHECK(cli::parse_point("1e-2+3i") == Point(0.01, 3.0));
  CHECK(cli::parse_point("2i") == Point(0.0, 2.0));
  CHECK(cli::parse_point("-i") == Point(0.0, -1.0));
  CHECK(cli::parse_point("0.5") == Point(0.5, 0.0));
  CHECK_THROWS_AS(cli::parse_point("abc"), Error);
  CHECK_THROWS_AS(cli::parse_point("1+2j"), Error);
  CHECK(cli::parse_eval_grid("64x48") == std::pair{64, 48});
  CHECK_THROWS_AS(cli::parse_eval_grid("64"), Error);
  CHECK_THROWS_AS(cli::parse_eval_grid("0x4"), Error);
}

TEST_CASE("measure runs are reproducible") {
  const std::vector<std::string> args{"measure", "--domain", file("disc.json"), "--set", file("disc_arc.json"),
                                      "--eval-grid", "6x6", "--engine", "wos", "--samples", "200", "--json"};
  const Outcome a = call(args), b = call(args);
  REQUIRE(a.code == 0);
  json doc = json::parse(a.out), other = json::parse(b.out);
  REQUIRE(doc.contains("metadata"));
  doc.erase("metadata");
  other.erase("metadata");
  CHECK(doc.dump() == other.dump());
  CHECK(doc["command"] == "measure");
  CHECK(doc.contains("config_hash"));
  CHECK(doc["seed"] == kDefaultSeed);

  const Outcome csv = call({"measure", "--domain", file("disc.json"), "--set", file("disc_arc.json"), "--eval-grid",
                            "4x4", "--engine", "closed_form"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("# crossenv ", 0) == 0);
  CHECK(csv.out.find("x,y,value,stderr,engine") != std::string::npos);

  const fs::path out = workdir() / "m.csv";
  REQUIRE(call({"measure", "--domain", file("disc.json"), "--set", file("disc_arc.json"), "--eval-grid", "4x4",
                "--engine", "closed_form", "--out", out.string()})
              .code == 0);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == csv.out);
}

TEST_CASE("other subcommands succeed") {
  CHECK(call({"envelope", "--spec", file("half_arc_cross.json"), "--slice", "w=0.1i", "--eval-grid", "8x8",
              "--grid-spacing", "0.03125", "--json"})
            .code == 0);
  CHECK(call({"converge", "--domain", file("example1.json"), "--set", file("example1_slit_arc.json"), "--ks", "4,8",
              "--eval-grid", "4x4", "--grid-spacing", "0.0625", "--json"})
            .code == 0);
  CHECK(call({"glue", "--domain", file("disc.json"), "--set", file("disc_arc.json"), "--k", "10", "--grid-spacing",
              "0.03125", "--json"})
            .code == 0);
  const Outcome p = call({"propc", "--fixture", "disc", "--grid", "61", "--json"});
  CHECK(p.code == 0);
  CHECK(json::parse(p.out)["result"].contains("N"));
}

TEST_CASE("exit codes") {
  SUBCASE("configuration errors") {
    CHECK(call({"measure", "--domain", file("disc.json")}).code == cli::config);
    CHECK(call({"measure", "--domain", file("disc.json"), "--set", file("disc_arc.json"), "--engine", "fem"}).code ==
          cli::config);
    CHECK(call({"separator", "--spec", file("half_arc_cross.json"), "--z", "5", "--w", "0"}).code == cli::config);
    CHECK(call({"nonsense"}).code == cli::config);
  }
  SUBCASE("numerical failure") {
    const Outcome o = call({"measure", "--domain", file("example1.json"), "--set", file("example1_slit_arc.json"),
                            "--engine", "grid", "--grid-spacing", "0.3"});
    CHECK(o.code == cli::numerical);
    CHECK_FALSE(o.err.empty());
  }
  SUBCASE("no witness") {
    const Outcome o = call({"separator", "--spec", file("example2.json"), "--z", "0.1", "--w", "0.3i", "--k-max",
                            "8", "--grid-spacing", "0.03125", "--json"});
    CHECK(o.code == cli::no_witness);
    const json doc = json::parse(o.out);
    CHECK(doc["result"]["error"] == "NoWitness");
  }
  SUBCASE("help and version") {
    CHECK(call({"--help"}).code == cli::ok);
    CHECK(call({"--version"}).code == cli::ok);
  }
}

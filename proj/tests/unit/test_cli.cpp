#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/app.hpp"
#include "cli/digest.hpp"
#include "vetk/io.hpp"

namespace fs = std::filesystem;
using vetk::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vetk_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("sha256") {
    CHECK(vetk::cli::sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("grid parsing") {
    CHECK(vetk::cli::parse_grid("0:1:5") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    CHECK(vetk::cli::parse_grid("0.1,0.2") == std::vector<double>{0.1, 0.2});
    CHECK_THROWS(vetk::cli::parse_grid("0:1"));
    CHECK_THROWS(vetk::cli::parse_grid("a,b"));
  }

  TEST_CASE("estimands preset") {
    const auto r = call({"estimands", "--preset", "discussion"});
    CHECK(r.code == 0);
    CHECK(r.out.find("CI 87.7 | IR 88.0 | Cox 88.0 | CH 88.0 | odds 88.4 | IR bounds [87.6, 88.5]") != std::string::npos);
    const auto z = call({"estimands", "--preset", "null"});
    CHECK(z.out.find("CI 0.0 | IR 0.0 | Cox 0.0 | CH 0.0 | odds 0.0") != std::string::npos);
    const auto r3 = call({"estimands", "--preset", "rampup:3", "--at", "50"});
    CHECK(r3.code == 0);
    CHECK(r3.out.find("CH -") != std::string::npos);
  }

  TEST_CASE("scenario files") {
    const fs::path dir = scratch("scenario");
    fs::create_directories(dir);
    {
      std::ofstream(dir / "null.json") << R"({"f0":{"kind":"exponential","rate":0.001},
        "f1":{"kind":"exponential","rate":0.001},"tau":100,"label":"null"})";
      std::ofstream(dir / "bad.json") << "{\n  \"f0\": {\"kind\": \"exponential\",\n  \"rate\" 1}\n}";
      std::ofstream(dir / "extra.json") << R"({"f0":{"kind":"exponential","rate":0.001},
        "f1":{"kind":"exponential","rate":0.001},"tau":100,"colour":"red"})";
    }
    const auto ok = call({"estimands", "--scenario", (dir / "null.json").string()});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("CI 0.0") != std::string::npos);
    const auto bad = call({"estimands", "--scenario", (dir / "bad.json").string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find(":3:") != std::string::npos);
    const auto extra = call({"estimands", "--scenario", (dir / "extra.json").string()});
    CHECK(extra.code == 2);
    CHECK(extra.err.find("colour") != std::string::npos);
  }

  TEST_CASE("exit codes") {
    CHECK(call({}).code == 2);
    CHECK(call({"nonsense"}).code == 2);
    CHECK(call({"simulate", "--config", "/definitely/missing.json"}).code == 2);
    CHECK(call({"estimands", "--preset", "nope"}).code == 2);
    CHECK(call({"estimands", "--at", "500"}).code == 2);
    const auto e = call({"curve", "--kinds", ""});
    CHECK(e.code == 2);
    CHECK(e.err.find("no estimands requested") != std::string::npos);
    CHECK(call({"--help"}).code == 0);
    // more events requested than subjects
    CHECK(call({"simulate", "--preset", "event_driven", "--n", "10"}).code == 1);
  }

  TEST_CASE("CSV outputs carry a schema line") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"curve", "--preset", "figure3:a", "--grid", "0.5,1"},
             {"peakdiff", "--f0", "0.5"},
             {"table-discrete", "--k", "1"},
             {"frailty", "--family", "stable", "--grid", "0"},
             {"sweep", "--n", "500", "--replicates", "3"}}) {
      const auto r = call(args);
      CAPTURE(args[0]);
      CHECK(r.code == 0);
      CHECK(r.out.rfind("# schema: vetk.", 0) == 0);
    }
  }

  TEST_CASE("panel a curve columns agree") {
    const auto r = call({"curve", "--preset", "figure3:a", "--grid", "1", "--kinds", "ch,cox,ir"});
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "t,ve_ch,ve_cox,ve_ir");
    std::getline(in, line);
    double t, a, b, c;
    char sep;
    std::istringstream row(line);
    row >> t >> sep >> a >> sep >> b >> sep >> c;
    CHECK(a == doctest::Approx(b).epsilon(1e-8));
    CHECK(a == doctest::Approx(c).epsilon(1e-8));
  }

  TEST_CASE("seed override and manifests") {
    const fs::path a = scratch("seed_a"), b = scratch("seed_b"), c = scratch("seed_c");
    REQUIRE(call({"simulate", "--n", "2000", "--seed", "5", "--out", a.string()}).code == 0);
    ::setenv("VE_SEED", "5", 1);
    REQUIRE(call({"simulate", "--n", "2000", "--seed", "6", "--out", b.string()}).code == 0);
    ::unsetenv("VE_SEED");
    REQUIRE(call({"simulate", "--n", "2000", "--seed", "6", "--out", c.string()}).code == 0);
    CHECK(slurp(a / "trial.csv") == slurp(b / "trial.csv"));
    CHECK(slurp(a / "trial.csv") != slurp(c / "trial.csv"));
    const auto m = vetk::io::read_json_file(a / "manifest.json");
    CHECK(m["seed"] == 5);
    CHECK(m["subcommand"] == "simulate");
    CHECK(m["outputs"].size() == 3);
    for (const auto& o : m["outputs"]) {
      CHECK(o["sha256"] == vetk::cli::sha256_hex(slurp(a / o["path"].get<std::string>())));
    }
    CHECK(slurp(a / "trial.csv").rfind(vetk::io::kTrialCsvSchema, 0) == 0);
  }

  TEST_CASE("replay detects tampering") {
    const fs::path a = scratch("tamper_a"), b = scratch("tamper_b");
    REQUIRE(call({"table-discrete", "--out", a.string()}).code == 0);
    CHECK(call({"replay", (a / "manifest.json").string(), "--out", b.string()}).code == 0);
    auto m = vetk::io::read_json_file(a / "manifest.json");
    m["outputs"][0]["sha256"] = std::string(64, '0');
    std::ofstream(a / "manifest.json") << m.dump(2);
    CHECK(call({"replay", (a / "manifest.json").string(), "--out", b.string()}).code == 1);
  }
}

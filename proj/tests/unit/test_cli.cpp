#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "serialize.hpp"

using namespace radonbl;
using namespace radonbl::tools;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "radonbl_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string without_generated(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("generated") == std::string::npos) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("poly vandermonde prints 12") {
  const Run r = run({"poly", "vandermonde", "--n", "3", "--t", "0,1,2"});
  CHECK(r.code == 0);
  CHECK(r.out == "12\n");
}

TEST_CASE("bl compute writes a JSON artifact") {
  const fs::path out = scratch("lw3.json");
  const Run r = run({"bl", "compute", "--datum", "loomis-whitney-3d", "--out", out.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("value 1 ") != std::string::npos);
  const Json doc = read_json(out.string());
  CHECK(doc["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(doc["exponent"] == "1/2");
  CHECK(doc.contains("generated"));
}

TEST_CASE("usage errors exit 1") {
  Run r = run({"poly", "vandermonde", "--bogus"});
  CHECK(r.code == 1);
  CHECK_FALSE(r.err.empty());
  r = run({"bl", "compute", "--datum", "nope"});
  CHECK(r.code == 1);
  CHECK(r.err.find("unknown datum") != std::string::npos);
  r = run({"radon", "knapp", "--model", "parabola", "--samples", "10"});
  CHECK(r.code == 1);
  r = run({"radon", "knapp", "--model", "quadratic"});
  CHECK(r.code == 1);
  r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("regress") != std::string::npos);
}

TEST_CASE("named data") {
  for (const std::string& name : named_data()) {
    const EqualExpDatum d = named_datum(name);
    CHECK_NOTHROW(validate(d));
  }
  CHECK(named_operator("moment-curve-n3").n == 3);
  CHECK_THROWS_AS(named_operator("loomis-whitney-2d"), InputError);
}

TEST_CASE("regress: identical, perturbed, infinite tolerance, schema mismatch") {
  const fs::path a = scratch("a.csv"), b = scratch("b.csv"), c = scratch("c.csv");
  write_csv(a.string(), "t", {"delta", "ratio"}, {{0.5, 1.0}, {0.25, 2.0}});
  write_csv(b.string(), "t", {"delta", "ratio"}, {{0.5, 1.0}, {0.25, 2.5}});
  write_csv(c.string(), "t", {"delta", "other"}, {{0.5, 1.0}, {0.25, 2.0}});
  CHECK(run({"regress", a.string(), a.string()}).code == 0);
  const Run diff = run({"regress", a.string(), b.string(), "--rtol", "1e-6"});
  CHECK(diff.code == 2);
  CHECK(diff.err.find("ratio") != std::string::npos);
  CHECK(run({"regress", a.string(), b.string(), "--rtol", "inf"}).code == 0);
  CHECK(run({"regress", a.string(), c.string(), "--rtol", "inf"}).code == 2);

  const fs::path ja = scratch("a.json"), jb = scratch("b.json");
  write_json(ja.string(), Json{{"value", 1.0}, {"name", "x"}});
  write_json(jb.string(), Json{{"value", 1.0 + 1e-3}, {"name", "x"}});
  CHECK(run({"regress", ja.string(), ja.string()}).code == 0);
  CHECK(run({"regress", ja.string(), jb.string()}).code == 2);
  CHECK(run({"regress", ja.string(), jb.string(), "--rtol", "1e-2"}).code == 0);
  CHECK(run({"regress", ja.string(), scratch("missing.json").string()}).code == 1);
}

TEST_CASE("manifests") {
  const fs::path out = scratch("manifest_out.json");
  const Json manifest{{"command", "poly"},
                      {"parameters", {{"subcommand", "vandermonde"}, {"n", 3}, {"t", {0, 1, 2}}}},
                      {"seed", 5},
                      {"output_path", out.string()}};
  const std::vector<std::string> args = manifest_to_args(manifest);
  CHECK(args.front() == "poly");
  const fs::path path = scratch("manifest.json");
  write_json(path.string(), manifest);
  const Run r = run({"run", path.string()});
  INFO(r.err);
  CHECK(r.code == 0);
  CHECK(read_json(out.string())["abs_phi"].get<double>() == doctest::Approx(12.0));

  CHECK_THROWS_AS(manifest_to_args(Json{{"command", "poly"}, {"extra", 1}}), InputError);
  CHECK_THROWS_AS(manifest_to_args(Json{{"command", "paint"}, {"parameters", {{"subcommand", "x"}}}}), InputError);
  CHECK_THROWS_AS(manifest_to_args(Json{{"command", "poly"}, {"parameters", Json::object()}}), InputError);
  const fs::path bad = scratch("bad_manifest.json");
  write_json(bad.string(), Json{{"command", "poly"}, {"bogus", true}});
  CHECK(run({"run", bad.string()}).code == 1);
}

TEST_CASE("repeated runs give identical artifacts") {
  const std::vector<std::vector<std::string>> commands{
      {"radon", "knapp", "--model", "parabola", "--samples", "2000", "--samples-t", "16", "--deltas", "3", "--seed", "3"},
      {"nonconc", "convprop", "--points", "60", "--dim", "3", "--seed", "8"},
      {"ift", "solve", "--model", "quadratic", "--n", "3", "--k", "2", "--lambda", "1,2"},
      {"poly", "contraction", "--max-size", "4", "--seed", "1"}};
  int idx = 0;
  for (const auto& cmd : commands) {
    const std::string ext = cmd[0] == "radon" || cmd[1] == "contraction" ? ".csv" : ".json";
    const fs::path a = scratch("det_a" + std::to_string(idx) + ext), b = scratch("det_b" + std::to_string(idx) + ext);
    ++idx;
    std::vector<std::string> ca = cmd, cb = cmd;
    ca.insert(ca.end(), {"--out", a.string()});
    cb.insert(cb.end(), {"--out", b.string()});
    REQUIRE(run(ca).code == 0);
    REQUIRE(run(cb).code == 0);
    CHECK(without_generated(slurp(a)) == without_generated(slurp(b)));
    CHECK(run({"regress", a.string(), b.string(), "--rtol", "0"}).code == 0);
  }
}

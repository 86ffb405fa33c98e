#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "modcomp/io.hpp"

using namespace modcomp;
using io::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / "modcomp_test_cli";
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return file(name);
  }
};

}  // namespace

TEST_CASE("no arguments and bad arguments exit 1") {
  CHECK(call({}).code == cli::kExitInput);
  CHECK(call({"bogus"}).code == cli::kExitInput);
  CHECK(call({"posterior", "--model", "1"}).code == cli::kExitInput);
  CHECK(call({"--help"}).code == cli::kExitOk);
}

TEST_CASE("posterior on a single observation") {
  TempDir tmp;
  const auto data = tmp.write("d.csv", "y,x1,x2\n2,1.5,0.3\n");
  const auto r = call({"posterior", "--data", data, "--model", "1", "--gamma", "0.001"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  const double fit = (1.0 + 0.5 * 4.0 * 0.001 / (2.25 + 0.001)) / 1.5;
  CHECK(j["model_fit"].get<double>() == doctest::Approx(fit).epsilon(1e-12));
  CHECK(j["total"].get<double>() == doctest::Approx(fit * (1.0 + 1.0 / 2.251)).epsilon(1e-12));

  const auto known = call({"posterior", "--data", data, "--model", "{1,2}", "--known-sigma-sq", "2"});
  REQUIRE(known.code == 0);
  CHECK(json::parse(known.out)["model_fit"] == 2.0);
}

TEST_CASE("posterior error codes") {
  TempDir tmp;
  const auto data = tmp.write("d.csv", "y,x1,x2\n2,1.5,0.3\n");
  auto r = call({"posterior", "--data", data, "--model", "1,2", "--gamma", "0"});
  CHECK(r.code == cli::kExitNumeric);
  CHECK(r.err.find("singular design") != std::string::npos);
  r = call({"posterior", "--data", data, "--model", "1", "--a0", "0.5"});
  CHECK(r.code == cli::kExitInput);
  r = call({"posterior", "--data", data, "--model", "3"});
  CHECK(r.code == cli::kExitInput);
  const auto bad = tmp.write("bad.csv", "y,x1\n1,zz\n");
  CHECK(call({"posterior", "--data", bad, "--model", "1"}).code == cli::kExitInput);
}

TEST_CASE("exante") {
  auto r = call({"exante", "--size", "1", "--n", "10", "--gamma", "1e-9"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["value"].get<double>() == doctest::Approx(1.125));
  CHECK(call({"exante", "--size", "1", "--n", "2"}).code == cli::kExitInput);
}

TEST_CASE("sample, compete and asymptotics") {
  TempDir tmp;
  const auto data = tmp.file("s.csv");
  REQUIRE(call({"sample", "--k", "3", "--relevant", "1,2", "--n", "25", "--seed", "4", "--out", data,
                "--dgp-out", tmp.file("dgp.json")})
              .code == 0);
  CHECK(io::load_dataset(data).n() == 25);
  CHECK(io::load_json(tmp.file("dgp.json"))["beta0"][2] == 0.0);

  const auto roster = tmp.write("r.json", R"({"all_subsets": true})");
  auto r = call({"compete", "--data", data, "--roster", roster, "--lump-sum", "50"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["agents"].size() == 7);
  CHECK(j["auction"]["winner_index"] == j["winner_index"]);

  r = call({"asymptotics", "--data", data, "--roster", roster, "--ktk-sign", "flipped"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["rows"].size() == 7);
  CHECK(j["rows"][0]["aic"].is_number());
  CHECK(call({"asymptotics", "--data", data, "--roster", roster, "--ktk-sign", "x"}).code == cli::kExitInput);
}

TEST_CASE("simulate writes the table and a summary") {
  TempDir tmp;
  const auto config = tmp.write("c.json", R"({"k": 3, "relevant": [1, 2], "n_values": [1, 4], "reps": 20})");
  const auto out = tmp.file("t.json");
  auto r = call({"simulate", "--config", config, "--out", out, "--format", "json", "--threads", "1"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(out));
  const auto summary = json::parse(r.out);
  CHECK(summary["summary"].size() == 2);
  CHECK(r.err.find("n=4") != std::string::npos);

  const auto again = call({"simulate", "--config", config, "--out", tmp.file("t2.json"), "--format", "json",
                           "--threads", "2"});
  CHECK(io::load_json(out) == io::load_json(tmp.file("t2.json")));

  const auto unknown = tmp.write("u.json", R"({"n_values": [1], "colour": 1})");
  r = call({"simulate", "--config", unknown, "--out", out});
  CHECK(r.code == cli::kExitInput);
  CHECK(r.err.find("colour") != std::string::npos);
}

TEST_CASE("oracle subcommands") {
  TempDir tmp;
  const auto data = tmp.write("d.csv", "y,x1\n1.0,0.5\n-0.4,1.2\n2.2,-0.7\n");
  auto r = call({"oracle", "quadrature", "--data", data, "--model", "1", "--gamma", "0.01"});
  REQUIRE(r.code == 0);
  auto exact = call({"posterior", "--data", data, "--model", "1", "--gamma", "0.01"});
  CHECK(json::parse(r.out)["value"].get<double>() ==
        doctest::Approx(json::parse(exact.out)["model_fit"].get<double>()).epsilon(1e-3));

  r = call({"oracle", "mc", "--size", "1", "--n", "10", "--reps", "2000", "--a0", "3", "--b0", "2"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["reps"] == 2000);
}

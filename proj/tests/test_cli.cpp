#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fkm/cli.hpp"
#include "fkm/error.hpp"
#include "json.hpp"

using namespace fkm;

namespace {

struct Result {
  int status = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = run(args, out, err);
  return {status, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "fkm_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("metric prints a single value") {
  const auto r = invoke({"metric", "--system", "rotation:0.5", "--x", "0", "--y", "0.25", "--n", "2", "--kind", "weakmean"});
  CHECK(r.status == 0);
  CHECK(r.out == "0.25\n");

  const auto fk = invoke({"metric", "--system", "full_shift:2", "--x", "01...", "--y", "10...", "--n", "4", "--exact"});
  CHECK(fk.out == "0.25\n");
  const auto cross = invoke({"metric", "--system", R"({"kind":"two_component","a":{"kind":"rotation","alpha":0},"b":{"kind":"rotation","alpha":0}})",
                             "--x", "0:0.1", "--y", "1:0.1", "--n", "3", "--kind", "bowen"});
  CHECK(cross.out == "1\n");
}

TEST_CASE("verify exits cleanly when no property is violated") {
  const auto r = invoke({"verify", "--suite", "lemma-chain", "--trials", "20", "--seed", "1"});
  CHECK(r.status == 0);
  const auto body = lines(r.out);
  REQUIRE(body.size() == 3);
  CHECK(body[1] == "suite,checks,violations");
  CHECK(body[2].ends_with(",0"));
}

TEST_CASE("span CSV schema and header") {
  const auto r = invoke({"span", "--system", "full_shift:2", "--N", "50", "--n", "4..6", "--eps", "0.1,0.2", "--seed", "3"});
  REQUIRE(r.status == 0);
  const auto body = lines(r.out);
  REQUIRE(body.size() == 8);
  CHECK(body[0].starts_with("# fkm 0.1.0 seed=3 config={"));
  const auto config = nlohmann::json::parse(body[0].substr(body[0].find('{')));
  CHECK(config["command"] == "span");
  CHECK(config["N"] == 50);
  CHECK(body[1] == "metric,n,epsilon,count,exact");
  CHECK(body[2].starts_with("fk,4,0.1,"));
  CHECK(body[2].ends_with(",false"));
}

TEST_CASE("entropy and probe CSV schemas") {
  const auto katok = invoke({"entropy-katok", "--system", "full_shift:2", "--measure", "bernoulli:0.5,0.5", "--n", "4..8", "--eps", "0.1",
                             "--m", "300", "--seed", "7"});
  REQUIRE(katok.status == 0);
  auto body = lines(katok.out);
  CHECK(body[1] == "metric,n,epsilon_or_delta,count_or_mass,log_value,slope");
  CHECK(body.size() == 7);

  const auto bk = invoke({"entropy-brinkatok", "--system", "full_shift:2", "--n", "4,8", "--delta", "0.05", "--m", "300", "--base", "2"});
  REQUIRE(bk.status == 0);
  CHECK(lines(bk.out)[1] == "metric,n,epsilon_or_delta,count_or_mass,log_value,slope");

  const auto probe = invoke({"probe-ergodic", "--system", "doubling", "--n", "32", "--pairs", "20", "--m", "100"});
  REQUIRE(probe.status == 0);
  body = lines(probe.out);
  CHECK(body[1] == "n,pairs,q05,q25,median,q75,q95,verdict");
  CHECK(body[2].starts_with("32,20,"));

  const auto cx = invoke({"complexity", "--system", "rotation:0.25", "--n", "64,128", "--eps", "0.1", "--m", "100"});
  REQUIRE(cx.status == 0);
  CHECK(lines(cx.out)[2].ends_with(",weaker"));

  const auto crit = invoke({"criterion", "--system", "rotation:0.25", "--n", "16", "--eps", "0.2", "--m", "100"});
  REQUIRE(crit.status == 0);
  const auto j = nlohmann::json::parse(lines(crit.out)[1]);
  CHECK(j["pass"] == true);
}

TEST_CASE("identical invocations produce identical bytes") {
  const std::vector<std::string> args{"entropy-top", "--system", "full_shift:2", "--N", "200", "--n", "4..7", "--eps", "0.1", "--seed", "5"};
  CHECK(invoke(args).out == invoke(args).out);
}

TEST_CASE("output files are written whole and start with the header") {
  const auto path = scratch_dir() / "span.csv";
  std::filesystem::remove(path);
  const auto r = invoke({"span", "--system", "rotation:0.3", "--N", "20", "--n", "4", "--eps", "0.1", "--out", path.string()});
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  const auto text = slurp(path);
  CHECK(text.starts_with("# fkm 0.1.0 seed=1 config="));
  for (const auto& entry : std::filesystem::directory_iterator(scratch_dir())) {
    CHECK(entry.path().filename().string().find(".tmp.") == std::string::npos);
  }
}

TEST_CASE("config files supply defaults that flags override") {
  const auto path = scratch_dir() / "config.json";
  {
    std::ofstream f(path);
    f << R"({"system": "rotation:0.5", "x": "0", "y": "0.25", "n": 2, "kind": "bowen"})";
  }
  CHECK(invoke({"metric", "--config", path.string()}).out == "0.25\n");
  CHECK(invoke({"metric", "--config", path.string(), "--kind", "weakmean"}).out == "0.25\n");
  CHECK(invoke({"metric", "--config", path.string(), "--y", "0.5"}).out == "0.5\n");

  {
    std::ofstream f(path);
    f << R"({"system": "rotation:0.5", "pairs": 3})";
  }
  CHECK(invoke({"metric", "--config", path.string()}).status == 1);
}

TEST_CASE("exit codes") {
  const auto unknown = invoke({"bogus"});
  CHECK(unknown.status == 1);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(invoke({}).status == 1);
  CHECK(invoke({"span", "--system", "full_shift:2", "--n", "4", "--eps", "2"}).status == 1);
  CHECK(invoke({"span", "--system", "full_shift:1", "--n", "4", "--eps", "0.1"}).status == 1);
  CHECK(invoke({"span", "--system", "full_shift:2", "--n", "400", "--eps", "0.1"}).status == 1);
  CHECK(invoke({"metric", "--system", "doubling", "--x", "1.5", "--y", "0", "--n", "2"}).status == 1);
  CHECK(invoke({"metric", "--system", "doubling", "--x", "0", "--y", "0", "--n", "2", "--tol", "0"}).status == 1);
  CHECK(invoke({"verify", "--suite", "nope"}).status == 1);
  CHECK(invoke({"metric", "--config", "/nonexistent/config.json"}).status == 2);
  const auto io = invoke({"span", "--system", "rotation:0.3", "--n", "4", "--eps", "0.1", "--out", "/nonexistent/dir/x.csv"});
  CHECK(io.status == 2);
  CHECK(invoke({"--help"}).status == 0);
}

TEST_CASE("length and number lists") {
  CHECK(parse_lengths("4..7") == std::vector<std::size_t>{4, 5, 6, 7});
  CHECK(parse_lengths("4..16:4") == std::vector<std::size_t>{4, 8, 12, 16});
  CHECK(parse_lengths("3,9") == std::vector<std::size_t>{3, 9});
  CHECK_THROWS_AS(parse_lengths("9..4"), ConfigError);
  CHECK_THROWS_AS(parse_lengths("x"), ConfigError);
  CHECK(parse_reals("0.1,1/4") == std::vector<double>{0.1, 0.25});
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0) == "1");
}

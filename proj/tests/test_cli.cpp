#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctk/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ctk_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "toolkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ctk::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("family verify succeeds for beta = 1") {
  const auto dir = scratch("verify");
  const auto r = run({"family", "verify", "--beta", "1", "--max-n", "6", "-o", dir.string()});
  CHECK(r.code == ctk::cli::kExitOk);
  const auto doc = json::parse(slurp(dir / "verify.json"));
  CHECK(doc["all_verified"] == true);
  int supertelescope = 0;
  for (const auto& id : doc["identities"]) {
    CHECK(id["verdict"] == true);
    if (id["identity"].get<std::string>().find("supertelescop") != std::string::npos) ++supertelescope;
  }
  CHECK(supertelescope >= 6);
  CHECK(doc["errata"].size() >= 3);
}

TEST_CASE("family fm prints the exact polynomial") {
  const auto dir = scratch("fm");
  const auto r = run({"family", "fm", "--m", "3", "-o", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("1 - 3/2 z + 3/5 z^2 - 1/10 z^3") != std::string::npos);
  const auto doc = json::parse(slurp(dir / "fm.json"));
  CHECK(doc["coefficients"][3] == "-1/10");
}

TEST_CASE("toda analyze reports exact exponents") {
  const auto dir = scratch("analyze");
  const auto r = run({"toda", "analyze", "--cartan", "[[2,-3],[-3,2]]", "-o", dir.string()});
  CHECK(r.code == 0);
  const auto text = slurp(dir / "analysis.json");
  CHECK(text.find("(1+i*sqrt(39))/2") != std::string::npos);
  CHECK(text.find("(1-i*sqrt(39))/2") != std::string::npos);
  CHECK(r.out.find("(1+i*sqrt(39))/2") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(run({}).code == ctk::cli::kExitUsage);
  CHECK(run({"bogus"}).code == ctk::cli::kExitUsage);
  CHECK(run({"family", "verify", "--beta", "1", "--max-n", "11", "-o", scratch("u1").string()}).code == 1);
  CHECK(run({"family", "verify", "--beta", "-1", "-o", scratch("u2").string()}).code == 1);
  CHECK(run({"toda", "integrate", "--cartan", "[[2,1],[1,2]]", "--x0", "a=0;0,b=1;1", "--path", "0->1", "-o",
             scratch("u3").string()})
            .code == 1);
  CHECK(run({"toda", "integrate", "--cartan", "[[2]]", "--x0", "a=0", "--path", "0->1", "-o", scratch("u4").string()})
            .code == 1);
}

TEST_CASE("verification failures exit with 2") {
  // Every rank-1 solution with these seeds has a pole before t = 20.
  const auto dir = scratch("oracle_fail");
  const auto r = run({"toda", "oracle-compare", "--rank", "1", "--t", "20", "--seeds", "3", "-o", dir.string()});
  CHECK(r.code == ctk::cli::kExitVerification);
  CHECK(r.err.find("verification failed") != std::string::npos);
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("oracle compare passes for A2") {
  const auto dir = scratch("oracle");
  const auto r = run({"toda", "oracle-compare", "--rank", "2", "-o", dir.string()});
  CHECK(r.code == 0);
  const auto doc = json::parse(slurp(dir / "oracle_compare.json"));
  CHECK(doc["runs"].size() == 20);
  CHECK(doc["max_abs_diff"].get<double>() <= 1e-6);
}

TEST_CASE("outputs are deterministic and listed in the manifest") {
  const std::vector<std::vector<std::string>> commands = {
      {"family", "verify", "--beta", "1/2", "--max-n", "4"},
      {"rsf", "converge", "--beta", "1", "--levels", "10,20,40", "--max-n", "3", "--exact"},
      {"verblunsky", "inverse", "--alpha", "0.5,0.2+0.1i", "--grid", "256", "--moments", "4"},
      {"verblunsky", "forward", "--beta", "1", "--N", "6"},
      {"toda", "integrate", "--cartan", "[[2,-1],[-1,2]]", "--x0", "a=0;0.5,b=1;1", "--path", "0->0.5+0.5i"},
      {"toda", "analyze", "--cartan", "[[2]]", "--x0", "a=0,b=1", "--region", "1,-1,2,1", "--grid", "4"},
  };
  int k = 0;
  for (const auto& cmd : commands) {
    std::vector<std::string> files;
    std::vector<std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = scratch("det" + std::to_string(k) + "_" + std::to_string(rep));
      auto args = cmd;
      args.push_back("-o");
      args.push_back(dir.string());
      const auto r = run(args);
      REQUIRE(r.code == 0);
      const auto manifest = json::parse(slurp(dir / "manifest.json"));
      CHECK(manifest["exit_code"] == 0);
      CHECK(manifest.contains("version"));
      std::vector<std::string> listed = manifest["outputs"].get<std::vector<std::string>>();
      std::vector<std::string> present;
      for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename() != "manifest.json") present.push_back(e.path().filename().string());
      std::sort(listed.begin(), listed.end());
      std::sort(present.begin(), present.end());
      CHECK(listed == present);
      CHECK(std::adjacent_find(listed.begin(), listed.end()) == listed.end());
      std::vector<std::string> contents;
      for (const auto& f : listed) contents.push_back(slurp(dir / f));
      if (rep == 0)
        first = contents;
      else
        CHECK(contents == first);
    }
    ++k;
  }
}

TEST_CASE("JSON formatting") {
  CHECK(ctk::cli::dump_json(json{{"b", 0.1}, {"a", 1}}) == "{\n  \"a\": 1,\n  \"b\": 0.10000000000000001\n}");
  const auto s = ctk::cli::parse_state("a=0;0.5i,b=1;1");
  REQUIRE(s.a.size() == 2);
  CHECK(s.a[1] == ctk::Complex(0.0, 0.5));
  CHECK_THROWS(ctk::cli::parse_state("a=0,c=1"));
}

TEST_CASE("worker count honours TOOLKIT_THREADS") {
  setenv("TOOLKIT_THREADS", "1", 1);
  CHECK(ctk::cli::worker_count() == 1);
  unsetenv("TOOLKIT_THREADS");
  CHECK(ctk::cli::worker_count() >= 1);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eigmdp/cli.hpp"

using namespace eigmdp;
using nlohmann::json;

namespace {

std::filesystem::path output_root() {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? std::filesystem::path(env) : std::filesystem::temp_directory_path() / "eigmdp-cli-test";
}

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.status = run_command(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

json load(const std::filesystem::path& path) {
  std::ifstream file(path);
  REQUIRE(file.good());
  return json::parse(file);
}

std::vector<std::string> with_output(std::vector<std::string> args, const std::string& sub) {
  args.push_back("--output-dir");
  args.push_back((output_root() / sub).string());
  return args;
}

}  // namespace

TEST_CASE("kernel-dist writes a versioned record") {
  const auto r = run(with_output({"kernel-dist", "--n", "64", "--interval", "0,inf"}, "kernel"));
  REQUIRE(r.status == kExitOk);
  const auto record = load(output_root() / "kernel" / "kernel-dist.json");
  CHECK(record["schema"] == 1);
  CHECK(record["command"] == "kernel-dist");
  CHECK(record["parameters"]["interval"] == json::array({0.0, "inf"}));
  CHECK(record.contains("seed"));
  CHECK(record.contains("version"));
  CHECK(record.contains("wall_time"));
  CHECK(record.contains("uncertainty"));
  CHECK(record["payload"]["mean"].get<double>() == doctest::Approx(32.0).epsilon(1e-9));
  CHECK(record["payload"]["pmf"].size() == 65);
  std::ifstream csv(output_root() / "kernel" / "kernel-dist.csv");
  std::string first;
  std::getline(csv, first);
  CHECK(first.rfind("# columns:", 0) == 0);
}

TEST_CASE("exact variance scan reports the slope") {
  const auto r = run(with_output(
      {"variance-scan", "--kind", "gue", "--method", "exact", "--ns", "64,128,256,512", "--interval", "0,inf"},
      "scan"));
  REQUIRE(r.status == kExitOk);
  const auto record = load(output_root() / "scan" / "variance-scan.json");
  CHECK(record["payload"]["rows"].size() == 4);
  CHECK(record["payload"]["slope"].get<double>() == doctest::Approx(0.0517).epsilon(0.01));
  std::ifstream csv(output_root() / "scan" / "variance-scan.csv");
  std::string comment, header;
  std::getline(csv, comment);
  std::getline(csv, header);
  CHECK(header == "n,mean,variance");
}

TEST_CASE("rate-curve csv columns") {
  const auto r = run(with_output({"rate-curve", "--method", "exact", "--n", "32", "--xi", "-1,1"}, "rate"));
  REQUIRE(r.status == kExitOk);
  std::ifstream csv(output_root() / "rate" / "rate-curve.csv");
  std::string comment, header;
  std::getline(csv, comment);
  std::getline(csv, header);
  CHECK(header == "xi,empirical_rate,target_rate,ci_low,ci_high");
  CHECK(r.out.find("not reachable") != std::string::npos);
}

TEST_CASE("interlace-test verdicts") {
  const auto r = run(with_output({"interlace-test", "--n", "32", "--replicas", "500", "--seed", "7"}, "interlace"));
  REQUIRE(r.status == kExitOk);
  const auto record = load(output_root() / "interlace" / "interlace-test.json");
  CHECK(record["payload"]["counting_bound"]["violations"] == 0);
  CHECK(record["payload"]["median_ks"].contains("p_value"));
  CHECK(record["seed"] == 7);
}

TEST_CASE("identical flags and seed reproduce the payload") {
  const std::vector<std::string> args{"rate-curve", "--method", "mc", "--kind", "goe", "--n", "12",
                                      "--replicas", "300", "--xi", "-1,1"};
  REQUIRE(run(with_output(args, "repeat-a")).status == kExitOk);
  REQUIRE(run(with_output(args, "repeat-b")).status == kExitOk);
  const auto a = load(output_root() / "repeat-a" / "rate-curve.json");
  const auto b = load(output_root() / "repeat-b" / "rate-curve.json");
  CHECK(a["payload"] == b["payload"]);
  CHECK(a["uncertainty"] == b["uncertainty"]);
}

TEST_CASE("thread count does not change payloads") {
  const std::vector<std::vector<std::string>> commands{
      {"sample", "--kind", "wigner-hermitian", "--atom", "matched", "--n", "10", "--replicas", "20"},
      {"variance-scan", "--kind", "goe", "--method", "mc", "--ns", "8,16", "--replicas", "200"},
      {"eigstat", "--kind", "gue", "--n", "20", "--replicas", "100", "--indices", "5,10,15"},
      {"mp-scan", "--ns", "10,20", "--replicas", "100"},
      {"clt-compare", "--n", "16", "--replicas", "200"},
      {"interlace-test", "--n", "8", "--replicas", "200"}};
  for (const auto& base : commands) {
    auto one = base;
    one.insert(one.end(), {"--threads", "1"});
    auto eight = base;
    eight.insert(eight.end(), {"--threads", "8"});
    REQUIRE(run(with_output(one, "threads-1")).status == kExitOk);
    REQUIRE(run(with_output(eight, "threads-8")).status == kExitOk);
    const auto a = load(output_root() / "threads-1" / (base[0] + ".json"));
    const auto b = load(output_root() / "threads-8" / (base[0] + ".json"));
    CHECK_MESSAGE(a["payload"] == b["payload"], base[0]);
    CHECK(a["seed"] == b["seed"]);
  }
}

TEST_CASE("moments report") {
  const auto r = run(with_output({"moments", "--atom", "matched", "--variance", "1/2"}, "moments"));
  REQUIRE(r.status == kExitOk);
  const auto record = load(output_root() / "moments" / "moments.json");
  CHECK(record["payload"]["pass"] == true);
  CHECK(record["payload"]["moments"][3]["atom"] == "3/4");
}

TEST_CASE("exit codes") {
  CHECK(run({}).status == kExitParse);
  CHECK(run({"no-such-command"}).status == kExitParse);
  CHECK(run(with_output({"kernel-dist", "--bogus-flag", "1"}, "codes")).status == kExitParse);
  CHECK(run(with_output({"kernel-dist", "--interval", "1"}, "codes")).status == kExitParse);
  CHECK(run(with_output({"kernel-dist", "--interval", "2,1"}, "codes")).status == kExitParse);
  CHECK(run(with_output({"sample", "--kind", "nope"}, "codes")).status == kExitParse);
  CHECK(run(with_output({"variance-scan", "--kind", "goe", "--method", "exact"}, "codes")).status == kExitInvalid);
  CHECK(run(with_output({"eigstat", "--n", "20", "--indices", "20"}, "codes")).status == kExitInvalid);
  CHECK(run(with_output({"moments", "--variance", "x/y"}, "codes")).status == kExitParse);

  const auto blocker = output_root() / "blocker";
  std::filesystem::create_directories(output_root());
  std::ofstream(blocker) << "not a directory";
  CHECK(run({"kernel-dist", "--n", "4", "--output-dir", (blocker / "sub").string()}).status == kExitIo);
  CHECK(run({"--help"}).status == kExitOk);
}

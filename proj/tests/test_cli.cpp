#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "probeff/bench.hpp"
#include "probeff/cli.hpp"
#include "probeff/registry.hpp"

using namespace probeff;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string tmp_path(const std::string& name) {
  return std::string("/tmp/probeff_test_") + name;
}

int spawn_cli(const std::string& args) {
  const std::string cmd = std::string(PROBEFF_CLI_PATH) + " " + args +
                          " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("registry lists the model zoo with schemas") {
  const auto& reg = model_registry();
  for (const char* name :
       {"linregr", "coinflip", "hmm", "sir", "sir-rs", "sir-rsv", "lda"})
    CHECK(reg.count(name) == 1);

  const ModelEntry& sir = find_model("sir");
  CHECK(sir.default_env().has("beta"));
  CHECK(sir.default_env().has("xi"));
  const auto schema = sir.env_schema();
  REQUIRE(schema.size() == 4);
  CHECK(schema[0]["name"] == "beta");
  CHECK(schema[3]["kind"] == "int");
  CHECK(sir.default_input()["days"] == 100);

  CHECK_THROWS_AS(find_model("nonsense"), config_error);
}

TEST_CASE("runs are reproducible: identical bytes for identical configs") {
  for (const char* algo : {"simulate", "lw", "mh"}) {
    RunConfig config;
    config.model = "coinflip";
    config.algo = algo;
    config.iterations = 5;
    config.seed = 1;
    config.dump_traces = true;
    config.out_path = tmp_path(std::string("repro_a_") + algo);
    run(config);
    config.out_path = tmp_path(std::string("repro_b_") + algo);
    run(config);
    CHECK(slurp(tmp_path(std::string("repro_a_") + algo)) ==
          slurp(tmp_path(std::string("repro_b_") + algo)));
    CHECK(slurp(tmp_path(std::string("repro_a_") + algo) + ".traces.json") ==
          slurp(tmp_path(std::string("repro_b_") + algo) + ".traces.json"));
  }
}

TEST_CASE("lw csv has the documented column order") {
  RunConfig config;
  config.model = "linregr";
  config.algo = "lw";
  config.iterations = 3;
  config.seed = 7;
  config.format = "csv";
  config.input = json{{"xs", {0.0, 1.0, 2.0}}};
  config.env_inline = json::parse(R"([
    {"name":"mu","kind":"real","values":[]},
    {"name":"c","kind":"real","values":[]},
    {"name":"sigma","kind":"real","values":[]},
    {"name":"y","kind":"real","values":[0.0,3.0,6.0]}
  ])");
  config.out_path = tmp_path("lw.csv");
  run(config);
  const std::string csv = slurp(*config.out_path);
  CHECK(csv.rfind("iter,log_weight,mu,c,sigma\n", 0) == 0);
  // three data rows
  int rows = -1;
  for (char ch : csv)
    if (ch == '\n') ++rows;
  CHECK(rows == 3);
}

TEST_CASE("mh json output is histogram-ready per variable") {
  RunConfig config;
  config.model = "coinflip";
  config.algo = "mh";
  config.iterations = 40;
  config.seed = 3;
  config.env_inline = json::parse(R"([
    {"name":"p","kind":"real","values":[]},
    {"name":"y","kind":"bool","values":[true]}
  ])");
  config.out_path = tmp_path("mh.json");
  run(config);
  const auto out = json::parse(slurp(*config.out_path));
  CHECK(out["algo"] == "mh");
  REQUIRE(out["env_out"].is_array());
  bool found_p = false;
  for (const auto& entry : out["env_out"]) {
    if (entry["name"] == "p") {
      found_p = true;
      CHECK(entry["values"].size() == 40);  // one accepted/retained value per iteration
    }
    if (entry["name"] == "y") CHECK(entry["values"].empty());
  }
  CHECK(found_p);
}

TEST_CASE("manifest echoes the config and the consumption diagnostic") {
  RunConfig config;
  config.model = "sir";
  config.algo = "simulate";
  config.seed = 11;
  config.input = json{{"days", 4}};
  config.out_path = tmp_path("sir.json");
  run(config);
  const auto manifest = json::parse(slurp(*config.out_path + ".manifest.json"));
  CHECK(manifest["config"]["model"] == "sir");
  CHECK(manifest["config"]["seed"] == 11);
  CHECK(manifest["config"]["input"]["days"] == 4);
  REQUIRE(manifest["config"]["env"].is_array());
  REQUIRE(manifest["env_usage"].is_array());
  bool beta_row = false;
  for (const auto& row : manifest["env_usage"]) {
    if (row["name"] == "beta") {
      beta_row = true;
      CHECK(row["provided"] == 1);
      CHECK(row["consumed"] == 1);
      CHECK(row["defaulted_to_sample"] == 0);
    }
    if (row["name"] == "xi") CHECK(row["defaulted_to_sample"] == 4);
  }
  CHECK(beta_row);
}

TEST_CASE("trace dumps follow the documented shape") {
  RunConfig config;
  config.model = "coinflip";
  config.algo = "mh";
  config.iterations = 3;
  config.seed = 5;
  config.dump_traces = true;
  config.env_inline = json::parse(R"([
    {"name":"p","kind":"real","values":[]},
    {"name":"y","kind":"bool","values":[true]}
  ])");
  config.out_path = tmp_path("dump.json");
  run(config);
  const auto traces = json::parse(slurp(*config.out_path + ".traces.json"));
  REQUIRE(traces.size() == 3);
  const auto& rec = traces[1];
  CHECK(rec.contains("iteration"));
  CHECK(rec.contains("accepted"));
  CHECK(rec["proposal_addr"].contains("tag"));
  CHECK(rec["proposal_addr"].contains("occurrence"));
  REQUIRE(rec["strace"].is_array());
  CHECK(rec["strace"][0].contains("tag"));
  CHECK(rec["strace"][0].contains("occurrence"));
  CHECK(rec["strace"][0].contains("value"));
  REQUIRE(rec["lptrace"].is_array());
  CHECK(rec["lptrace"][0].contains("lp"));
}

TEST_CASE("config validation errors") {
  RunConfig config;
  config.model = "linregr";
  config.algo = "mh";
  config.iterations = 0;
  CHECK_THROWS_AS(run(config), config_error);
  config.iterations = 1;
  config.algo = "walk";
  CHECK_THROWS_AS(run(config), config_error);
  config.algo = "mh";
  config.format = "xml";
  CHECK_THROWS_AS(run(config), config_error);
  config.format = "json";
  config.model = "zebra";
  CHECK_THROWS_AS(run(config), config_error);
}

TEST_CASE("environment json errors name the offending field") {
  RunConfig config;
  config.model = "coinflip";
  config.algo = "simulate";
  config.env_inline = json::parse(R"([{"name":"p","kind":"real","values":[true]}])");
  try {
    run(config);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("p") != std::string::npos);
  }
}

TEST_CASE("cli binary maps error classes to exit codes") {
  CHECK(spawn_cli("simulate --model coinflip --seed 1") == 0);
  CHECK(spawn_cli("run --model coinflip --algo simulate") == 0);
  // 2: config errors
  CHECK(spawn_cli("simulate --model doesnotexist") == 2);
  CHECK(spawn_cli("mh --model coinflip --iterations 0") == 2);
  CHECK(spawn_cli("simulate --model coinflip --env /nonexistent.json") == 2);
  // 3: runtime model errors (nothing to infer: coinflip fully observed)
  const std::string env_path = tmp_path("full_env.json");
  {
    std::ofstream out(env_path);
    out << R"([{"name":"p","kind":"real","values":[0.5]},
               {"name":"y","kind":"bool","values":[true]}])";
  }
  CHECK(spawn_cli("mh --model coinflip --iterations 5 --env " + env_path) == 3);
}

TEST_CASE("bench produces a monotone, linear timing table") {
  BenchConfig config;
  config.models = {"linregr"};
  config.algos = {"simulate"};
  config.sizes = {50, 100, 150, 200, 250};
  config.out_path = tmp_path("bench.csv");
  run_bench(config);  // throws if growth is not monotone or the fit is poor
  const std::string csv = slurp(*config.out_path);
  CHECK(csv.rfind("model,algo,size,seconds\n", 0) == 0);
  int rows = -1;
  for (char ch : csv)
    if (ch == '\n') ++rows;
  CHECK(rows == 5);
}

TEST_CASE("models subcommand prints the registry") {
  const std::string cmd = std::string(PROBEFF_CLI_PATH) + " models > " +
                          tmp_path("models.json") + " 2>/dev/null";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  const auto listing = json::parse(slurp(tmp_path("models.json")));
  CHECK(listing.size() == model_registry().size());
  CHECK(listing[0].contains("name"));
  CHECK(listing[0].contains("input_schema"));
  CHECK(listing[0].contains("default_env"));
}

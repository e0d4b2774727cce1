#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "probeff/cli.hpp"
#include "probeff/errors.hpp"

namespace {

void add_run_options(CLI::App* cmd, probeff::RunConfig& config,
                     std::string& input_text, bool with_algo) {
  cmd->add_option("--model", config.model, "registered model name")->required();
  if (with_algo)
    cmd->add_option("--algo", config.algo, "simulate | lw | mh");
  cmd->add_option("--iterations", config.iterations, "iteration count (lw/mh)");
  cmd->add_option("--seed", config.seed, "64-bit master seed");
  cmd->add_option("--env", config.env_path, "environment JSON file");
  cmd->add_option("--input", input_text, "model inputs as inline JSON");
  cmd->add_option("--out", config.out_path, "output file (stdout if omitted)");
  cmd->add_option("--format", config.format, "csv | json");
  cmd->add_flag("--dump-traces", config.dump_traces,
                "also write per-iteration trace dumps");
}

void finish_config(probeff::RunConfig& config, const std::string& input_text) {
  if (input_text.empty()) return;
  try {
    config.input = nlohmann::json::parse(input_text);
  } catch (const nlohmann::json::exception& e) {
    throw probeff::config_error(std::string("malformed --input JSON: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probabilistic models as effect trees: simulate, lw, mh"};
  app.require_subcommand(1);

  probeff::RunConfig config;
  std::string input_text;
  bool bench_flag = false;

  CLI::App* simulate = app.add_subcommand("simulate", "run the model forward");
  CLI::App* lw = app.add_subcommand("lw", "likelihood weighting");
  CLI::App* mh = app.add_subcommand("mh", "Metropolis-Hastings");
  CLI::App* generic = app.add_subcommand("run", "run with --algo, or --bench");
  add_run_options(simulate, config, input_text, false);
  add_run_options(lw, config, input_text, false);
  add_run_options(mh, config, input_text, false);
  add_run_options(generic, config, input_text, true);
  generic->add_flag("--bench", bench_flag, "run the benchmark table instead");

  probeff::BenchConfig bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "timing table over sizes");
  bench_cmd->add_option("--models", bench.models, "models to time");
  bench_cmd->add_option("--algos", bench.algos, "algorithms to time");
  bench_cmd->add_option("--sizes", bench.sizes, "iteration counts");
  bench_cmd->add_option("--seed", bench.seed, "64-bit master seed");
  bench_cmd->add_option("--out", bench.out_path, "output file");
  bench_cmd->add_option("--format", bench.format, "csv | json");

  CLI::App* models = app.add_subcommand("models", "list registered models");

  CLI11_PARSE(app, argc, argv);

  try {
    if (models->parsed()) {
      probeff::print_models(std::cout);
      return 0;
    }
    if (bench_cmd->parsed()) {
      probeff::run_bench(bench);
      return 0;
    }
    if (generic->parsed() && bench_flag) {
      probeff::BenchConfig from_run;
      from_run.seed = config.seed;
      from_run.out_path = config.out_path;
      if (config.format == "json") from_run.format = "json";
      if (!config.model.empty()) from_run.models = {config.model};
      probeff::run_bench(from_run);
      return 0;
    }
    if (simulate->parsed()) config.algo = "simulate";
    if (lw->parsed()) config.algo = "lw";
    if (mh->parsed()) config.algo = "mh";
    finish_config(config, input_text);
    probeff::run(config);
    return 0;
  } catch (const probeff::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const probeff::model_error& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  } catch (const probeff::internal_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}

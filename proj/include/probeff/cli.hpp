#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace probeff {

// One CLI run, fully describing what to execute. A run is reproducible from
// its manifest, which echoes this structure.
struct RunConfig {
  std::string model;
  std::string algo = "simulate";  // simulate | lw | mh
  std::size_t iterations = 1;     // >= 1 for lw/mh
  std::uint64_t seed = 0;
  std::optional<std::string> env_path;        // --env FILE (JSON)
  std::optional<nlohmann::json> env_inline;   // parsed environment, wins over path
  std::optional<nlohmann::json> input;        // --input JSON
  std::optional<std::string> out_path;        // --out FILE; stdout when absent
  std::string format = "json";                // csv | json
  bool dump_traces = false;
};

// Executes the configured run, writing the result (and, with an output path,
// a manifest plus optional trace dump). Throws config_error / model_error /
// internal_error; the CLI maps those to exit codes 2 / 3 / 4.
void run(const RunConfig& config);

struct BenchConfig {
  std::vector<std::string> models = {"linregr", "hmm"};
  std::vector<std::string> algos = {"simulate", "lw", "mh"};
  std::vector<std::size_t> sizes;  // defaults chosen per algo when empty
  std::uint64_t seed = 0;
  std::optional<std::string> out_path;
  std::string format = "csv";
};

// Times models x algorithms over the sizes and writes the table. Fails (by
// throwing model_error) if growth is not monotone or, for simulate/lw, if
// the runtime-vs-iterations fit has R^2 < 0.95.
void run_bench(const BenchConfig& config);

// Prints the model registry (names, input schema, default environment).
void print_models(std::ostream& os);

}  // namespace probeff

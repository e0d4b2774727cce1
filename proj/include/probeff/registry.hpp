#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "probeff/inference.hpp"

namespace probeff {

struct SimulationOutput {
  nlohmann::ordered_json result;
  Env env_out;
  Env residual;
  STrace strace;
};

struct LwOutput {
  std::vector<LwSample> samples;
  Env residual;  // first iteration's residual environment
};

struct MhOutput {
  Env env_out;
  Env residual;
  std::vector<MhIterationRecord> records;
};

// A CLI-visible model: name, input schema (the --input JSON fields), default
// input, default environment, environment schema, plus type-erased entry
// points for the three execution algorithms.
class ModelEntry {
 public:
  virtual ~ModelEntry() = default;

  virtual const std::string& name() const = 0;
  virtual nlohmann::ordered_json input_schema() const = 0;
  virtual nlohmann::ordered_json default_input() const = 0;
  virtual Env default_env() const = 0;

  // [{name, kind}] in environment order.
  nlohmann::ordered_json env_schema() const;

  virtual SimulationOutput run_simulate(const nlohmann::json& input,
                                        const Env& env,
                                        std::uint64_t seed) const = 0;
  virtual LwOutput run_lw(std::size_t iterations, const nlohmann::json& input,
                          const Env& env, std::uint64_t seed) const = 0;
  virtual MhOutput run_mh(std::size_t iterations, const nlohmann::json& input,
                          const Env& env, std::uint64_t seed,
                          bool record) const = 0;
};

// All registered models, keyed by name.
const std::map<std::string, std::shared_ptr<const ModelEntry>>& model_registry();

const ModelEntry& find_model(const std::string& name);  // config_error if absent

}  // namespace probeff

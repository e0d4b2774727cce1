#include "probeff/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "probeff/bench.hpp"
#include "probeff/registry.hpp"

namespace probeff {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

Env load_env(const RunConfig& config, const ModelEntry& entry) {
  if (config.env_inline) return env_from_json(*config.env_inline);
  if (!config.env_path) return entry.default_env();
  std::ifstream in(*config.env_path);
  if (!in) throw config_error("cannot open environment file " + *config.env_path);
  json parsed;
  try {
    parsed = json::parse(in);
  } catch (const json::exception& e) {
    throw config_error("malformed environment JSON in " + *config.env_path +
                       ": " + e.what());
  }
  return env_from_json(parsed);
}

// JSON has no inf/nan literals; render them as strings.
ordered_json lp_json(double lp) {
  if (std::isfinite(lp)) return lp;
  if (std::isnan(lp)) return "nan";
  return lp > 0 ? "inf" : "-inf";
}

ordered_json strace_json(const STrace& trace) {
  ordered_json out = ordered_json::array();
  for (const auto& [addr, value] : trace)
    out.push_back({{"tag", addr.tag},
                   {"occurrence", addr.occurrence},
                   {"value", prim_to_json(value)}});
  return out;
}

ordered_json lptrace_json(const LPTrace& trace) {
  ordered_json out = ordered_json::array();
  for (const auto& [addr, lp] : trace)
    out.push_back({{"tag", addr.tag},
                   {"occurrence", addr.occurrence},
                   {"lp", lp_json(lp)}});
  return out;
}

ordered_json usage_json(const std::vector<EnvUsageRow>& rows) {
  ordered_json out = ordered_json::array();
  for (const auto& r : rows)
    out.push_back({{"name", r.name},
                   {"provided", r.provided},
                   {"consumed", r.consumed},
                   {"leftover", r.leftover},
                   {"defaulted_to_sample", r.sampled}});
  return out;
}

ordered_json config_json(const RunConfig& config, const Env& env) {
  ordered_json c{{"model", config.model},
                 {"algo", config.algo},
                 {"iterations", config.iterations},
                 {"seed", config.seed},
                 {"format", config.format},
                 {"dump_traces", config.dump_traces}};
  c["input"] = config.input ? ordered_json::parse(config.input->dump())
                            : ordered_json(nullptr);
  c["env"] = env_to_json(env);
  return c;
}

// Sampled variables: entries whose input list is empty. These become the
// value columns for lw/mh tabular output, in environment order.
std::vector<std::string> sampled_variables(const Env& env) {
  std::vector<std::string> names;
  for (const auto& e : env.entries())
    if (e.values.empty()) names.push_back(e.name);
  return names;
}

std::string csv_cell(const std::vector<PrimVal>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += prim_to_string(values[i]);
  }
  return out;
}

std::vector<PrimVal> trace_values_for(const STrace& trace, const std::string& tag) {
  std::vector<PrimVal> out;
  for (const auto& [addr, value] : trace)
    if (addr.tag == tag) out.push_back(value);
  return out;
}

void write_text(const std::optional<std::string>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  if (!out) throw config_error("cannot write output file " + *path);
  out << text;
}

void write_json_file(const std::string& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw config_error("cannot write output file " + path);
  out << j.dump(2) << "\n";
}

struct RunArtifacts {
  std::string result_text;
  ordered_json traces = ordered_json::array();
  std::vector<EnvUsageRow> usage;
};

RunArtifacts do_simulate(const RunConfig& config, const ModelEntry& entry,
                         const Env& env) {
  auto out = entry.run_simulate(config.input.value_or(json()), env, config.seed);
  RunArtifacts art;
  art.usage = env_usage_report(env, out.residual, out.strace);
  if (config.format == "json") {
    ordered_json j{{"model", config.model},
                   {"algo", "simulate"},
                   {"seed", config.seed},
                   {"result", out.result},
                   {"env_out", env_to_json(out.env_out)}};
    art.result_text = j.dump(2) + "\n";
  } else {
    std::string csv = "variable,index,value\n";
    for (const auto& e : out.env_out.entries())
      for (std::size_t i = 0; i < e.values.size(); ++i)
        csv += e.name + "," + std::to_string(i) + "," +
               prim_to_string(e.values[i]) + "\n";
    art.result_text = csv;
  }
  if (config.dump_traces)
    art.traces.push_back(
        {{"iteration", 0}, {"strace", strace_json(out.strace)}});
  return art;
}

RunArtifacts do_lw(const RunConfig& config, const ModelEntry& entry,
                   const Env& env) {
  auto out = entry.run_lw(config.iterations, config.input.value_or(json()), env,
                          config.seed);
  RunArtifacts art;
  if (!out.samples.empty()) {
    STrace empty;
    art.usage = env_usage_report(env, out.residual,
                                 out.samples.empty() ? empty : out.samples[0].strace);
  }
  const auto vars = sampled_variables(env);
  if (config.format == "json") {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      ordered_json row{{"iter", i}, {"log_weight", lp_json(out.samples[i].log_weight)}};
      for (const auto& v : vars) {
        const auto& values = out.samples[i].env_out.get(v);
        if (values.size() == 1)
          row[v] = prim_to_json(values[0]);
        else {
          ordered_json arr = ordered_json::array();
          for (const auto& x : values) arr.push_back(prim_to_json(x));
          row[v] = arr;
        }
      }
      rows.push_back(std::move(row));
    }
    ordered_json j{{"model", config.model},
                   {"algo", "lw"},
                   {"seed", config.seed},
                   {"iterations", config.iterations},
                   {"samples", rows}};
    art.result_text = j.dump(2) + "\n";
  } else {
    std::string csv = "iter,log_weight";
    for (const auto& v : vars) csv += "," + v;
    csv += "\n";
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      csv += std::to_string(i) + "," + real_to_string(out.samples[i].log_weight);
      for (const auto& v : vars)
        csv += "," + csv_cell(out.samples[i].env_out.get(v));
      csv += "\n";
    }
    art.result_text = csv;
  }
  if (config.dump_traces) {
    for (std::size_t i = 0; i < out.samples.size(); ++i)
      art.traces.push_back({{"iteration", i},
                            {"strace", strace_json(out.samples[i].strace)},
                            {"log_weight", lp_json(out.samples[i].log_weight)}});
  }
  return art;
}

RunArtifacts do_mh(const RunConfig& config, const ModelEntry& entry,
                   const Env& env) {
  const bool need_records = config.dump_traces || config.format == "csv";
  auto out = entry.run_mh(config.iterations, config.input.value_or(json()), env,
                          config.seed, need_records);
  RunArtifacts art;
  art.usage = env_usage_report(
      env, out.residual,
      out.records.empty() ? STrace{} : out.records.front().strace);
  const auto vars = sampled_variables(env);
  if (config.format == "json") {
    ordered_json j{{"model", config.model},
                   {"algo", "mh"},
                   {"seed", config.seed},
                   {"iterations", config.iterations},
                   {"env_out", env_to_json(out.env_out)}};
    art.result_text = j.dump(2) + "\n";
  } else {
    // Per-iteration rows need the post-decision traces; replay the records.
    std::string csv = "iter";
    for (const auto& v : vars) csv += "," + v;
    csv += "\n";
    STrace current;
    for (const auto& rec : out.records) {
      if (rec.accepted) current = rec.strace;
      csv += std::to_string(rec.iteration);
      for (const auto& v : vars)
        csv += "," + csv_cell(trace_values_for(current, v));
      csv += "\n";
    }
    art.result_text = csv;
  }
  if (config.dump_traces) {
    for (const auto& rec : out.records)
      art.traces.push_back({{"iteration", rec.iteration},
                            {"accepted", rec.accepted},
                            {"restart", rec.restart},
                            {"proposal_addr",
                             {{"tag", rec.proposal.tag},
                              {"occurrence", rec.proposal.occurrence}}},
                            {"strace", strace_json(rec.strace)},
                            {"lptrace", lptrace_json(rec.lptrace)}});
  }
  return art;
}

}  // namespace

void run(const RunConfig& config) {
  if (config.format != "json" && config.format != "csv")
    throw config_error("unknown format '" + config.format + "' (csv|json)");
  if (config.algo != "simulate" && config.algo != "lw" && config.algo != "mh")
    throw config_error("unknown algorithm '" + config.algo +
                       "' (simulate|lw|mh)");
  if ((config.algo == "lw" || config.algo == "mh") && config.iterations < 1)
    throw config_error("iterations must be >= 1 for lw/mh");
  const ModelEntry& entry = find_model(config.model);
  const Env env = load_env(config, entry);

  RunArtifacts art;
  if (config.algo == "simulate")
    art = do_simulate(config, entry, env);
  else if (config.algo == "lw")
    art = do_lw(config, entry, env);
  else
    art = do_mh(config, entry, env);

  write_text(config.out_path, art.result_text);
  if (config.out_path) {
    ordered_json manifest{{"config", config_json(config, env)},
                          {"env_usage", usage_json(art.usage)},
                          {"output", *config.out_path}};
    write_json_file(*config.out_path + ".manifest.json", manifest);
    if (config.dump_traces)
      write_json_file(*config.out_path + ".traces.json", art.traces);
  } else if (config.dump_traces) {
    std::cout << art.traces.dump(2) << "\n";
  }
}

void run_bench(const BenchConfig& config) {
  std::string csv = "model,algo,size,seconds\n";
  ordered_json rows = ordered_json::array();
  std::string failures;
  for (const auto& model : config.models) {
    for (const auto& algo : config.algos) {
      std::vector<std::size_t> sizes = config.sizes;
      if (sizes.empty()) sizes = calibrated_sizes(model, algo, config.seed);
      const auto bench_rows = bench_model(model, algo, sizes, config.seed);
      const auto verdict = assess_bench(algo, bench_rows);
      for (const auto& r : bench_rows) {
        csv += r.model + "," + r.algo + "," + std::to_string(r.size) + "," +
               real_to_string(r.seconds) + "\n";
        rows.push_back({{"model", r.model},
                        {"algo", r.algo},
                        {"size", r.size},
                        {"seconds", r.seconds}});
      }
      if (!verdict.monotone)
        failures += model + "/" + algo + ": runtime not monotone in size\n";
      if (!verdict.linear_enough)
        failures += model + "/" + algo +
                    ": linear fit R^2=" + real_to_string(verdict.fit.r2) +
                    " < 0.95\n";
    }
  }
  if (config.format == "json")
    write_text(config.out_path, ordered_json{{"rows", rows}}.dump(2) + "\n");
  else
    write_text(config.out_path, csv);
  if (!failures.empty())
    throw model_error("bench scaling checks failed:\n" + failures);
}

void print_models(std::ostream& os) {
  ordered_json out = ordered_json::array();
  for (const auto& [name, entry] : model_registry()) {
    out.push_back({{"name", name},
                   {"input_schema", entry->input_schema()},
                   {"default_input", entry->default_input()},
                   {"env_schema", entry->env_schema()},
                   {"default_env", env_to_json(entry->default_env())}});
  }
  os << out.dump(2) << "\n";
}

}  // namespace probeff

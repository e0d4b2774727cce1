#include "probeff/registry.hpp"

#include "probeff/zoo.hpp"

namespace probeff {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

json merged_input(const json& defaults, const json& provided,
                  const std::string& model) {
  if (provided.is_null()) return defaults;
  if (!provided.is_object())
    throw config_error("model input for '" + model + "' must be a JSON object");
  json out = defaults;
  for (auto it = provided.begin(); it != provided.end(); ++it) {
    if (!defaults.contains(it.key()))
      throw config_error("unknown input field '" + it.key() + "' for model '" +
                         model + "'");
    out[it.key()] = it.value();
  }
  return out;
}

std::int64_t field_int(const json& in, const char* field) {
  if (!in.contains(field) || !in.at(field).is_number_integer())
    throw config_error(std::string("input field '") + field +
                       "' must be an integer");
  return in.at(field).get<std::int64_t>();
}

template <typename A>
class BasicEntry final : public ModelEntry {
 public:
  using MakeModel = std::function<Model<A>(const json&)>;
  using ResultToJson = std::function<ordered_json(const A&)>;

  BasicEntry(std::string name, ordered_json input_schema, json default_input,
             Env default_env, MakeModel make, ResultToJson result)
      : name_(std::move(name)),
        input_schema_(std::move(input_schema)),
        default_input_(std::move(default_input)),
        default_env_(std::move(default_env)),
        make_(std::move(make)),
        result_(std::move(result)) {}

  const std::string& name() const override { return name_; }
  ordered_json input_schema() const override { return input_schema_; }
  ordered_json default_input() const override {
    return ordered_json::parse(default_input_.dump());
  }
  Env default_env() const override { return default_env_; }

  SimulationOutput run_simulate(const json& input, const Env& env,
                                std::uint64_t seed) const override {
    const json in = merged_input(default_input_, input, name_);
    RandomSource rng = RandomSource::stream(seed, 0);
    auto out = simulate([this](const json& j) { return make_(j); }, env, in, rng);
    return {result_(out.value), std::move(out.env_out), std::move(out.residual),
            std::move(out.strace)};
  }

  LwOutput run_lw(std::size_t iterations, const json& input, const Env& env,
                  std::uint64_t seed) const override {
    const json in = merged_input(default_input_, input, name_);
    Env residual;
    auto samples = lw(iterations, [this](const json& j) { return make_(j); },
                      in, env, seed, &residual);
    return {std::move(samples), std::move(residual)};
  }

  MhOutput run_mh(std::size_t iterations, const json& input, const Env& env,
                  std::uint64_t seed, bool record) const override {
    const json in = merged_input(default_input_, input, name_);
    auto out = mh(iterations, [this](const json& j) { return make_(j); }, in,
                  env, seed, record);
    return {std::move(out.env_out), std::move(out.residual),
            std::move(out.records)};
  }

 private:
  std::string name_;
  ordered_json input_schema_;
  json default_input_;
  Env default_env_;
  MakeModel make_;
  ResultToJson result_;
};

Env make_env(std::initializer_list<std::tuple<const char*, Kind, std::vector<PrimVal>>> entries) {
  Env env;
  // cons prepends, so feed entries back to front to keep display order.
  std::vector<std::tuple<const char*, Kind, std::vector<PrimVal>>> list(entries);
  for (auto it = list.rbegin(); it != list.rend(); ++it)
    env = env.cons(ObsVar(std::get<0>(*it)), std::get<1>(*it), std::get<2>(*it));
  return env;
}

ordered_json popl_json(const zoo::Popl& p) {
  return ordered_json{{"s", p.s}, {"i", p.i}, {"r", p.r}};
}

ordered_json poplv_json(const zoo::PoplV& p) {
  return ordered_json{{"s", p.s}, {"i", p.i}, {"r", p.r}, {"v", p.v}};
}

std::shared_ptr<const ModelEntry> linregr_entry() {
  std::vector<double> xs;
  for (int i = 0; i <= 100; ++i) xs.push_back(i);
  return std::make_shared<BasicEntry<std::vector<double>>>(
      "linregr",
      ordered_json{{"xs", "array of real model inputs"}},
      json{{"xs", xs}},
      make_env({{"mu", Kind::Real, {3.0}},
                {"c", Kind::Real, {0.0}},
                {"sigma", Kind::Real, {1.0}},
                {"y", Kind::Real, {}}}),
      [](const json& in) {
        if (!in.at("xs").is_array())
          throw config_error("input field 'xs' must be an array of numbers");
        std::vector<double> points;
        for (const auto& v : in.at("xs")) {
          if (!v.is_number())
            throw config_error("input field 'xs' must be an array of numbers");
          points.push_back(v.get<double>());
        }
        return zoo::lin_regr_many(std::move(points));
      },
      [](const std::vector<double>& ys) { return ordered_json(ys); });
}

std::shared_ptr<const ModelEntry> coinflip_entry() {
  return std::make_shared<BasicEntry<bool>>(
      "coinflip", ordered_json::object(), json::object(),
      make_env({{"p", Kind::Real, {}}, {"y", Kind::Bool, {}}}),
      [](const json&) { return zoo::coin_flip(); },
      [](const bool& y) { return ordered_json(y); });
}

std::shared_ptr<const ModelEntry> hmm_entry() {
  return std::make_shared<BasicEntry<std::int64_t>>(
      "hmm",
      ordered_json{{"n", "number of nodes"}, {"x0", "initial latent state"}},
      json{{"n", 10}, {"x0", 0}},
      make_env({{"dx", Kind::Real, {0.5}},
                {"dy", Kind::Real, {0.8}},
                {"y", Kind::Int, {}}}),
      [](const json& in) {
        const std::int64_t n = field_int(in, "n");
        if (n < 0) throw config_error("input field 'n' must be >= 0");
        return zoo::hmm_discrete(static_cast<std::size_t>(n),
                                 field_int(in, "x0"));
      },
      [](const std::int64_t& x) { return ordered_json(x); });
}

zoo::Popl popl_from_input(const json& in) {
  zoo::Popl p{field_int(in, "s0"), field_int(in, "i0"), field_int(in, "r0")};
  if (p.s < 0 || p.i < 0 || p.r < 0)
    throw config_error("population fields s0/i0/r0 must be >= 0");
  return p;
}

std::size_t days_from_input(const json& in) {
  const std::int64_t days = field_int(in, "days");
  if (days < 0) throw config_error("input field 'days' must be >= 0");
  return static_cast<std::size_t>(days);
}

using SirResult = std::pair<zoo::Popl, std::vector<zoo::Popl>>;

ordered_json sir_result_json(const SirResult& r) {
  ordered_json trajectory = ordered_json::array();
  for (const auto& p : r.second) trajectory.push_back(popl_json(p));
  return ordered_json{{"final", popl_json(r.first)}, {"trajectory", trajectory}};
}

std::shared_ptr<const ModelEntry> sir_entry() {
  return std::make_shared<BasicEntry<SirResult>>(
      "sir",
      ordered_json{{"days", "number of days"},
                   {"s0", "initial susceptible"},
                   {"i0", "initial infected"},
                   {"r0", "initial recovered"}},
      json{{"days", 100}, {"s0", 762}, {"i0", 1}, {"r0", 0}},
      make_env({{"beta", Kind::Real, {0.7}},
                {"gamma", Kind::Real, {0.009}},
                {"rho", Kind::Real, {0.3}},
                {"xi", Kind::Int, {}}}),
      [](const json& in) {
        return zoo::hmm_sir_traced(days_from_input(in), popl_from_input(in));
      },
      sir_result_json);
}

std::shared_ptr<const ModelEntry> sir_rs_entry() {
  auto traced = [](std::size_t days, zoo::Popl sir0) {
    auto trans = [](zoo::SirRsTransParams tp, zoo::Popl p) {
      return mbind(zoo::trans_sir_rs(tp, p), [](zoo::Popl next) {
        return mbind(tell(std::vector<zoo::Popl>{next}),
                     [next](Unit) { return Model<zoo::Popl>::pure(next); });
      });
    };
    return handle_writer_model<std::vector<zoo::Popl>>(zoo::hmm(
        zoo::trans_prior_sir_rs(), zoo::obs_prior_sir(), trans,
        [](double rho, zoo::Popl p) { return zoo::obs_sir(rho, p); }, days,
        sir0));
  };
  return std::make_shared<BasicEntry<SirResult>>(
      "sir-rs",
      ordered_json{{"days", "number of days"},
                   {"s0", "initial susceptible"},
                   {"i0", "initial infected"},
                   {"r0", "initial recovered"}},
      json{{"days", 100}, {"s0", 762}, {"i0", 1}, {"r0", 0}},
      make_env({{"beta", Kind::Real, {0.7}},
                {"gamma", Kind::Real, {0.009}},
                {"eta", Kind::Real, {0.05}},
                {"rho", Kind::Real, {0.3}},
                {"xi", Kind::Int, {}}}),
      [traced](const json& in) {
        return traced(days_from_input(in), popl_from_input(in));
      },
      sir_result_json);
}

std::shared_ptr<const ModelEntry> sir_rsv_entry() {
  return std::make_shared<BasicEntry<zoo::PoplV>>(
      "sir-rsv",
      ordered_json{{"days", "number of days"},
                   {"s0", "initial susceptible"},
                   {"i0", "initial infected"},
                   {"r0", "initial recovered"},
                   {"v0", "initial vaccinated"}},
      json{{"days", 100}, {"s0", 762}, {"i0", 1}, {"r0", 0}, {"v0", 0}},
      make_env({{"beta", Kind::Real, {0.7}},
                {"gamma", Kind::Real, {0.009}},
                {"eta", Kind::Real, {0.05}},
                {"omega", Kind::Real, {0.04}},
                {"rho", Kind::Real, {0.3}},
                {"xi", Kind::Int, {}}}),
      [](const json& in) {
        zoo::PoplV p{field_int(in, "s0"), field_int(in, "i0"),
                     field_int(in, "r0"), field_int(in, "v0")};
        if (p.s < 0 || p.i < 0 || p.r < 0 || p.v < 0)
          throw config_error("population fields must be >= 0");
        return zoo::hmm_sir_rsv(days_from_input(in), p);
      },
      poplv_json);
}

std::shared_ptr<const ModelEntry> lda_entry() {
  return std::make_shared<BasicEntry<std::vector<std::string>>>(
      "lda",
      ordered_json{{"vocab", "vocabulary words"},
                   {"topics", "number of topics"},
                   {"words", "document length"}},
      json{{"vocab", {"the", "cat", "sat", "mat", "dog", "ran"}},
           {"topics", 2},
           {"words", 20}},
      make_env({{"theta", Kind::Vec, {}},
                {"phi", Kind::Vec, {}},
                {"w", Kind::Int, {}}}),
      [](const json& in) {
        if (!in.at("vocab").is_array())
          throw config_error("input field 'vocab' must be an array of strings");
        std::vector<std::string> vocab;
        for (const auto& w : in.at("vocab")) {
          if (!w.is_string())
            throw config_error("input field 'vocab' must be an array of strings");
          vocab.push_back(w.get<std::string>());
        }
        const std::int64_t topics = field_int(in, "topics");
        const std::int64_t words = field_int(in, "words");
        if (topics < 1) throw config_error("input field 'topics' must be >= 1");
        if (words < 0) throw config_error("input field 'words' must be >= 0");
        return zoo::lda(std::move(vocab), static_cast<std::size_t>(topics),
                        static_cast<std::size_t>(words));
      },
      [](const std::vector<std::string>& words) { return ordered_json(words); });
}

}  // namespace

nlohmann::ordered_json ModelEntry::env_schema() const {
  ordered_json out = ordered_json::array();
  const Env env = default_env();
  for (const auto& e : env.entries())
    out.push_back({{"name", e.name}, {"kind", kind_name(e.kind)}});
  return out;
}

const std::map<std::string, std::shared_ptr<const ModelEntry>>& model_registry() {
  static const auto registry = [] {
    std::map<std::string, std::shared_ptr<const ModelEntry>> m;
    for (auto entry : {linregr_entry(), coinflip_entry(), hmm_entry(),
                       sir_entry(), sir_rs_entry(), sir_rsv_entry(),
                       lda_entry()})
      m.emplace(entry->name(), std::move(entry));
    return m;
  }();
  return registry;
}

const ModelEntry& find_model(const std::string& name) {
  const auto& reg = model_registry();
  auto it = reg.find(name);
  if (it == reg.end()) {
    std::string known;
    for (const auto& [n, e] : reg) {
      if (!known.empty()) known += ", ";
      known += n;
    }
    throw config_error("unknown model '" + name + "' (known models: " + known + ")");
  }
  return *it->second;
}

}  // namespace probeff

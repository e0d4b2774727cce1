#include "probeff/inference.hpp"

namespace probeff {

Env reify_output_env(const Env& input, const STrace& trace) {
  // STrace is ordered by (tag, occurrence), so one pass buckets each tag's
  // values in occurrence order.
  std::map<std::string, std::vector<PrimVal>> buckets;
  for (const auto& [addr, value] : trace) {
    if (input.has(addr.tag)) buckets[addr.tag].push_back(value);
  }
  Env out = input;
  for (const auto& e : input.entries()) {
    auto it = buckets.find(e.name);
    out = out.set(e.name, it == buckets.end() ? std::vector<PrimVal>{}
                                              : std::move(it->second));
  }
  return out;
}

std::vector<EnvUsageRow> env_usage_report(const Env& input, const Env& residual,
                                          const STrace& trace) {
  std::vector<EnvUsageRow> rows;
  rows.reserve(input.size());
  for (const auto& e : input.entries()) {
    EnvUsageRow row;
    row.name = e.name;
    row.provided = e.values.size();
    row.leftover = residual.has(e.name) ? residual.get(e.name).size() : 0;
    row.consumed = row.provided - row.leftover;
    for (const auto& [addr, value] : trace)
      if (addr.tag == e.name) ++row.sampled;
    rows.push_back(std::move(row));
  }
  return rows;
}

double mh_log_accept_ratio(const STrace& s_old, const LPTrace& lp_old,
                           const STrace& s_new, const LPTrace& lp_new,
                           const Addr& proposal) {
  double l_old = 0.0, l_new = 0.0;
  for (const auto& [addr, lp] : lp_old) l_old += lp;
  for (const auto& [addr, lp] : lp_new) l_new += lp;

  // Values discarded from the old trace and freshly drawn in the new one
  // (other than the proposal site) came from their priors; their log
  // probabilities are the proposal-density corrections.
  double discarded = 0.0, drawn = 0.0;
  for (const auto& [addr, value] : s_old) {
    if (!(addr == proposal) && !s_new.count(addr)) {
      auto it = lp_old.find(addr);
      if (it != lp_old.end()) discarded += it->second;
    }
  }
  for (const auto& [addr, value] : s_new) {
    if (!(addr == proposal) && !s_old.count(addr)) {
      auto it = lp_new.find(addr);
      if (it != lp_new.end()) drawn += it->second;
    }
  }

  // Proposal-site correction. When the site survives in both traces with
  // real values, the draw came from the prior/walk mixture; otherwise it was
  // a plain prior draw (or the site vanished and is covered by the set sums).
  double q_fwd = 0.0, q_rev = 0.0;
  const auto old_it = s_old.find(proposal);
  const auto new_it = s_new.find(proposal);
  if (old_it != s_old.end() && new_it != s_new.end()) {
    const double lp_fwd = lp_new.at(proposal);
    const double lp_rev = lp_old.at(proposal);
    if (kind_of(old_it->second) == Kind::Real &&
        kind_of(new_it->second) == Kind::Real) {
      const double v_old = as_real(old_it->second);
      const double v_new = as_real(new_it->second);
      q_fwd = std::log((1.0 - kMhWalkShare) * std::exp(lp_fwd) +
                       kMhWalkShare *
                           mh_normal_pdf(v_new, v_old, mh_walk_sigma(v_old)));
      q_rev = std::log((1.0 - kMhWalkShare) * std::exp(lp_rev) +
                       kMhWalkShare *
                           mh_normal_pdf(v_old, v_new, mh_walk_sigma(v_new)));
    } else {
      q_fwd = lp_fwd;
      q_rev = lp_rev;
    }
  } else if (old_it != s_old.end()) {
    // site vanished from the new trace: its old value is discarded
    auto it = lp_old.find(proposal);
    if (it != lp_old.end()) discarded += it->second;
  }

  return (l_new - l_old) + discarded - drawn + q_rev - q_fwd +
         mh_site_log_prob(s_new, proposal) - mh_site_log_prob(s_old, proposal);
}

}  // namespace probeff

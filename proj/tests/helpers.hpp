#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppud/run_transform.hpp"
#include "ppud/state_space.hpp"
#include "ppud/text.hpp"

namespace ppud::testing {

inline std::string load_sample(const std::string& name) {
  std::ifstream in(std::string(SAMPLES_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing sample " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Protocol load_protocol_sample(const std::string& name) {
  auto res = parse_protocol(load_sample(name));
  if (!res.ok()) {
    std::string msg = "sample " + name + " does not parse:";
    for (const auto& d : res.diagnostics) msg += "\n" + d.str();
    throw std::runtime_error(msg);
  }
  return *res.value;
}

inline const Protocol& pair_witness() {
  static const Protocol p = load_protocol_sample("pair_witness.pp");
  return p;
}

inline const Protocol& parity_leader() {
  static const Protocol p = load_protocol_sample("parity_leader.pp");
  return p;
}

inline const Protocol& two_state() {
  static const Protocol p = load_protocol_sample("two_state.pp");
  return p;
}

inline IntervalPredicate pair_witness_predicate() {
  auto res = parse_predicate(load_sample("pair_witness.pred"), pair_witness());
  if (!res.ok()) throw std::runtime_error("pair_witness.pred does not parse");
  return *res.value;
}

inline ConcreteRun five_agent_run() {
  auto res = parse_run(load_sample("five_agent.run"), two_state());
  if (!res.ok()) throw std::runtime_error("five_agent.run does not parse");
  return *res.value;
}

// configuration literal: one inner list of (state name, count) per datum
inline CanonicalConfiguration cfg(
    const Protocol& p,
    const std::vector<std::vector<std::pair<std::string, std::uint32_t>>>& data) {
  std::vector<DatumProfile> raw;
  for (const auto& datum : data) {
    DatumProfile prof;
    for (const auto& [name, count] : datum) {
      auto idx = p.state_index(name);
      if (!idx) throw std::runtime_error("cfg: unknown state " + name);
      prof.add(*idx, count);
    }
    raw.push_back(std::move(prof));
  }
  return canonicalize(std::move(raw));
}

inline std::vector<CanonicalConfiguration> initial_configs(const Protocol& p,
                                                           std::uint32_t max_data,
                                                           std::uint32_t max_agents,
                                                           bool include_empty = false) {
  return enumerate_configurations(enumerate_profiles(p.initial, max_agents), max_data,
                                  include_empty);
}

// random immediate-observation protocol; outputs, initial set and transition
// shapes drawn uniformly
inline Protocol random_io_protocol(std::mt19937& rng, std::size_t max_states = 4,
                                   std::size_t max_transitions = 10) {
  Protocol p;
  std::uniform_int_distribution<std::size_t> nstates(2, max_states);
  const std::size_t n = nstates(rng);
  for (std::size_t i = 0; i < n; ++i) p.states.push_back("s" + std::to_string(i));

  std::uniform_int_distribution<std::size_t> ntrans(1, max_transitions);
  std::uniform_int_distribution<StateId> state(0, static_cast<StateId>(n - 1));
  std::uniform_int_distribution<int> coin(0, 1);
  const std::size_t k = ntrans(rng);
  for (std::size_t i = 0; i < k; ++i) {
    const StateId obs = state(rng);
    const StateId from = state(rng);
    const StateId to = state(rng);
    p.transitions.push_back({obs, from, coin(rng) ? Guard::Eq : Guard::Neq, obs, to});
  }

  std::uniform_int_distribution<std::size_t> ninit(1, n);
  const std::size_t icount = ninit(rng);
  std::vector<StateId> all;
  for (std::size_t i = 0; i < n; ++i) all.push_back(static_cast<StateId>(i));
  std::shuffle(all.begin(), all.end(), rng);
  p.initial.assign(all.begin(), all.begin() + static_cast<long>(icount));
  std::sort(p.initial.begin(), p.initial.end());

  for (std::size_t i = 0; i < n; ++i)
    p.output.push_back(coin(rng) ? OutputValue::Top : OutputValue::Bot);
  return p;
}

// random valid run: agents spread over random states, then uniformly chosen
// enabled steps until the length target or a deadlock
inline ConcreteRun random_run(std::mt19937& rng, const Protocol& p, std::uint32_t max_agents,
                              std::uint32_t max_data, std::uint32_t max_steps) {
  ConcreteRun r;
  std::uniform_int_distribution<std::uint32_t> nagents(2, max_agents);
  std::uniform_int_distribution<std::uint32_t> ndata(1, max_data);
  std::uniform_int_distribution<StateId> state(0, static_cast<StateId>(p.states.size() - 1));
  const std::uint32_t agents = nagents(rng);
  const std::uint32_t data = std::min(ndata(rng), agents);
  std::uniform_int_distribution<DatumId> datum(0, data - 1);
  for (std::uint32_t i = 0; i < agents; ++i)
    r.agents.push_back({i, i < data ? i : datum(rng), state(rng)});

  std::vector<StateId> cur;
  for (const RunAgent& a : r.agents) cur.push_back(a.start);

  std::uniform_int_distribution<std::uint32_t> nsteps(0, max_steps);
  const std::uint32_t target = nsteps(rng);
  for (std::uint32_t s = 0; s < target; ++s) {
    std::vector<RunStep> enabled;
    for (std::uint32_t t = 0; t < p.transitions.size(); ++t) {
      const Transition& tr = p.transitions[t];
      if (tr.q4 == tr.q2) continue;  // skip no-ops to keep runs interesting
      for (std::uint32_t actor = 0; actor < agents; ++actor) {
        if (cur[actor] != tr.q2) continue;
        for (std::uint32_t obs = 0; obs < agents; ++obs) {
          if (obs == actor || cur[obs] != tr.q1) continue;
          const bool same = r.agents[actor].datum == r.agents[obs].datum;
          if ((tr.guard == Guard::Eq) != same) continue;
          enabled.push_back({t, actor, obs});
        }
      }
    }
    if (enabled.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, enabled.size() - 1);
    const RunStep step = enabled[pick(rng)];
    r.steps.push_back(step);
    cur[step.actor] = p.transitions[step.transition].q4;
  }
  return r;
}

}  // namespace ppud::testing

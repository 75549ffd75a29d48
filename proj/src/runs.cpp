#include "ppud/runs.hpp"

#include <algorithm>
#include <stdexcept>

namespace ppud {

namespace {

std::string agent_label(const ConcreteRun& r, AgentId id) {
  auto it = r.agent_names.find(id);
  if (it != r.agent_names.end()) return it->second;
  return "a" + std::to_string(id);
}

}  // namespace

RunCheckResult check_run(const Protocol& p, const ConcreteRun& r) {
  RunCheckResult res;
  if (!is_immediate_observation(p)) {
    res.reason = "protocol is not immediate observation";
    return res;
  }

  std::map<AgentId, StateId> cur;
  std::map<AgentId, DatumId> datum;
  for (const RunAgent& a : r.agents) {
    if (cur.count(a.id)) {
      res.reason = "duplicate agent id " + std::to_string(a.id);
      return res;
    }
    if (a.start < 0 || a.start >= static_cast<StateId>(p.states.size())) {
      res.reason = "agent " + agent_label(r, a.id) + " starts in an unknown state";
      return res;
    }
    cur[a.id] = a.start;
    datum[a.id] = a.datum;
  }

  res.states.push_back(cur);
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    const RunStep& s = r.steps[i];
    res.bad_step = i;
    if (s.transition >= p.transitions.size()) {
      res.reason = "unknown transition index";
      return res;
    }
    const Transition& t = p.transitions[s.transition];
    if (s.actor == s.observed) {
      res.reason = "actor and observed agent coincide";
      return res;
    }
    auto actor_it = cur.find(s.actor);
    auto obs_it = cur.find(s.observed);
    if (actor_it == cur.end() || obs_it == cur.end()) {
      res.reason = "step references an agent outside the run";
      return res;
    }
    if (obs_it->second != t.q1) {
      res.reason = "observed agent " + agent_label(r, s.observed) + " is in " +
                   p.states[obs_it->second] + ", transition observes " + p.states[t.q1];
      return res;
    }
    if (actor_it->second != t.q2) {
      res.reason = "actor " + agent_label(r, s.actor) + " is in " + p.states[actor_it->second] +
                   ", transition moves from " + p.states[t.q2];
      return res;
    }
    const bool same = datum[s.actor] == datum[s.observed];
    if (t.guard == Guard::Eq && !same) {
      res.reason = "equality guard between agents of different data";
      return res;
    }
    if (t.guard == Guard::Neq && same) {
      res.reason = "disequality guard between agents of the same datum";
      return res;
    }
    actor_it->second = t.q4;
    res.states.push_back(cur);
  }

  res.ok = true;
  res.reason.clear();
  res.bad_step = 0;
  res.end_states = cur;

  std::map<DatumId, DatumProfile> profiles;
  for (const auto& [id, st] : cur) profiles[datum[id]].add(st, 1);
  std::vector<DatumProfile> raw;
  for (auto& [d, prof] : profiles) raw.push_back(std::move(prof));
  res.end = canonicalize(std::move(raw));
  return res;
}

CanonicalConfiguration start_configuration(const ConcreteRun& r) {
  std::map<DatumId, DatumProfile> profiles;
  for (const RunAgent& a : r.agents) profiles[a.datum].add(a.start, 1);
  std::vector<DatumProfile> raw;
  for (auto& [d, prof] : profiles) raw.push_back(std::move(prof));
  return canonicalize(std::move(raw));
}

Trace trace_of(const Protocol& p, const ConcreteRun& r, DatumId d) {
  RunCheckResult res = check_run(p, r);
  if (!res.ok) throw std::invalid_argument("trace of an invalid run: " + res.reason);
  Trace tr;
  for (const RunAgent& a : r.agents)
    if (a.datum == d) tr.counts[{a.start, res.end_states.at(a.id)}]++;
  return tr;
}

SplitTrace split_trace_of(const Protocol& p, const ConcreteRun& r, DatumId d, std::size_t i) {
  if (i < 1 || i > r.steps.size() + 1)
    throw std::invalid_argument("split-trace index out of range");
  RunCheckResult res = check_run(p, r);
  if (!res.ok) throw std::invalid_argument("split trace of an invalid run: " + res.reason);
  SplitTrace st;
  const auto& mid = res.states[i - 1];
  for (const RunAgent& a : r.agents)
    if (a.datum == d) st.counts[{a.start, mid.at(a.id), res.end_states.at(a.id)}]++;
  return st;
}

}  // namespace ppud

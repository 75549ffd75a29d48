#include "ppud/run_transform.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>

namespace ppud {

namespace {

using boost::multiprecision::cpp_int;

RunCheckResult replay_or_throw(const Protocol& p, const ConcreteRun& r, const char* who) {
  RunCheckResult res = check_run(p, r);
  if (!res.ok)
    throw std::invalid_argument(std::string(who) + " requires a valid run: " + res.reason +
                                " (step " + std::to_string(res.bad_step + 1) + ")");
  return res;
}

DatumId datum_of(const ConcreteRun& r, AgentId id) {
  const RunAgent* a = r.find_agent(id);
  if (!a) throw std::invalid_argument("agent id " + std::to_string(id) + " is not in the run");
  return a->datum;
}

// copycat with a caller-chosen id for the fresh agent
ConcreteRun agent_copycat_as(const Protocol& p, const ConcreteRun& r, AgentId a, AgentId fresh) {
  const RunAgent* src = r.find_agent(a);
  if (!src) throw std::invalid_argument("copycat source agent is not in the run");
  if (r.find_agent(fresh)) throw std::invalid_argument("fresh agent id already appears in the run");
  replay_or_throw(p, r, "agent copycat");

  ConcreteRun out = r;
  out.agents.push_back({fresh, src->datum, src->start});
  std::sort(out.agents.begin(), out.agents.end(),
            [](const RunAgent& x, const RunAgent& y) { return x.id < y.id; });

  out.steps.clear();
  for (const RunStep& s : r.steps) {
    out.steps.push_back(s);
    if (s.actor == a) out.steps.push_back({s.transition, fresh, s.observed});
  }
  return out;
}

// adds a datum mirroring d's agents; copies maps each d-agent to its mirror
ConcreteRun data_copycat_as(const Protocol& p, const ConcreteRun& r, DatumId d,
                            DatumId fresh_datum, const std::map<AgentId, AgentId>& copies) {
  replay_or_throw(p, r, "data copycat");
  for (const RunAgent& a : r.agents)
    if (a.datum == fresh_datum)
      throw std::invalid_argument("fresh datum already appears in the run");

  ConcreteRun out = r;
  bool any = false;
  for (const RunAgent& a : r.agents) {
    if (a.datum != d) continue;
    any = true;
    out.agents.push_back({copies.at(a.id), fresh_datum, a.start});
  }
  if (!any) throw std::invalid_argument("datum to copy does not appear in the run");
  std::sort(out.agents.begin(), out.agents.end(),
            [](const RunAgent& x, const RunAgent& y) { return x.id < y.id; });

  out.steps.clear();
  for (const RunStep& s : r.steps) {
    out.steps.push_back(s);
    if (datum_of(r, s.actor) != d) continue;
    const Transition& t = p.transitions[s.transition];
    if (t.guard == Guard::Eq) {
      // internal step: the mirror observes the mirror of the observed agent
      out.steps.push_back({s.transition, copies.at(s.actor), copies.at(s.observed)});
    } else {
      // external step: the original observed agent has not moved and its
      // datum differs from the fresh one
      out.steps.push_back({s.transition, copies.at(s.actor), s.observed});
    }
  }
  return out;
}

}  // namespace

ConcreteRun agent_copycat(const Protocol& p, const ConcreteRun& r, AgentId a, AgentId fresh) {
  return agent_copycat_as(p, r, a, fresh);
}

ConcreteRun data_copycat(const Protocol& p, const ConcreteRun& r, DatumId d, DatumId fresh_datum) {
  std::map<AgentId, AgentId> copies;
  AgentId next = r.fresh_agent_id();
  for (const RunAgent& a : r.agents)
    if (a.datum == d) copies[a.id] = next++;
  return data_copycat_as(p, r, d, fresh_datum, copies);
}

namespace {

struct BunchKey {
  DatumId d;
  StateId qs;
  StateId qe;
  auto operator<=>(const BunchKey&) const = default;
};

// one rewrite of the first over-large (datum, start, end) class; returns
// nullopt when every class is within |Q|
std::optional<ConcreteRun> shrink_one_bunch(const Protocol& p, const ConcreteRun& r) {
  const RunCheckResult rep = replay_or_throw(p, r, "agents core");
  const std::size_t q_count = p.states.size();

  std::map<BunchKey, std::vector<AgentId>> classes;
  for (const RunAgent& a : r.agents)
    classes[{a.datum, a.start, rep.end_states.at(a.id)}].push_back(a.id);

  const std::vector<AgentId>* bunch = nullptr;
  BunchKey key{};
  for (auto& [k, ids] : classes) {
    std::sort(ids.begin(), ids.end());
    if (!bunch && ids.size() > q_count) {
      bunch = &ids;
      key = k;
    }
  }
  if (!bunch) return std::nullopt;

  const std::set<AgentId> in_bunch(bunch->begin(), bunch->end());
  const std::size_t L = r.steps.size();

  // states visited by the bunch
  std::set<StateId> visited;
  for (std::size_t i = 0; i <= L; ++i)
    for (AgentId a : *bunch) visited.insert(rep.states[i].at(a));

  // first/last visitors per visited state
  struct Window {
    std::size_t first = 0, last = 0;
    AgentId alpha = 0, beta = 0;
  };
  std::map<StateId, Window> windows;
  for (StateId q : visited) {
    Window w;
    bool seen = false;
    for (std::size_t i = 0; i <= L; ++i) {
      AgentId min_here = 0;
      bool any = false;
      for (AgentId a : *bunch) {  // ids ascending: first hit is the smallest id
        if (rep.states[i].at(a) == q) {
          min_here = a;
          any = true;
          break;
        }
      }
      if (!any) continue;
      if (!seen) {
        w.first = i;
        w.alpha = min_here;
        seen = true;
      }
      w.last = i;
      w.beta = min_here;
    }
    windows[q] = w;
  }

  // fresh stand-in per visited state
  std::map<StateId, AgentId> stand_in;
  AgentId next_id = r.fresh_agent_id();
  for (StateId q : visited) stand_in[q] = next_id++;

  ConcreteRun out;
  out.agent_names = r.agent_names;
  out.datum_names = r.datum_names;
  out.agents = r.agents;
  for (StateId q : visited) out.agents.push_back({stand_in[q], key.d, key.qs});

  // duplicate the prefix steps of alpha_q and the suffix steps of beta_q
  std::vector<RunStep> steps;
  for (std::size_t j = 0; j < L; ++j) {
    const RunStep& s = r.steps[j];
    steps.push_back(s);
    for (StateId q : visited) {
      const Window& w = windows.at(q);
      if (s.actor == w.alpha && j < w.first)
        steps.push_back({s.transition, stand_in[q], s.observed});
      if (s.actor == w.beta && j >= w.last)
        steps.push_back({s.transition, stand_in[q], s.observed});
    }
  }

  // re-target every observation of a bunch agent to the stand-in waiting in
  // that state (the stand-in occupies q throughout [first, last])
  for (RunStep& s : steps) {
    if (!in_bunch.count(s.observed)) continue;
    const Transition& t = p.transitions[s.transition];
    s.observed = stand_in.at(t.q1);
  }

  // drop the bunch agents' own steps, then recycle |visited| bunch ids for
  // the stand-ins so the surviving agent set stays inside the original one
  std::erase_if(steps, [&](const RunStep& s) { return in_bunch.count(s.actor) > 0; });
  std::erase_if(out.agents, [&](const RunAgent& a) { return in_bunch.count(a.id) > 0; });

  std::map<AgentId, AgentId> rename;
  std::size_t k = 0;
  for (StateId q : visited) rename[stand_in[q]] = (*bunch)[k++];
  for (RunAgent& a : out.agents) {
    auto it = rename.find(a.id);
    if (it != rename.end()) a.id = it->second;
  }
  for (RunStep& s : steps) {
    auto it = rename.find(s.actor);
    if (it != rename.end()) s.actor = it->second;
    it = rename.find(s.observed);
    if (it != rename.end()) s.observed = it->second;
  }
  std::sort(out.agents.begin(), out.agents.end(),
            [](const RunAgent& x, const RunAgent& y) { return x.id < y.id; });
  out.steps = std::move(steps);
  return out;
}

}  // namespace

ConcreteRun agents_core(const Protocol& p, const ConcreteRun& r) {
  ConcreteRun cur = r;
  while (auto next = shrink_one_bunch(p, cur)) cur = std::move(*next);
  return cur;
}

namespace {

// canonical (start, mid, end) census of one datum at one configuration index
SplitTrace split_census(const RunCheckResult& rep, const std::vector<AgentId>& agents,
                        std::size_t i) {
  SplitTrace st;
  for (AgentId a : agents)
    st.counts[{rep.states.front().at(a), rep.states[i].at(a), rep.states.back().at(a)}]++;
  return st;
}

struct DataCoreCtx {
  const Protocol& p;
  const ConcreteRun& r;
  const RunCheckResult& rep;
  std::map<DatumId, std::vector<AgentId>> agents_by_datum;  // ids ascending
};

// one rewrite of the first over-large trace class; nullopt when none is left
std::optional<ConcreteRun> shrink_one_trace(DataCoreCtx& ctx, const cpp_int& max_per_trace) {
  const ConcreteRun& r = ctx.r;
  const RunCheckResult& rep = ctx.rep;
  const std::size_t L = r.steps.size();

  std::map<Trace, std::vector<DatumId>> by_trace;
  for (const auto& [d, ids] : ctx.agents_by_datum) {
    Trace tr;
    for (AgentId a : ids) tr.counts[{rep.states.front().at(a), rep.states.back().at(a)}]++;
    by_trace[tr].push_back(d);
  }

  const std::vector<DatumId>* cls = nullptr;
  for (const auto& [tr, data] : by_trace) {
    if (cpp_int(data.size()) > max_per_trace) {
      cls = &data;
      break;
    }
  }
  if (!cls) return std::nullopt;
  const std::set<DatumId> in_class(cls->begin(), cls->end());

  // split traces of class data at every configuration
  std::map<DatumId, std::vector<SplitTrace>> split;  // datum -> per-config census
  for (DatumId d : *cls) {
    auto& v = split[d];
    v.reserve(L + 1);
    for (std::size_t i = 0; i <= L; ++i) v.push_back(split_census(rep, ctx.agents_by_datum[d], i));
  }

  struct StrInfo {
    std::size_t first = 0, last = 0;
    DatumId delta = 0, epsilon = 0, eta = 0;
    std::map<AgentId, AgentId> from_eta;    // f: eta-agent -> delta-agent
    std::map<AgentId, AgentId> eta_from_delta;  // f^{-1}
    std::map<AgentId, AgentId> eta_from_eps;    // l^{-1}: epsilon-agent -> eta-agent
  };
  std::map<SplitTrace, StrInfo> infos;
  for (DatumId d : *cls) {
    for (std::size_t i = 0; i <= L; ++i) {
      const SplitTrace& st = split[d][i];
      auto [it, inserted] = infos.try_emplace(st);
      StrInfo& info = it->second;
      if (inserted) {
        info.first = info.last = i;
        info.delta = info.epsilon = d;
        continue;
      }
      if (i < info.first) {
        info.first = i;
        info.delta = d;
      } else if (i == info.first) {
        info.delta = std::min(info.delta, d);
      }
      if (i > info.last) {
        info.last = i;
        info.epsilon = d;
      } else if (i == info.last) {
        info.epsilon = std::min(info.epsilon, d);
      }
    }
  }

  // representatives: k-th split trace (canonical order) gets the k-th
  // smallest datum of the class
  {
    std::size_t k = 0;
    for (auto& [st, info] : infos) info.eta = (*cls)[k++];
  }

  // match agents of two data of equal trace by (start, end) groups, id order
  auto match_by = [&](DatumId from, DatumId to, auto&& group_of) {
    std::map<std::tuple<StateId, StateId, StateId>, std::vector<AgentId>> ga, gb;
    for (AgentId a : ctx.agents_by_datum[from]) ga[group_of(a, true)].push_back(a);
    for (AgentId a : ctx.agents_by_datum[to]) gb[group_of(a, false)].push_back(a);
    std::map<AgentId, AgentId> m;
    for (auto& [g, va] : ga) {
      auto& vb = gb.at(g);
      for (std::size_t i = 0; i < va.size(); ++i) m[va[i]] = vb[i];
    }
    return m;
  };

  for (auto& [st, info] : infos) {
    // f: eta -> delta, grouped by (start, end) only
    auto f = match_by(info.eta, info.delta, [&](AgentId a, bool) {
      return std::tuple<StateId, StateId, StateId>{rep.states.front().at(a), -1,
                                                   rep.states.back().at(a)};
    });
    // g: delta -> epsilon, grouped by (start, mid, end); delta's mid is taken
    // at `first`, epsilon's at `last`
    auto g = match_by(info.delta, info.epsilon, [&](AgentId a, bool from_side) {
      const std::size_t idx = from_side ? info.first : info.last;
      return std::tuple<StateId, StateId, StateId>{rep.states.front().at(a),
                                                   rep.states[idx].at(a),
                                                   rep.states.back().at(a)};
    });
    info.from_eta = f;
    for (const auto& [eta_agent, delta_agent] : f) {
      info.eta_from_delta[delta_agent] = eta_agent;
      info.eta_from_eps[g.at(delta_agent)] = eta_agent;
    }
  }

  // data kept: everything outside the class plus the representatives
  std::set<DatumId> kept_of_class;
  for (const auto& [st, info] : infos) kept_of_class.insert(info.eta);

  ConcreteRun out;
  out.agent_names = r.agent_names;
  out.datum_names = r.datum_names;
  for (const RunAgent& a : r.agents)
    if (!in_class.count(a.datum) || kept_of_class.count(a.datum)) out.agents.push_back(a);

  std::map<AgentId, StateId> cur;
  for (const RunAgent& a : out.agents) cur[a.id] = a.start;
  std::map<AgentId, DatumId> datum;
  for (const RunAgent& a : out.agents) datum[a.id] = a.datum;

  for (std::size_t j = 0; j < L; ++j) {
    const RunStep& s = r.steps[j];
    const Transition& t = ctx.p.transitions[s.transition];
    const DatumId da = datum_of(r, s.actor);
    const DatumId dd = datum_of(r, s.observed);

    // stand-in for the observed agent under a disequality guard
    auto neq_observed = [&]() -> AgentId {
      if (!in_class.count(dd)) return s.observed;
      const StrInfo& info = infos.at(split[dd][j]);
      AgentId best = 0;
      bool found = false;
      for (AgentId x : ctx.agents_by_datum[info.eta]) {
        if (cur.at(x) != t.q1) continue;
        if (!found || x < best) best = x;
        found = true;
      }
      if (!found) throw std::logic_error("data core: no frozen representative to observe");
      return best;
    };

    std::vector<RunStep> batch;
    if (!in_class.count(da)) {
      batch.push_back({s.transition, s.actor, t.guard == Guard::Neq ? neq_observed() : s.observed});
    } else {
      for (const auto& [st, info] : infos) {
        if (j < info.first && da == info.delta) {
          const AgentId actor = info.eta_from_delta.at(s.actor);
          const AgentId obs = t.guard == Guard::Eq ? info.eta_from_delta.at(s.observed)
                                                   : neq_observed();
          batch.push_back({s.transition, actor, obs});
        } else if (j >= info.last && da == info.epsilon) {
          const AgentId actor = info.eta_from_eps.at(s.actor);
          const AgentId obs = t.guard == Guard::Eq ? info.eta_from_eps.at(s.observed)
                                                   : neq_observed();
          batch.push_back({s.transition, actor, obs});
        }
      }
    }
    for (const RunStep& b : batch) {
      out.steps.push_back(b);
      cur.at(b.actor) = t.q4;
    }
  }
  return out;
}

}  // namespace

ConcreteRun data_core(const Protocol& p, const ConcreteRun& r, std::uint32_t K) {
  RunCheckResult rep = replay_or_throw(p, r, "data core");
  {
    std::map<DatumId, std::uint32_t> per_datum;
    for (const RunAgent& a : r.agents) per_datum[a.datum]++;
    for (const auto& [d, n] : per_datum)
      if (n > K)
        throw std::invalid_argument("data core: datum " + std::to_string(d) + " has " +
                                    std::to_string(n) + " agents, above the bound " +
                                    std::to_string(K));
  }

  const cpp_int q3 = cpp_int(p.states.size()) * p.states.size() * p.states.size();
  cpp_int max_per_trace = 1;  // (K+1)^{|Q|^3}, the number of split traces
  for (cpp_int i = 0; i < q3; ++i) {
    max_per_trace *= (K + 1);
    if (max_per_trace > 1'000'000'000) break;  // already beyond any datum count
  }

  ConcreteRun cur = r;
  while (true) {
    RunCheckResult cur_rep = replay_or_throw(p, cur, "data core");
    DataCoreCtx ctx{p, cur, cur_rep, {}};
    for (const RunAgent& a : cur.agents) ctx.agents_by_datum[a.datum].push_back(a.id);
    for (auto& [d, ids] : ctx.agents_by_datum) std::sort(ids.begin(), ids.end());
    auto next = shrink_one_trace(ctx, max_per_trace);
    if (!next) break;
    cur = std::move(*next);
  }
  return cur;
}

ConcreteRun normalize_run(const Protocol& p, const ConcreteRun& r) {
  const RunCheckResult orig = replay_or_throw(p, r, "normalize");

  ConcreteRun reduced = agents_core(p, r);
  const RunCheckResult red_rep = replay_or_throw(p, reduced, "normalize");

  // traces before the data reduction, needed to pick copy donors afterwards
  std::map<DatumId, Trace> trace_before;
  {
    std::map<DatumId, std::vector<AgentId>> by_datum;
    for (const RunAgent& a : reduced.agents) by_datum[a.datum].push_back(a.id);
    for (const auto& [d, ids] : by_datum) {
      Trace tr;
      for (AgentId a : ids)
        tr.counts[{red_rep.states.front().at(a), red_rep.states.back().at(a)}]++;
      trace_before[d] = tr;
    }
  }
  std::map<DatumId, std::vector<AgentId>> agents_before;
  for (const RunAgent& a : reduced.agents) agents_before[a.datum].push_back(a.id);

  const std::size_t q = p.states.size();
  const std::uint64_t k_bound = static_cast<std::uint64_t>(q) * q * q;
  ConcreteRun cur = data_core(p, reduced, static_cast<std::uint32_t>(k_bound));

  // put back removed data: copy a surviving datum with the same trace,
  // reusing the removed datum's label and its agents' original ids
  for (const auto& [d, tr] : trace_before) {
    if (cur.find_agent(agents_before.at(d).front()) != nullptr) continue;  // survived
    RunCheckResult rep = replay_or_throw(p, cur, "normalize");
    std::map<DatumId, std::vector<AgentId>> by_datum;
    for (const RunAgent& a : cur.agents) by_datum[a.datum].push_back(a.id);

    DatumId donor = 0;
    bool found = false;
    for (const auto& [cand, ids] : by_datum) {
      Trace cand_tr;
      for (AgentId a : ids)
        cand_tr.counts[{rep.states.front().at(a), rep.states.back().at(a)}]++;
      if (cand_tr == tr) {
        donor = cand;
        found = true;
        break;
      }
    }
    if (!found) throw std::logic_error("normalize: no donor datum with the required trace");

    // (start, end) groups of donor agents and of the ids to restore
    std::map<std::pair<StateId, StateId>, std::vector<AgentId>> donor_groups, target_groups;
    for (AgentId a : by_datum.at(donor))
      donor_groups[{rep.states.front().at(a), rep.states.back().at(a)}].push_back(a);
    for (AgentId a : agents_before.at(d))
      target_groups[{red_rep.states.front().at(a), red_rep.states.back().at(a)}].push_back(a);
    std::map<AgentId, AgentId> copies;
    for (auto& [g, donors] : donor_groups) {
      auto& targets = target_groups.at(g);
      for (std::size_t i = 0; i < donors.size(); ++i) copies[donors[i]] = targets[i];
    }
    cur = data_copycat_as(p, cur, donor, d, copies);
  }

  // put back removed agents next to a surviving same-datum agent with the
  // same endpoints
  for (const RunAgent& a : r.agents) {
    if (cur.find_agent(a.id) != nullptr) continue;
    RunCheckResult rep = replay_or_throw(p, cur, "normalize");
    const StateId want_start = a.start;
    const StateId want_end = orig.end_states.at(a.id);
    AgentId donor = 0;
    bool found = false;
    for (const RunAgent& b : cur.agents) {
      if (b.datum != a.datum || b.start != want_start) continue;
      if (rep.end_states.at(b.id) != want_end) continue;
      donor = b.id;
      found = true;
      break;
    }
    if (!found) throw std::logic_error("normalize: no donor agent with the required endpoints");
    cur = agent_copycat_as(p, cur, donor, a.id);
  }

  cur.agent_names = r.agent_names;
  cur.datum_names = r.datum_names;
  return cur;
}

ObservationStats observation_stats(const Protocol& p, const ConcreteRun& r) {
  ObservationStats st;
  std::map<AgentId, DatumId> datum;
  for (const RunAgent& a : r.agents) datum[a.id] = a.datum;
  std::map<DatumId, std::set<AgentId>> observed;
  std::set<DatumId> external;
  for (const RunStep& s : r.steps) {
    observed[datum.at(s.observed)].insert(s.observed);
    if (p.transitions[s.transition].guard == Guard::Neq) external.insert(datum.at(s.observed));
  }
  for (const auto& [d, agents] : observed)
    st.observed_agents_per_datum[d] = static_cast<std::uint32_t>(agents.size());
  st.externally_observed_data = static_cast<std::uint32_t>(external.size());
  return st;
}

}  // namespace ppud

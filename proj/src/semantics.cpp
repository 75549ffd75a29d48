#include "ppud/semantics.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace ppud {

namespace {

// profile indices having a positive count of q, for quick transition pruning
std::vector<std::vector<std::uint32_t>> occupancy(const Protocol& p,
                                                  const CanonicalConfiguration& c) {
  std::vector<std::vector<std::uint32_t>> occ(p.states.size());
  for (std::uint32_t i = 0; i < c.profiles.size(); ++i)
    for (const auto& [s, cnt] : c.profiles[i].first.counts) occ[s].push_back(i);
  return occ;
}

bool is_idle(const Transition& t) { return t.q3 == t.q1 && t.q4 == t.q2; }

}  // namespace

std::vector<StepInstance> enabled_steps(const Protocol& p, const CanonicalConfiguration& c) {
  std::vector<StepInstance> out;
  if (c.profiles.empty()) return out;
  const auto occ = occupancy(p, c);

  for (std::uint32_t ti = 0; ti < p.transitions.size(); ++ti) {
    const Transition& t = p.transitions[ti];
    if (is_idle(t)) continue;
    if (t.q1 < 0 || t.q2 < 0) continue;
    if (t.guard == Guard::Eq) {
      // both agents in one datum
      for (std::uint32_t i : occ[t.q1]) {
        const DatumProfile& pr = c.profiles[i].first;
        if (t.q1 == t.q2) {
          if (pr.count(t.q1) < 2) continue;
        } else if (pr.count(t.q2) == 0) {
          continue;
        }
        out.push_back({ti, i, i, true});
      }
    } else {
      for (std::uint32_t i : occ[t.q1]) {
        for (std::uint32_t j : occ[t.q2]) {
          if (i == j && c.profiles[i].second < 2) continue;  // need two distinct data
          out.push_back({ti, i, j, false});
        }
      }
    }
  }
  return out;
}

CanonicalConfiguration apply_step(const Protocol& p, const CanonicalConfiguration& c,
                                  const StepInstance& s) {
  if (s.transition >= p.transitions.size())
    throw std::invalid_argument("step rejected: transition index out of range");
  const Transition& t = p.transitions[s.transition];
  if (s.first_profile >= c.profiles.size() || s.second_profile >= c.profiles.size())
    throw std::invalid_argument("step rejected: profile selector out of range");
  if (s.same_datum != (t.guard == Guard::Eq))
    throw std::invalid_argument("step rejected: same-datum flag contradicts the guard");

  if (t.guard == Guard::Eq) {
    if (s.first_profile != s.second_profile)
      throw std::invalid_argument("step rejected: equality guard needs one datum");
    const DatumProfile& pr = c.profiles[s.first_profile].first;
    if (t.q1 == t.q2 ? pr.count(t.q1) < 2 : (pr.count(t.q1) == 0 || pr.count(t.q2) == 0))
      throw std::invalid_argument("step rejected: acting agents missing from the datum profile");
  } else {
    if (s.first_profile == s.second_profile && c.profiles[s.first_profile].second < 2)
      throw std::invalid_argument(
          "step rejected: disequality guard needs two distinct data with this profile");
    if (c.profiles[s.first_profile].first.count(t.q1) == 0)
      throw std::invalid_argument("step rejected: no agent on the first source state");
    if (c.profiles[s.second_profile].first.count(t.q2) == 0)
      throw std::invalid_argument("step rejected: no agent on the second source state");
  }

  std::vector<DatumProfile> raw;
  raw.reserve(c.datum_count());
  for (std::uint32_t i = 0; i < c.profiles.size(); ++i) {
    std::uint32_t mult = c.profiles[i].second;
    if (t.guard == Guard::Eq && i == s.first_profile) {
      DatumProfile changed = c.profiles[i].first;
      changed.add(t.q1, -1);
      changed.add(t.q2, -1);
      changed.add(t.q3, +1);
      changed.add(t.q4, +1);
      raw.push_back(std::move(changed));
      --mult;
    } else if (t.guard == Guard::Neq) {
      if (i == s.first_profile) {
        DatumProfile changed = c.profiles[i].first;
        changed.add(t.q1, -1);
        changed.add(t.q3, +1);
        raw.push_back(std::move(changed));
        --mult;
      }
      if (i == s.second_profile) {
        DatumProfile changed = c.profiles[i].first;
        changed.add(t.q2, -1);
        changed.add(t.q4, +1);
        raw.push_back(std::move(changed));
        --mult;
      }
    }
    for (std::uint32_t k = 0; k < mult; ++k) raw.push_back(c.profiles[i].first);
  }
  return canonicalize(std::move(raw));
}

std::vector<CanonicalConfiguration> neighbours(const Protocol& p,
                                               const CanonicalConfiguration& c, Direction dir) {
  const Protocol* effective = &p;
  Protocol rev;
  if (dir == Direction::Backward) {
    rev = reversed(p);
    effective = &rev;
  }
  std::vector<CanonicalConfiguration> out;
  std::unordered_set<CanonicalConfiguration, ConfigHash> seen;
  for (const StepInstance& s : enabled_steps(*effective, c)) {
    CanonicalConfiguration next = apply_step(*effective, c, s);
    if (next == c) continue;
    if (seen.insert(next).second) out.push_back(std::move(next));
  }
  return out;
}

Protocol reversed(const Protocol& p) {
  Protocol r = p;
  for (Transition& t : r.transitions) {
    std::swap(t.q1, t.q3);
    std::swap(t.q2, t.q4);
  }
  return r;
}

std::vector<CanonicalConfiguration> reach_set(const Protocol& p,
                                              const CanonicalConfiguration& c, Direction dir,
                                              std::size_t budget) {
  const Protocol* effective = &p;
  Protocol rev;
  if (dir == Direction::Backward) {
    rev = reversed(p);
    effective = &rev;
  }

  std::vector<CanonicalConfiguration> order;
  std::unordered_set<CanonicalConfiguration, ConfigHash> seen;
  order.push_back(c);
  seen.insert(c);
  for (std::size_t head = 0; head < order.size(); ++head) {
    CanonicalConfiguration cur = order[head];  // copy: order may reallocate
    for (const StepInstance& s : enabled_steps(*effective, cur)) {
      CanonicalConfiguration next = apply_step(*effective, cur, s);
      if (seen.insert(next).second) {
        if (seen.size() > budget) throw BudgetExceeded(seen.size());
        order.push_back(std::move(next));
      }
    }
  }
  return order;
}

bool is_consensus(const Protocol& p, const CanonicalConfiguration& c, OutputValue b) {
  for (const auto& [pr, m] : c.profiles)
    for (const auto& [s, cnt] : pr.counts)
      if (p.output[s] != b) return false;
  return true;  // vacuously true on the empty configuration
}

OutcomeSet fair_outcomes(const Protocol& p, const CanonicalConfiguration& c,
                         std::size_t budget) {
  // explore the reachable graph
  std::vector<CanonicalConfiguration> nodes;
  std::unordered_map<CanonicalConfiguration, int, ConfigHash> index;
  std::vector<std::vector<int>> succ;
  nodes.push_back(c);
  index.emplace(c, 0);
  succ.emplace_back();
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    CanonicalConfiguration cur = nodes[head];
    for (const CanonicalConfiguration& next : neighbours(p, cur, Direction::Forward)) {
      auto [it, inserted] = index.emplace(next, static_cast<int>(nodes.size()));
      if (inserted) {
        if (nodes.size() + 1 > budget) throw BudgetExceeded(nodes.size() + 1);
        nodes.push_back(next);
        succ.emplace_back();
      }
      succ[head].push_back(it->second);
    }
  }

  // iterative Tarjan
  const int n = static_cast<int>(nodes.size());
  std::vector<int> dfn(n, -1), low(n, 0), comp(n, -1);
  std::vector<int> stack, frame_node, frame_edge;
  std::vector<bool> on_stack(n, false);
  int counter = 0, ncomp = 0;
  for (int root = 0; root < n; ++root) {
    if (dfn[root] != -1) continue;
    frame_node.push_back(root);
    frame_edge.push_back(0);
    dfn[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frame_node.empty()) {
      int v = frame_node.back();
      if (frame_edge.back() < static_cast<int>(succ[v].size())) {
        int w = succ[v][frame_edge.back()++];
        if (dfn[w] == -1) {
          dfn[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frame_node.push_back(w);
          frame_edge.push_back(0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], dfn[w]);
        }
      } else {
        if (low[v] == dfn[v]) {
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = ncomp;
            if (w == v) break;
          }
          ++ncomp;
        }
        frame_node.pop_back();
        frame_edge.pop_back();
        if (!frame_node.empty()) {
          int parent = frame_node.back();
          low[parent] = std::min(low[parent], low[v]);
        }
      }
    }
  }

  std::vector<bool> has_exit(ncomp, false);
  for (int v = 0; v < n; ++v)
    for (int w : succ[v])
      if (comp[w] != comp[v]) has_exit[comp[v]] = true;

  std::vector<bool> all_top(ncomp, true), all_bot(ncomp, true);
  for (int v = 0; v < n; ++v) {
    if (!is_consensus(p, nodes[v], OutputValue::Top)) all_top[comp[v]] = false;
    if (!is_consensus(p, nodes[v], OutputValue::Bot)) all_bot[comp[v]] = false;
  }

  OutcomeSet out;
  for (int k = 0; k < ncomp; ++k) {
    if (has_exit[k]) continue;  // only bottom SCCs are fair-run limits
    if (all_top[k]) out.stabilises_top = true;
    if (all_bot[k]) out.stabilises_bot = true;
    if (!all_top[k] && !all_bot[k]) out.never_stabilises = true;
  }
  return out;
}

}  // namespace ppud

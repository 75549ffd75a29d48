#include "ppud/state_space.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace ppud {

namespace {

// multisets (non-decreasing index sequences) of `slots` profiles from pool,
// appended to acc
void multisets_rec(const std::vector<DatumProfile>& pool, std::size_t slots, std::size_t from,
                   std::vector<DatumProfile>& current,
                   const std::function<void(const std::vector<DatumProfile>&)>& emit) {
  if (slots == 0) {
    emit(current);
    return;
  }
  for (std::size_t i = from; i < pool.size(); ++i) {
    current.push_back(pool[i]);
    multisets_rec(pool, slots - 1, i, current, emit);
    current.pop_back();
  }
}

}  // namespace

StateSpace StateSpace::build(const Protocol& p, const Signature& sig, std::size_t node_budget) {
  StateSpace sp;

  // group the signature by datum size
  std::map<std::uint32_t, std::size_t> sizes;  // agents-per-datum -> number of data
  for (std::uint32_t k : sig) sizes[k]++;

  // profiles available per datum size
  std::map<std::uint32_t, std::vector<DatumProfile>> pools;
  for (const auto& [k, cnt] : sizes) {
    std::vector<DatumProfile> pool;
    for (DatumProfile& pr : enumerate_profiles(p.states.size(), k))
      if (pr.total_agents() == k) pool.push_back(std::move(pr));
    pools[k] = std::move(pool);
  }

  // combine one multiset per size group
  std::vector<std::vector<DatumProfile>> partial{{}};
  for (const auto& [k, cnt] : sizes) {
    std::vector<std::vector<DatumProfile>> next;
    const auto& pool = pools[k];
    std::vector<DatumProfile> current;
    multisets_rec(pool, cnt, 0, current, [&](const std::vector<DatumProfile>& chosen) {
      for (const auto& base : partial) {
        std::vector<DatumProfile> merged = base;
        merged.insert(merged.end(), chosen.begin(), chosen.end());
        next.push_back(std::move(merged));
      }
      if (next.size() > node_budget) throw BudgetExceeded(next.size());
    });
    partial = std::move(next);
  }

  for (auto& raw : partial) {
    CanonicalConfiguration c = canonicalize(std::move(raw));
    if (sp.index_.emplace(c, static_cast<int>(sp.configs_.size())).second)
      sp.configs_.push_back(std::move(c));
  }
  if (sp.configs_.size() > node_budget) throw BudgetExceeded(sp.configs_.size());

  const int n = static_cast<int>(sp.configs_.size());
  sp.succ_.resize(n);
  sp.pred_.resize(n);
  for (int i = 0; i < n; ++i) {
    for (const CanonicalConfiguration& next : neighbours(p, sp.configs_[i], Direction::Forward)) {
      const int j = sp.index_of(next);
      sp.succ_[i].push_back(j);
      sp.pred_[j].push_back(i);
    }
  }
  return sp;
}

std::vector<bool> StateSpace::post_star(const std::vector<bool>& seeds) const {
  std::vector<bool> reached = seeds;
  std::vector<int> queue;
  for (int i = 0; i < static_cast<int>(reached.size()); ++i)
    if (reached[i]) queue.push_back(i);
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (int j : succ_[queue[head]])
      if (!reached[j]) {
        reached[j] = true;
        queue.push_back(j);
      }
  return reached;
}

std::vector<bool> StateSpace::pre_star(const std::vector<bool>& seeds) const {
  std::vector<bool> reached = seeds;
  std::vector<int> queue;
  for (int i = 0; i < static_cast<int>(reached.size()); ++i)
    if (reached[i]) queue.push_back(i);
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (int j : pred_[queue[head]])
      if (!reached[j]) {
        reached[j] = true;
        queue.push_back(j);
      }
  return reached;
}

std::vector<DatumProfile> enumerate_profiles(std::size_t state_count, std::uint32_t max_agents) {
  std::vector<StateId> states;
  for (std::size_t q = 0; q < state_count; ++q) states.push_back(static_cast<StateId>(q));
  return enumerate_profiles(states, max_agents);
}

std::vector<DatumProfile> enumerate_profiles(const std::vector<StateId>& states,
                                             std::uint32_t max_agents) {
  std::vector<DatumProfile> out;
  DatumProfile current;
  // distribute 1..max_agents agents over the states, sparse recursion
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t idx,
                                                            std::uint32_t remaining) {
    if (idx == states.size()) {
      if (current.total_agents() >= 1) out.push_back(current);
      return;
    }
    rec(idx + 1, remaining);
    for (std::uint32_t take = 1; take <= remaining; ++take) {
      current.counts.push_back({states[idx], take});
      rec(idx + 1, remaining - take);
      current.counts.pop_back();
    }
  };
  rec(0, max_agents);
  for (DatumProfile& p : out)
    std::sort(p.counts.begin(), p.counts.end());
  std::sort(out.begin(), out.end(),
            [](const DatumProfile& a, const DatumProfile& b) { return compare(a, b) < 0; });
  return out;
}

std::vector<CanonicalConfiguration> enumerate_configurations(
    const std::vector<DatumProfile>& pool, std::uint32_t max_data, bool include_empty) {
  std::vector<CanonicalConfiguration> out;
  std::vector<DatumProfile> current;
  for (std::uint32_t k = include_empty ? 0 : 1; k <= max_data; ++k) {
    multisets_rec(pool, k, 0, current, [&](const std::vector<DatumProfile>& chosen) {
      out.push_back(canonicalize(chosen));
    });
  }
  std::sort(out.begin(), out.end(),
            [](const CanonicalConfiguration& a, const CanonicalConfiguration& b) {
              return enumeration_order(a, b) < 0;
            });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace ppud

#include "ppud/predicates.hpp"

#include <algorithm>
#include <cmath>

namespace ppud {

namespace {

std::shared_ptr<const IntervalPredicate> box(IntervalPredicate p) {
  return std::make_shared<const IntervalPredicate>(std::move(p));
}

}  // namespace

IntervalPredicate operator&&(IntervalPredicate a, IntervalPredicate b) {
  IntervalPredicate p;
  p.kind = IntervalPredicate::Kind::And;
  p.left = box(std::move(a));
  p.right = box(std::move(b));
  return p;
}

IntervalPredicate operator||(IntervalPredicate a, IntervalPredicate b) {
  IntervalPredicate p;
  p.kind = IntervalPredicate::Kind::Or;
  p.left = box(std::move(a));
  p.right = box(std::move(b));
  return p;
}

IntervalPredicate operator!(IntervalPredicate a) {
  IntervalPredicate p;
  p.kind = IntervalPredicate::Kind::Not;
  p.left = box(std::move(a));
  return p;
}

IntervalPredicate predicate_true() { return IntervalPredicate::atom({}); }

IntervalPredicate predicate_false() { return !predicate_true(); }

IntervalPredicate presence(StateId q) {
  SimpleIntervalPredicate s;
  s.width = 1;
  s.bounds.push_back({q, 0, 1, std::nullopt});
  return IntervalPredicate::atom(std::move(s));
}

namespace {

bool profile_fits(const std::vector<IntervalBound>& bounds, std::uint32_t var,
                  const DatumProfile& prof) {
  for (const IntervalBound& b : bounds) {
    if (b.var != var) continue;
    const std::uint64_t n = prof.count(b.state);
    if (n < b.lo) return false;
    if (b.hi && n > *b.hi) return false;
  }
  return true;
}

bool zero_fits(const std::vector<IntervalBound>& bounds, std::uint32_t var) {
  for (const IntervalBound& b : bounds)
    if (b.var == var && b.lo > 0) return false;
  return true;
}

// Kuhn's augmenting-path matching of variables to datum slots.
struct Matcher {
  const std::vector<std::vector<int>>& adj;  // var -> candidate slots
  std::vector<int> slot_owner;               // slot -> var or -1
  std::vector<bool> visited;

  bool augment(int v) {
    for (int s : adj[v]) {
      if (visited[s]) continue;
      visited[s] = true;
      if (slot_owner[s] == -1 || augment(slot_owner[s])) {
        slot_owner[s] = v;
        return true;
      }
    }
    return false;
  }
};

}  // namespace

bool eval_simple(const SimpleIntervalPredicate& psi, const CanonicalConfiguration& c) {
  if (psi.width == 0) return true;

  // Variables compatible with the all-zero profile bind fresh non-appearing
  // data; the rest must be matched injectively to appearing data. Profiles
  // with multiplicity m provide m slots (identical profiles are distinct data).
  std::vector<std::uint32_t> vars;
  for (std::uint32_t v = 0; v < psi.width; ++v)
    if (!zero_fits(psi.bounds, v)) vars.push_back(v);
  if (vars.empty()) return true;

  std::vector<int> slot_profile;  // slot -> profile index
  for (std::uint32_t i = 0; i < c.profiles.size(); ++i) {
    const std::uint32_t take = std::min<std::uint32_t>(c.profiles[i].second, psi.width);
    for (std::uint32_t k = 0; k < take; ++k) slot_profile.push_back(static_cast<int>(i));
  }
  if (vars.size() > slot_profile.size()) return false;

  std::vector<std::vector<int>> adj(vars.size());
  for (std::size_t vi = 0; vi < vars.size(); ++vi)
    for (std::size_t s = 0; s < slot_profile.size(); ++s)
      if (profile_fits(psi.bounds, vars[vi], c.profiles[slot_profile[s]].first))
        adj[vi].push_back(static_cast<int>(s));

  Matcher m{adj, std::vector<int>(slot_profile.size(), -1), {}};
  for (std::size_t vi = 0; vi < vars.size(); ++vi) {
    m.visited.assign(slot_profile.size(), false);
    if (!m.augment(static_cast<int>(vi))) return false;
  }
  return true;
}

bool eval_predicate(const IntervalPredicate& phi, const CanonicalConfiguration& c) {
  switch (phi.kind) {
    case IntervalPredicate::Kind::Leaf:
      return eval_simple(phi.leaf, c);
    case IntervalPredicate::Kind::And:
      return eval_predicate(*phi.left, c) && eval_predicate(*phi.right, c);
    case IntervalPredicate::Kind::Or:
      return eval_predicate(*phi.left, c) || eval_predicate(*phi.right, c);
    case IntervalPredicate::Kind::Not:
      return !eval_predicate(*phi.left, c);
  }
  return false;
}

PredicateMetrics simple_metrics(const SimpleIntervalPredicate& psi) {
  PredicateMetrics m;
  m.width = psi.width;
  for (const IntervalBound& b : psi.bounds) {
    m.height = std::max(m.height, b.lo);
    if (b.hi) m.height = std::max(m.height, *b.hi);
  }
  std::vector<StateId> scope;
  for (const IntervalBound& b : psi.bounds) scope.push_back(b.state);
  std::sort(scope.begin(), scope.end());
  scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
  // |S| * m * ceil(log2(h+1)), with the log term at least 1
  std::uint64_t logterm = 1;
  while ((1ull << logterm) < m.height + 1) ++logterm;
  m.size = static_cast<std::uint64_t>(scope.size()) * psi.width * logterm;
  return m;
}

PredicateMetrics predicate_metrics(const IntervalPredicate& phi) {
  switch (phi.kind) {
    case IntervalPredicate::Kind::Leaf:
      return simple_metrics(phi.leaf);
    case IntervalPredicate::Kind::Not: {
      PredicateMetrics m = predicate_metrics(*phi.left);
      m.size += 1;
      return m;
    }
    default: {
      PredicateMetrics a = predicate_metrics(*phi.left);
      PredicateMetrics b = predicate_metrics(*phi.right);
      return {std::max(a.width, b.width), std::max(a.height, b.height), a.size + b.size + 1};
    }
  }
}

}  // namespace ppud

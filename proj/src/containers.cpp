#include "ppud/containers.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>

#include "ppud/gre.hpp"
#include "ppud/semantics.hpp"

namespace ppud {

NBox box_of(const DatumProfile& profile, std::uint32_t n) {
  if (n < 1) throw std::invalid_argument("box threshold must be at least 1");
  NBox b;
  b.threshold = n;
  for (const auto& [s, c] : profile.counts) b.values.push_back({s, std::min(c, n)});
  return b;
}

Container container_of(const CanonicalConfiguration& c, std::uint32_t n, std::uint32_t m) {
  if (n < 1 || m < 1) throw std::invalid_argument("container thresholds must be at least 1");
  std::map<NBox, std::uint64_t> acc;
  for (const auto& [prof, mult] : c.profiles) acc[box_of(prof, n)] += mult;
  Container cont;
  cont.n = n;
  cont.m = m;
  for (auto& [b, count] : acc)
    cont.counts.push_back({b, static_cast<std::uint32_t>(std::min<std::uint64_t>(count, m))});
  return cont;
}

bool equiv(const CanonicalConfiguration& c1, const CanonicalConfiguration& c2, std::uint32_t n,
           std::uint32_t m) {
  return container_of(c1, n, m) == container_of(c2, n, m);
}

namespace {

// phi_{b,>=m}: at least m pairwise-distinct data match box b exactly
// (value < n pins the count, value n means "at least n").
IntervalPredicate at_least_matching(const NBox& b, std::uint32_t m, std::size_t state_count) {
  SimpleIntervalPredicate s;
  s.width = m;
  for (std::uint32_t j = 0; j < m; ++j) {
    for (std::size_t q = 0; q < state_count; ++q) {
      const std::uint32_t v = b.value(static_cast<StateId>(q));
      IntervalBound bound;
      bound.state = static_cast<StateId>(q);
      bound.var = j;
      bound.lo = v;
      if (v < b.threshold) bound.hi = v;
      s.bounds.push_back(bound);
    }
  }
  return IntervalPredicate::atom(std::move(s));
}

// all boxes over `state_count` states with threshold n, zero box included
void for_each_box(std::size_t state_count, std::uint32_t n,
                  const std::function<void(const NBox&)>& fn) {
  std::vector<std::uint32_t> vals(state_count, 0);
  while (true) {
    NBox b;
    b.threshold = n;
    for (std::size_t q = 0; q < state_count; ++q)
      if (vals[q] > 0) b.values.push_back({static_cast<StateId>(q), vals[q]});
    fn(b);
    std::size_t i = 0;
    while (i < state_count && vals[i] == n) vals[i++] = 0;
    if (i == state_count) break;
    ++vals[i];
  }
}

}  // namespace

IntervalPredicate container_to_predicate(const Container& cont, std::size_t state_count) {
  // conjunction over every nonzero box of the space; the zero-box conjunct is
  // a tautology (every configuration has M non-appearing data) and is omitted
  std::optional<IntervalPredicate> acc;
  for_each_box(state_count, cont.n, [&](const NBox& b) {
    if (b.values.empty()) return;  // zero box
    const std::uint32_t k = cont.count(b);
    IntervalPredicate conjunct =
        k < cont.m ? (k == 0 ? !at_least_matching(b, 1, state_count)
                             : at_least_matching(b, k, state_count) &&
                                   !at_least_matching(b, k + 1, state_count))
                   : at_least_matching(b, cont.m, state_count);
    acc = acc ? (*std::move(acc) && std::move(conjunct)) : std::move(conjunct);
  });
  return acc ? *acc : predicate_true();
}

CanonicalConfiguration representative_of(const Container& cont) {
  std::vector<DatumProfile> raw;
  for (const auto& [b, count] : cont.counts) {
    DatumProfile prof;
    for (const auto& [s, v] : b.values) prof.counts.push_back({s, v});
    for (std::uint32_t k = 0; k < count; ++k) raw.push_back(prof);
  }
  return canonicalize(std::move(raw));
}

std::vector<Container> predicate_to_containers(const IntervalPredicate& phi,
                                               std::size_t state_count, std::uint32_t n,
                                               std::uint32_t m, std::size_t container_budget) {
  const PredicateMetrics metrics = predicate_metrics(phi);
  if (metrics.height > n)
    throw std::invalid_argument("container threshold n is below the predicate height");
  if (metrics.width > m)
    throw std::invalid_argument("container threshold M is below the predicate width");

  std::vector<NBox> boxes;
  for_each_box(state_count, n, [&](const NBox& b) {
    if (!b.values.empty()) boxes.push_back(b);
  });
  std::sort(boxes.begin(), boxes.end());  // canonical counts order

  // container space size (m+1)^#boxes against the budget, without overflow
  BigInt space = 1;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    space *= (m + 1);
    if (space > container_budget) throw BudgetExceeded(static_cast<std::size_t>(container_budget));
  }

  std::vector<Container> out;
  std::vector<std::uint32_t> counts(boxes.size(), 0);
  while (true) {
    Container cont;
    cont.n = n;
    cont.m = m;
    for (std::size_t i = 0; i < boxes.size(); ++i)
      if (counts[i] > 0) cont.counts.push_back({boxes[i], counts[i]});
    if (eval_predicate(phi, representative_of(cont))) out.push_back(cont);
    std::size_t i = 0;
    while (i < boxes.size() && counts[i] == m) counts[i++] = 0;
    if (i == boxes.size()) break;
    ++counts[i];
  }
  return out;
}

BigInt poly1(std::size_t s) {
  const BigInt bs = s;
  return (1 + bs * bs * bs) * bs;
}

BigInt poly2(std::size_t s) {
  const BigInt bs = s;
  const BigInt s2 = bs * bs;
  return s2 * s2 * bs + s2 * s2 + s2 * bs + s2 + 2 * bs + 2;
}

BigInt poly12(std::size_t s) { return poly1(s) * poly2(s); }

BigInt bound_f(std::size_t protocol_size, const BigInt& n) {
  const BigInt p = protocol_size;
  return (n + p * p * p) * p;
}

namespace {

BigInt pow_big(const BigInt& base, const BigInt& exp) {
  BigInt result = 1, b = base, e = exp;
  while (e > 0) {
    if ((e & 1) != 0) result *= b;
    b *= b;
    e >>= 1;
  }
  return result;
}

}  // namespace

BigInt bound_g(std::size_t protocol_size, const BigInt& n, const BigInt& m) {
  const BigInt p = protocol_size;
  const BigInt p3 = p * p * p;
  return (m + pow_big(p3 + 1, p3 + p * p)) * pow_big(n + 1, p);
}

BoundReport bound_report(const Protocol& p, const GreNode& e, std::uint32_t n, std::uint32_t m) {
  BoundReport r;
  const std::size_t s = p.size();
  const BigInt len = gre_length(e);
  const BigInt norm = gre_norm(e);

  r.f_value = bound_f(s, n);
  r.g_value = bound_g(s, n, m);
  r.alpha = norm * pow_big(poly1(s), len);
  r.beta = pow_big(norm, poly12(s) * len * len);
  // Thm-style witness bound: alpha * |P| * |Boxes_alpha| * beta
  r.witness_agent_bound = r.alpha * BigInt(s) * pow_big(r.alpha + 1, BigInt(s)) * r.beta;
  return r;
}

}  // namespace ppud

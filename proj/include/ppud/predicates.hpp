#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "ppud/configuration.hpp"

namespace ppud {

// One interval constraint #(state, var) in [lo, hi]; hi empty means +infinity.
struct IntervalBound {
  StateId state = -1;
  std::uint32_t var = 0;  // 0-based variable index, < width
  std::uint64_t lo = 0;
  std::optional<std::uint64_t> hi;  // nullopt = unbounded

  bool operator==(const IntervalBound&) const = default;
};

// Dotted-existential over `width` pairwise-distinct data; a configuration
// satisfies it iff the variables can be injectively assigned to data (of the
// whole infinite domain, so variables whose constraints admit the all-zero
// profile may bind non-appearing data) meeting every listed bound.
// Unlisted (state, var) pairs are unconstrained.
struct SimpleIntervalPredicate {
  std::uint32_t width = 0;
  std::vector<IntervalBound> bounds;

  bool operator==(const SimpleIntervalPredicate&) const = default;
};

struct IntervalPredicate {
  enum class Kind : std::uint8_t { Leaf, And, Or, Not };
  Kind kind = Kind::Leaf;
  SimpleIntervalPredicate leaf;
  std::shared_ptr<const IntervalPredicate> left, right;  // Not uses left only

  static IntervalPredicate atom(SimpleIntervalPredicate s) {
    IntervalPredicate p;
    p.kind = Kind::Leaf;
    p.leaf = std::move(s);
    return p;
  }
};

IntervalPredicate operator&&(IntervalPredicate a, IntervalPredicate b);
IntervalPredicate operator||(IntervalPredicate a, IntervalPredicate b);
IntervalPredicate operator!(IntervalPredicate a);

// width-0 predicate: satisfied by every configuration including the empty one
IntervalPredicate predicate_true();
// its negation
IntervalPredicate predicate_false();
// some datum has at least one agent in q
IntervalPredicate presence(StateId q);

bool eval_simple(const SimpleIntervalPredicate& psi, const CanonicalConfiguration& c);
bool eval_predicate(const IntervalPredicate& phi, const CanonicalConfiguration& c);

struct PredicateMetrics {
  std::uint64_t width = 0;
  std::uint64_t height = 0;
  std::uint64_t size = 0;
};

PredicateMetrics predicate_metrics(const IntervalPredicate& phi);
PredicateMetrics simple_metrics(const SimpleIntervalPredicate& psi);

}  // namespace ppud

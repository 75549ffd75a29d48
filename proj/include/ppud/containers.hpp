#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

#include "ppud/configuration.hpp"
#include "ppud/predicates.hpp"

namespace ppud {

struct GreNode;  // gre.hpp

using BigInt = boost::multiprecision::cpp_int;

// Per-datum state counts truncated at the threshold; zero values omitted.
struct NBox {
  std::uint32_t threshold = 1;
  std::vector<std::pair<StateId, std::uint32_t>> values;  // sorted, values in [1, threshold]

  std::uint32_t value(StateId q) const {
    for (const auto& [s, v] : values)
      if (s == q) return v;
    return 0;
  }

  bool operator==(const NBox&) const = default;
  auto operator<=>(const NBox&) const = default;
};

// Datum counts per realised box, truncated at M. The all-zero box is never
// stored: every configuration has M non-appearing data mapped to it.
struct Container {
  std::uint32_t n = 1;
  std::uint32_t m = 1;
  std::vector<std::pair<NBox, std::uint32_t>> counts;  // sorted by box, counts in [1, M]

  std::uint32_t count(const NBox& b) const {
    for (const auto& [bx, c] : counts)
      if (bx == b) return c;
    return 0;
  }

  bool operator==(const Container&) const = default;
  auto operator<=>(const Container&) const = default;
};

NBox box_of(const DatumProfile& profile, std::uint32_t n);
Container container_of(const CanonicalConfiguration& c, std::uint32_t n, std::uint32_t m);

// Container equality of the two configurations (the \equiv_{n,M} relation).
bool equiv(const CanonicalConfiguration& c1, const CanonicalConfiguration& c2, std::uint32_t n,
           std::uint32_t m);

// The predicate whose models are exactly the container's equivalence class;
// height <= n and width <= M. Needs the protocol's state count to range over
// the full box space.
IntervalPredicate container_to_predicate(const Container& cont, std::size_t state_count);

// One configuration inside the container's class: count(b) fresh data per box,
// each with the box's values as exact agent counts.
CanonicalConfiguration representative_of(const Container& cont);

// Exact set of containers whose union is the model set of phi, by enumerating
// the (n,M)-container space and testing one representative per class.
// Requires n >= height(phi), M >= width(phi). Throws BudgetExceeded when the
// space exceeds `container_budget` containers.
std::vector<Container> predicate_to_containers(const IntervalPredicate& phi,
                                               std::size_t state_count, std::uint32_t n,
                                               std::uint32_t m,
                                               std::size_t container_budget = 1'000'000);

// Margin functions for reachability over equivalence classes, and the
// instantiated polynomials backing the container bounds of reach expressions.
BigInt bound_f(std::size_t protocol_size, const BigInt& n);
BigInt bound_g(std::size_t protocol_size, const BigInt& n, const BigInt& m);
BigInt poly1(std::size_t s);  // (1 + s^3) * s
BigInt poly2(std::size_t s);  // s^5 + s^4 + s^3 + s^2 + 2s + 2
BigInt poly12(std::size_t s);  // poly1 * poly2

struct BoundReport {
  BigInt f_value;
  BigInt g_value;
  BigInt alpha;
  BigInt beta;
  BigInt witness_agent_bound;
};

// f(n), g(n,M) for the given thresholds plus alpha(P,E,E), beta(P,E,E) and
// the witness agent bound alpha * |P| * |Boxes_alpha| * beta. Exact integers;
// reported, never used as search bounds.
BoundReport bound_report(const Protocol& p, const GreNode& e, std::uint32_t n, std::uint32_t m);

}  // namespace ppud

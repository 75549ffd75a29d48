#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "ppud/protocol.hpp"

namespace ppud {

// Per-datum state counts, sparse and sorted by state; counts are positive.
struct DatumProfile {
  std::vector<std::pair<StateId, std::uint32_t>> counts;

  std::uint32_t count(StateId q) const {
    for (const auto& [s, c] : counts)
      if (s == q) return c;
    return 0;
  }

  std::uint32_t total_agents() const {
    std::uint32_t t = 0;
    for (const auto& [s, c] : counts) t += c;
    return t;
  }

  void add(StateId q, std::int64_t delta);  // keeps entries sorted, drops zeros

  bool operator==(const DatumProfile&) const = default;
};

// Lexicographic over the dense count vector in state order: the first state
// where the profiles differ decides, larger count compares greater.
std::strong_ordering compare(const DatumProfile& a, const DatumProfile& b);

inline std::strong_ordering operator<=>(const DatumProfile& a, const DatumProfile& b) {
  return compare(a, b);
}

// Datum-anonymous configuration: multiset of profiles in canonical order
// (ascending profile, multiplicities merged). Two configurations are equal
// iff their canonical forms are identical.
struct CanonicalConfiguration {
  std::vector<std::pair<DatumProfile, std::uint32_t>> profiles;

  bool empty() const { return profiles.empty(); }

  std::size_t datum_count() const {
    std::size_t n = 0;
    for (const auto& [p, m] : profiles) n += m;
    return n;
  }

  std::size_t agent_count() const {
    std::size_t n = 0;
    for (const auto& [p, m] : profiles) n += static_cast<std::size_t>(p.total_agents()) * m;
    return n;
  }

  bool operator==(const CanonicalConfiguration&) const = default;
};

std::strong_ordering compare(const CanonicalConfiguration& a, const CanonicalConfiguration& b);

inline std::strong_ordering operator<=>(const CanonicalConfiguration& a,
                                        const CanonicalConfiguration& b) {
  return compare(a, b);
}

// Builds the canonical form from an arbitrary list of per-datum profiles.
// Profiles with no agents are dropped; input order is irrelevant.
CanonicalConfiguration canonicalize(std::vector<DatumProfile> raw);

// Sorted multiset of per-datum agent counts; preserved by every step.
using Signature = std::vector<std::uint32_t>;

Signature signature_of(const CanonicalConfiguration& c);

struct ConfigHash {
  std::size_t operator()(const CanonicalConfiguration& c) const;
};

// Total-agent count first, then datum count, then canonical order.
// This is the enumeration order used by emptiness searches.
std::strong_ordering enumeration_order(const CanonicalConfiguration& a,
                                       const CanonicalConfiguration& b);

}  // namespace ppud

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ppud/predicates.hpp"
#include "ppud/protocol.hpp"
#include "ppud/semantics.hpp"

namespace ppud {

// Expression tree over interval-predicate atoms, closed under union,
// complement, Post* and Pre*.
struct GreNode {
  enum class Kind : std::uint8_t { Atom, Union, Complement, PostStar, PreStar };
  Kind kind = Kind::Atom;
  IntervalPredicate atom;
  std::shared_ptr<const GreNode> left, right;  // unary nodes use left only
};

using Gre = std::shared_ptr<const GreNode>;

Gre gre_atom(IntervalPredicate phi);
Gre gre_union(Gre a, Gre b);
Gre gre_complement(Gre a);
Gre gre_post_star(Gre a);
Gre gre_pre_star(Gre a);
Gre gre_intersect(Gre a, Gre b);  // complement(union(complement, complement))

std::uint64_t gre_length(const GreNode& e);  // operator count
std::uint64_t gre_norm(const GreNode& e);    // max of atom widths and heights

struct SearchBounds {
  std::uint32_t max_data = 1;
  std::uint32_t max_agents_per_datum = 1;
  bool include_empty = true;
  std::size_t node_budget = kDefaultNodeBudget;
};

struct Verdict {
  enum class Kind : std::uint8_t { Empty, NonEmpty, Inconclusive };
  Kind kind = Kind::Empty;
  SearchBounds bounds;
  std::optional<CanonicalConfiguration> witness;  // NonEmpty only
  std::string report;                             // Inconclusive detail

  bool empty() const { return kind == Kind::Empty; }
  bool nonempty() const { return kind == Kind::NonEmpty; }
};

// Membership of c in the model set of e, evaluated over the finite space of
// configurations sharing c's signature (steps preserve signatures, so Post*
// and Pre* never leave it). Throws BudgetExceeded when that space outgrows
// the budget.
bool member(const Protocol& p, const GreNode& e, const CanonicalConfiguration& c,
            std::size_t node_budget = kDefaultNodeBudget);

// Enumerates configurations with at most max_data data and max_agents_per_datum
// agents per datum in (total agents, datum count, canonical) order; returns the
// first member as NonEmpty, Empty(up to bounds) otherwise, Inconclusive on
// budget exhaustion. Empty is complete only up to the bounds.
Verdict emptiness(const Protocol& p, const GreNode& e, const SearchBounds& b);

// The b-consensus atom: no agent occupies a state with the other output.
Gre build_output_gre(const Protocol& p, OutputValue b);
// Stable b-consensus, complement(Pre*(complement(Output_b))): configurations
// whose every run stays a b-consensus.
Gre build_stable_gre(const Protocol& p, OutputValue b);
// Initial-configuration atom: every agent occupies an initial state.
Gre build_initial_gre(const Protocol& p);
// E_ws: initial configurations from which, for both b, a configuration
// outside Pre*(Stable_b) stays reachable. Empty iff well-specified.
Gre build_wellspec_gre(const Protocol& p);

struct CorrectnessVerdict {
  Verdict top_branch;  // counterexamples against stabilising to top
  Verdict bot_branch;
  bool correct() const { return top_branch.empty() && bot_branch.empty(); }
};

// Whether p computes phi: per output value b, emptiness of
// (Init ∧ phi^{-1}(b)) ∩ Pre*(complement(Pre*(Stable_b))).
CorrectnessVerdict check_correctness(const Protocol& p, const IntervalPredicate& phi,
                                     const SearchBounds& b);

// Emptiness of e1 ∩ Pre*(e2): can some configuration of e1 reach e2?
Verdict check_set_reachability(const Protocol& p, const Gre& e1, const Gre& e2,
                               const SearchBounds& b);

// Emptiness of Post*(source) ∩ complement(Pre*(home)); source defaults to the
// initial-configuration atom.
Verdict check_home_space(const Protocol& p, const Gre& home, const SearchBounds& b,
                         const Gre& source = nullptr);

}  // namespace ppud

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppud/configuration.hpp"
#include "ppud/protocol.hpp"

namespace ppud {

// One concrete step in a canonical configuration: the transition plus the
// profile entries supplying the two distinct acting agents. Eq guards force
// both selectors equal (one datum); Neq guards pick an ordered pair of data
// (the same entry twice is legal when its multiplicity is >= 2).
struct StepInstance {
  std::uint32_t transition = 0;
  std::uint32_t first_profile = 0;   // datum of the agent on (q1 -> q3)
  std::uint32_t second_profile = 0;  // datum of the agent on (q2 -> q4)
  bool same_datum = false;

  bool operator==(const StepInstance&) const = default;
};

enum class Direction { Forward, Backward };

struct BudgetExceeded : std::runtime_error {
  std::size_t explored;
  explicit BudgetExceeded(std::size_t n)
      : std::runtime_error("node budget exceeded after exploring " + std::to_string(n) +
                           " configurations"),
        explored(n) {}
};

inline constexpr std::size_t kDefaultNodeBudget = 5'000'000;

// All enabled non-idle steps (transitions with (q3,q4) == (q1,q2) are never
// enumerated; every configuration implicitly loops on itself).
std::vector<StepInstance> enabled_steps(const Protocol& p, const CanonicalConfiguration& c);

// Applies an enabled step; throws std::invalid_argument naming the violated
// precondition otherwise. Idle instances over explicit self-loop transitions
// are accepted and return c unchanged.
CanonicalConfiguration apply_step(const Protocol& p, const CanonicalConfiguration& c,
                                  const StepInstance& s);

// Deduplicated successor (Forward) or predecessor (Backward) configurations.
std::vector<CanonicalConfiguration> neighbours(const Protocol& p,
                                               const CanonicalConfiguration& c,
                                               Direction dir);

// Post*(c) or Pre*(c) over the finite signature space, by BFS. Always
// contains c. Throws BudgetExceeded when more than `budget` configurations
// are discovered.
std::vector<CanonicalConfiguration> reach_set(const Protocol& p,
                                              const CanonicalConfiguration& c, Direction dir,
                                              std::size_t budget = kDefaultNodeBudget);

struct OutcomeSet {
  bool stabilises_top = false;
  bool stabilises_bot = false;
  bool never_stabilises = false;

  bool operator==(const OutcomeSet&) const = default;
  bool singleton() const {
    return (stabilises_top + stabilises_bot + never_stabilises) == 1;
  }
};

// Exact set of fair-run outcomes from c: every bottom SCC of the reachable
// graph contributes StabilisesTop / StabilisesBot / NeverStabilises according
// to whether all of its configurations are top-consensus, bot-consensus, or
// neither. The empty configuration reports both consensus outcomes.
OutcomeSet fair_outcomes(const Protocol& p, const CanonicalConfiguration& c,
                         std::size_t budget = kDefaultNodeBudget);

bool is_consensus(const Protocol& p, const CanonicalConfiguration& c, OutputValue b);

// Reverses every transition; Backward reachability is Forward reachability
// of the reversed protocol (guards are symmetric in the agents' data).
Protocol reversed(const Protocol& p);

}  // namespace ppud

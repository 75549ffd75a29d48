#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ppud {

using StateId = std::int32_t;

enum class Guard : std::uint8_t { Eq, Neq };

enum class OutputValue : std::uint8_t { Bot = 0, Top = 1 };

// Pairwise transition ((q1,q2), guard, (q3,q4)): the first agent moves
// q1 -> q3, the second q2 -> q4. Immediate-observation transitions have
// q3 == q1 (the first agent is the passive, observed one).
struct Transition {
  StateId q1 = -1;
  StateId q2 = -1;
  Guard guard = Guard::Eq;
  StateId q3 = -1;
  StateId q4 = -1;

  bool operator==(const Transition&) const = default;
};

struct Protocol {
  std::vector<std::string> states;  // index is the StateId
  std::vector<Transition> transitions;
  std::vector<StateId> initial;          // sorted, unique
  std::vector<OutputValue> output;       // one entry per state

  std::size_t size() const { return states.size(); }  // |P| = |Q|

  std::optional<StateId> state_index(std::string_view name) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == name) return static_cast<StateId>(i);
    return std::nullopt;
  }

  bool is_initial(StateId q) const {
    for (StateId i : initial)
      if (i == q) return true;
    return false;
  }
};

// Empty list iff all Protocol invariants hold; one message per violation.
std::vector<std::string> validate_protocol(const Protocol& p);

// True iff every transition leaves the first agent in place (q3 == q1).
bool is_immediate_observation(const Protocol& p);

}  // namespace ppud

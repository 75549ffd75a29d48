#include "ppud/protocol.hpp"

#include <set>
#include <string>

namespace ppud {

std::vector<std::string> validate_protocol(const Protocol& p) {
  std::vector<std::string> out;
  const auto n = static_cast<StateId>(p.states.size());

  if (p.states.empty()) out.push_back("protocol has no states");

  std::set<std::string> seen;
  for (const auto& name : p.states)
    if (!seen.insert(name).second)
      out.push_back("duplicate state name '" + name + "'");

  auto in_range = [n](StateId q) { return q >= 0 && q < n; };

  for (std::size_t i = 0; i < p.transitions.size(); ++i) {
    const Transition& t = p.transitions[i];
    for (StateId q : {t.q1, t.q2, t.q3, t.q4}) {
      if (!in_range(q)) {
        out.push_back("transition " + std::to_string(i) + " references unknown state index " +
                      std::to_string(q));
        break;
      }
    }
  }

  if (p.initial.empty()) out.push_back("initial state set is empty");
  for (StateId q : p.initial)
    if (!in_range(q))
      out.push_back("initial set references unknown state index " + std::to_string(q));

  if (p.output.size() != p.states.size())
    out.push_back("output map is not total: " + std::to_string(p.output.size()) +
                  " entries for " + std::to_string(p.states.size()) + " states");

  return out;
}

bool is_immediate_observation(const Protocol& p) {
  for (const Transition& t : p.transitions)
    if (t.q3 != t.q1) return false;
  return true;
}

}  // namespace ppud

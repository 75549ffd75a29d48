#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppud/configuration.hpp"
#include "ppud/protocol.hpp"

namespace ppud {

using AgentId = std::uint32_t;
using DatumId = std::uint32_t;

struct RunAgent {
  AgentId id = 0;
  DatumId datum = 0;
  StateId start = -1;
};

// One immediate-observation step: the actor moves along `transition`, the
// observed agent supplies the transition's passive state and does not move.
struct RunStep {
  std::uint32_t transition = 0;
  AgentId actor = 0;
  AgentId observed = 0;

  bool operator==(const RunStep&) const = default;
};

// Agent-identified finite run of an immediate-observation protocol. Agent and
// datum ids are stable labels (not dense indices); names are serialisation
// sugar kept per id when known.
struct ConcreteRun {
  std::vector<RunAgent> agents;  // sorted by id, ids unique
  std::vector<RunStep> steps;
  std::map<AgentId, std::string> agent_names;
  std::map<DatumId, std::string> datum_names;

  const RunAgent* find_agent(AgentId id) const {
    for (const RunAgent& a : agents)
      if (a.id == id) return &a;
    return nullptr;
  }

  AgentId fresh_agent_id() const {
    AgentId m = 0;
    for (const RunAgent& a : agents) m = std::max(m, a.id + 1);
    return m;
  }

  DatumId fresh_datum_id() const {
    DatumId m = 0;
    for (const RunAgent& a : agents) m = std::max(m, a.datum + 1);
    return m;
  }
};

struct RunCheckResult {
  bool ok = false;
  std::size_t bad_step = 0;  // 0-based index of the first invalid step
  std::string reason;
  CanonicalConfiguration end;                    // valid runs only
  std::map<AgentId, StateId> end_states;         // valid runs only
  std::vector<std::map<AgentId, StateId>> states;  // per configuration, 0..steps
};

// Replays the run; on failure reports the first invalid step and why.
// The protocol must be immediate observation.
RunCheckResult check_run(const Protocol& p, const ConcreteRun& r);

CanonicalConfiguration start_configuration(const ConcreteRun& r);

// Per-datum counts of agents by (start state, end state) pair.
struct Trace {
  std::map<std::pair<StateId, StateId>, std::uint32_t> counts;
  bool operator==(const Trace&) const = default;
  auto operator<=>(const Trace&) const = default;
};

// Counts by (start, state at configuration i, end) triple.
struct SplitTrace {
  std::map<std::tuple<StateId, StateId, StateId>, std::uint32_t> counts;
  bool operator==(const SplitTrace&) const = default;
  auto operator<=>(const SplitTrace&) const = default;
};

Trace trace_of(const Protocol& p, const ConcreteRun& r, DatumId d);

// i is the 1-based configuration index, 1 <= i <= |steps| + 1.
SplitTrace split_trace_of(const Protocol& p, const ConcreteRun& r, DatumId d, std::size_t i);

}  // namespace ppud

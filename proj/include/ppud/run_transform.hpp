#pragma once

#include "ppud/runs.hpp"

namespace ppud {

// Adds `fresh` (same datum as `a`, not in the run) duplicating every step of
// `a` immediately after it, observing the same agent. All original agents
// keep their start and end states; fresh starts and ends where `a` does and
// is never observed.
ConcreteRun agent_copycat(const Protocol& p, const ConcreteRun& r, AgentId a, AgentId fresh);

// Shrinks every (datum, start, end) class to at most |Q| agents, keeping all
// realised classes realised and at most |Q|^3 agents per datum. Surviving
// agents keep their start and end states.
ConcreteRun agents_core(const Protocol& p, const ConcreteRun& r);

// Adds a fresh datum whose agents mirror the d-agents: equality steps are
// duplicated inside the fresh datum, disequality steps re-observe the
// original observed agent. The fresh datum has the trace of d and is never
// externally observed.
ConcreteRun data_copycat(const Protocol& p, const ConcreteRun& r, DatumId d, DatumId fresh_datum);

// Shrinks every trace class to at most (K+1)^{|Q|^3} data via split-trace
// representatives; requires every datum to have at most K agents. Surviving
// data keep their agents' start and end states; every realised trace remains
// realised; at most (K+1)^{|Q|^3+|Q|^2} data remain.
ConcreteRun data_core(const Protocol& p, const ConcreteRun& r, std::uint32_t K);

// agents_core, then data_core with K = |Q|^3, then re-adds the removed data
// and agents by copycats. Start and end configurations are unchanged
// agent-for-agent; at most |Q|^3 observed agents per datum and at most
// (|Q|^3+1)^{|Q|^3+|Q|^2} externally observed data.
ConcreteRun normalize_run(const Protocol& p, const ConcreteRun& r);

// Observation statistics used by the normalization bounds.
struct ObservationStats {
  std::map<DatumId, std::uint32_t> observed_agents_per_datum;
  std::uint32_t externally_observed_data = 0;
};

ObservationStats observation_stats(const Protocol& p, const ConcreteRun& r);

}  // namespace ppud

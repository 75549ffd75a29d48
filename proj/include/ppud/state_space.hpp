#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "ppud/configuration.hpp"
#include "ppud/protocol.hpp"
#include "ppud/semantics.hpp"

namespace ppud {

// All canonical configurations sharing one signature, with the step relation.
// Steps preserve signatures, so Post*/Pre* closures stay inside the space.
class StateSpace {
 public:
  static StateSpace build(const Protocol& p, const Signature& sig, std::size_t node_budget);

  const std::vector<CanonicalConfiguration>& configs() const { return configs_; }
  const std::vector<std::vector<int>>& successors() const { return succ_; }
  const std::vector<std::vector<int>>& predecessors() const { return pred_; }

  int index_of(const CanonicalConfiguration& c) const {
    auto it = index_.find(c);
    return it == index_.end() ? -1 : it->second;
  }

  // forward closure: everything reachable from the seed set
  std::vector<bool> post_star(const std::vector<bool>& seeds) const;
  // backward closure: everything that can reach the seed set
  std::vector<bool> pre_star(const std::vector<bool>& seeds) const;

 private:
  std::vector<CanonicalConfiguration> configs_;
  std::unordered_map<CanonicalConfiguration, int, ConfigHash> index_;
  std::vector<std::vector<int>> succ_;
  std::vector<std::vector<int>> pred_;
};

// All profiles with 1..max_agents agents over the protocol's states,
// in canonical profile order.
std::vector<DatumProfile> enumerate_profiles(std::size_t state_count, std::uint32_t max_agents);

// Profiles over a restricted state set (e.g. the initial states).
std::vector<DatumProfile> enumerate_profiles(const std::vector<StateId>& states,
                                             std::uint32_t max_agents);

// All canonical configurations with at most max_data data drawn from the given
// profile pool, sorted in enumeration order. include_empty controls whether
// the empty configuration is produced.
std::vector<CanonicalConfiguration> enumerate_configurations(
    const std::vector<DatumProfile>& pool, std::uint32_t max_data, bool include_empty);

}  // namespace ppud

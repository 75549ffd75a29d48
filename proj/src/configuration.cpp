#include "ppud/configuration.hpp"

#include <algorithm>

namespace ppud {

void DatumProfile::add(StateId q, std::int64_t delta) {
  if (delta == 0) return;
  auto it = std::lower_bound(counts.begin(), counts.end(), q,
                             [](const auto& e, StateId s) { return e.first < s; });
  if (it != counts.end() && it->first == q) {
    std::int64_t v = static_cast<std::int64_t>(it->second) + delta;
    if (v < 0) v = 0;  // callers check enabledness; clamp keeps the invariant
    if (v == 0)
      counts.erase(it);
    else
      it->second = static_cast<std::uint32_t>(v);
  } else if (delta > 0) {
    counts.insert(it, {q, static_cast<std::uint32_t>(delta)});
  }
}

std::strong_ordering compare(const DatumProfile& a, const DatumProfile& b) {
  std::size_t i = 0, j = 0;
  while (i < a.counts.size() && j < b.counts.size()) {
    const auto& [sa, ca] = a.counts[i];
    const auto& [sb, cb] = b.counts[j];
    if (sa == sb) {
      if (ca != cb) return ca < cb ? std::strong_ordering::less : std::strong_ordering::greater;
      ++i;
      ++j;
    } else if (sa < sb) {
      // a has a positive count where b has zero at the earliest differing state
      return std::strong_ordering::greater;
    } else {
      return std::strong_ordering::less;
    }
  }
  if (i < a.counts.size()) return std::strong_ordering::greater;
  if (j < b.counts.size()) return std::strong_ordering::less;
  return std::strong_ordering::equal;
}

std::strong_ordering compare(const CanonicalConfiguration& a, const CanonicalConfiguration& b) {
  const std::size_t n = std::min(a.profiles.size(), b.profiles.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto c = compare(a.profiles[i].first, b.profiles[i].first);
    if (c != std::strong_ordering::equal) return c;
    if (a.profiles[i].second != b.profiles[i].second)
      return a.profiles[i].second < b.profiles[i].second ? std::strong_ordering::less
                                                         : std::strong_ordering::greater;
  }
  if (a.profiles.size() != b.profiles.size())
    return a.profiles.size() < b.profiles.size() ? std::strong_ordering::less
                                                 : std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

CanonicalConfiguration canonicalize(std::vector<DatumProfile> raw) {
  std::erase_if(raw, [](const DatumProfile& p) { return p.counts.empty(); });
  std::sort(raw.begin(), raw.end(),
            [](const DatumProfile& a, const DatumProfile& b) { return compare(a, b) < 0; });
  CanonicalConfiguration c;
  for (auto& p : raw) {
    if (!c.profiles.empty() && c.profiles.back().first == p)
      ++c.profiles.back().second;
    else
      c.profiles.push_back({std::move(p), 1});
  }
  return c;
}

Signature signature_of(const CanonicalConfiguration& c) {
  Signature sig;
  for (const auto& [p, m] : c.profiles) {
    const std::uint32_t t = p.total_agents();
    for (std::uint32_t i = 0; i < m; ++i) sig.push_back(t);
  }
  std::sort(sig.begin(), sig.end());
  return sig;
}

std::size_t ConfigHash::operator()(const CanonicalConfiguration& c) const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (const auto& [p, m] : c.profiles) {
    for (const auto& [s, cnt] : p.counts) {
      mix(static_cast<std::uint64_t>(s) + 0x9e3779b97f4a7c15ull);
      mix(cnt);
    }
    mix(0xfeedull);
    mix(m);
  }
  return static_cast<std::size_t>(h);
}

std::strong_ordering enumeration_order(const CanonicalConfiguration& a,
                                       const CanonicalConfiguration& b) {
  if (a.agent_count() != b.agent_count())
    return a.agent_count() < b.agent_count() ? std::strong_ordering::less
                                             : std::strong_ordering::greater;
  if (a.datum_count() != b.datum_count())
    return a.datum_count() < b.datum_count() ? std::strong_ordering::less
                                             : std::strong_ordering::greater;
  return compare(a, b);
}

}  // namespace ppud

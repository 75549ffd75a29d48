#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppud/configuration.hpp"
#include "ppud/containers.hpp"
#include "ppud/gre.hpp"
#include "ppud/predicates.hpp"
#include "ppud/protocol.hpp"
#include "ppud/reductions.hpp"
#include "ppud/runs.hpp"

namespace ppud {

struct Diagnostic {
  std::size_t line = 0;  // 1-based
  std::size_t col = 0;   // 1-based
  std::string message;

  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(col) + ": " + message;
  }
};

template <typename T>
struct ParseResult {
  std::optional<T> value;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return value.has_value() && diagnostics.empty(); }
};

ParseResult<Protocol> parse_protocol(const std::string& text);
ParseResult<CanonicalConfiguration> parse_config(const std::string& text, const Protocol& p);
ParseResult<IntervalPredicate> parse_predicate(const std::string& text, const Protocol& p);
ParseResult<Gre> parse_gre(const std::string& text, const Protocol& p);
ParseResult<ConcreteRun> parse_run(const std::string& text, const Protocol& p);
ParseResult<CounterMachine> parse_cm(const std::string& text);
ParseResult<Container> parse_container(const std::string& text, const Protocol& p);

std::string serialize_protocol(const Protocol& p);
std::string serialize_config(const CanonicalConfiguration& c, const Protocol& p);
std::string serialize_predicate(const IntervalPredicate& phi, const Protocol& p);
std::string serialize_gre(const GreNode& e, const Protocol& p);
std::string serialize_run(const ConcreteRun& r, const Protocol& p);
std::string serialize_cm(const CounterMachine& m);
std::string serialize_container(const Container& cont, const Protocol& p);

std::string serialize_trace(const Trace& tr, const Protocol& p);
std::string serialize_split_trace(const SplitTrace& st, const Protocol& p);

}  // namespace ppud

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppud/configuration.hpp"
#include "ppud/protocol.hpp"

namespace ppud {

enum class Counter : std::uint8_t { X, Y };

struct Instruction {
  enum class Op : std::uint8_t { Inc, Dec, ZeroTest, Halt };
  Op op = Op::Halt;
  Counter counter = Counter::X;
  std::uint32_t target = 0;  // ZeroTest jump target, 1-based instruction index
};

struct CounterMachine {
  std::vector<Instruction> instructions;
};

// Empty iff valid: at least one instruction, Halt appears, ZeroTest targets in
// range, and every non-Halt instruction has a successor.
std::vector<std::string> validate_machine(const CounterMachine& m);

// Phase of the counter-control agent.
enum class CounterOp : std::uint8_t { Idle, Inc, Dec, Done, ZeroTest, EqZero, GtZero };

struct StateRole {
  enum class Kind : std::uint8_t {
    Instruction,
    InstructionPrimed,
    CounterX,
    CounterY,
    CounterControl,
    Reservoir,
    Uniq,
    SinkBot
  };
  Kind kind = Kind::Reservoir;
  std::uint32_t instruction = 0;  // Instruction / InstructionPrimed, 1-based
  Counter counter = Counter::X;   // CounterControl
  CounterOp op = CounterOp::Idle;  // CounterControl
  bool started_in_reservoir = false;
};

struct CompiledProtocol {
  Protocol protocol;
  std::vector<StateRole> roles;  // one per state

  StateId state(StateRole::Kind kind, bool started_in_reservoir, std::uint32_t instruction = 0,
                Counter c = Counter::X, CounterOp op = CounterOp::Idle) const;
  StateId sink(bool started_in_reservoir) const {
    return state(StateRole::Kind::SinkBot, started_in_reservoir);
  }
};

// The protocol over Q_main x {started-in-reservoir, started-elsewhere} with
// the simulation and violation-detection transition families; the same-datum
// input-violation rule overwrites every other transition between two
// started-elsewhere states.
CompiledProtocol compile_2cm(const CounterMachine& m);

// Violation-free initial configuration: one agent on the first instruction,
// one on each idle counter control, `uniq_data` data with one uniqueness
// agent each (all with fresh pairwise-distinct data), and
// `reservoir_per_datum` reservoir agents attached to every datum.
CanonicalConfiguration initial_config_2cm(const CompiledProtocol& cp, std::uint32_t uniq_data,
                                          std::uint32_t reservoir_per_datum);

}  // namespace ppud

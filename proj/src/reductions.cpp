#include "ppud/reductions.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

namespace ppud {

std::vector<std::string> validate_machine(const CounterMachine& m) {
  std::vector<std::string> out;
  const std::size_t n = m.instructions.size();
  if (n == 0) {
    out.push_back("machine has no instructions");
    return out;
  }
  bool has_halt = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Instruction& ins = m.instructions[i];
    if (ins.op == Instruction::Op::Halt) {
      has_halt = true;
      continue;
    }
    if (i + 1 >= n)
      out.push_back("instruction " + std::to_string(i + 1) +
                    " falls off the end of the program");
    if (ins.op == Instruction::Op::ZeroTest && (ins.target < 1 || ins.target > n))
      out.push_back("instruction " + std::to_string(i + 1) + " jumps to unknown instruction " +
                    std::to_string(ins.target));
  }
  if (!has_halt) out.push_back("machine never halts: no halt instruction");
  return out;
}

namespace {

// main-part states, lifted to the full state set by the started-in tag
struct MainState {
  StateRole::Kind kind;
  std::uint32_t instruction = 0;
  Counter counter = Counter::X;
  CounterOp op = CounterOp::Idle;

  auto key() const { return std::tuple(kind, instruction, counter, op); }
  bool operator<(const MainState& o) const { return key() < o.key(); }
};

std::string counter_name(Counter c) { return c == Counter::X ? "x" : "y"; }

std::string op_name(CounterOp op) {
  switch (op) {
    case CounterOp::Idle: return "idle";
    case CounterOp::Inc: return "inc";
    case CounterOp::Dec: return "dec";
    case CounterOp::Done: return "done";
    case CounterOp::ZeroTest: return "zt";
    case CounterOp::EqZero: return "eq0";
    case CounterOp::GtZero: return "gt0";
  }
  return "?";
}

std::string main_name(const MainState& s) {
  switch (s.kind) {
    case StateRole::Kind::Instruction:
      return "i" + std::to_string(s.instruction);
    case StateRole::Kind::InstructionPrimed:
      return "i" + std::to_string(s.instruction) + "p";
    case StateRole::Kind::CounterX:
      return "Cx";
    case StateRole::Kind::CounterY:
      return "Cy";
    case StateRole::Kind::CounterControl:
      return "cc" + counter_name(s.counter) + "_" + op_name(s.op);
    case StateRole::Kind::Reservoir:
      return "R";
    case StateRole::Kind::Uniq:
      return "U";
    case StateRole::Kind::SinkBot:
      return "sink";
  }
  return "?";
}

// a Q_main-level transition, emitted with either one guard or both
struct MainTransition {
  MainState p1, p2, q1, q2;
  bool eq = true;
  bool neq = true;
};

}  // namespace

StateId CompiledProtocol::state(StateRole::Kind kind, bool started_in_reservoir,
                                std::uint32_t instruction, Counter c, CounterOp op) const {
  for (std::size_t i = 0; i < roles.size(); ++i) {
    const StateRole& r = roles[i];
    if (r.kind != kind || r.started_in_reservoir != started_in_reservoir) continue;
    if (kind == StateRole::Kind::Instruction || kind == StateRole::Kind::InstructionPrimed) {
      if (r.instruction != instruction) continue;
    } else if (kind == StateRole::Kind::CounterControl) {
      if (r.counter != c || r.op != op) continue;
    }
    return static_cast<StateId>(i);
  }
  throw std::logic_error("compiled protocol is missing a role state");
}

CompiledProtocol compile_2cm(const CounterMachine& m) {
  {
    auto errs = validate_machine(m);
    if (!errs.empty()) throw std::invalid_argument("invalid counter machine: " + errs.front());
  }
  const std::uint32_t n = static_cast<std::uint32_t>(m.instructions.size());

  // Q_main: instructions, primed instructions, counters, counter controls,
  // reservoir, uniqueness pool, sink
  std::vector<MainState> main;
  for (std::uint32_t i = 1; i <= n; ++i) main.push_back({StateRole::Kind::Instruction, i});
  for (std::uint32_t i = 1; i <= n; ++i) main.push_back({StateRole::Kind::InstructionPrimed, i});
  main.push_back({StateRole::Kind::CounterX});
  main.push_back({StateRole::Kind::CounterY});
  for (Counter c : {Counter::X, Counter::Y})
    for (CounterOp op : {CounterOp::Idle, CounterOp::Inc, CounterOp::Dec, CounterOp::Done,
                         CounterOp::ZeroTest, CounterOp::EqZero, CounterOp::GtZero})
      main.push_back({StateRole::Kind::CounterControl, 0, c, op});
  main.push_back({StateRole::Kind::Reservoir});
  main.push_back({StateRole::Kind::Uniq});
  main.push_back({StateRole::Kind::SinkBot});

  CompiledProtocol cp;
  std::map<std::pair<std::string, bool>, StateId> idx;
  for (bool in_r : {true, false}) {
    for (const MainState& s : main) {
      StateRole role;
      role.kind = s.kind;
      role.instruction = s.instruction;
      role.counter = s.counter;
      role.op = s.op;
      role.started_in_reservoir = in_r;
      idx[{main_name(s), in_r}] = static_cast<StateId>(cp.protocol.states.size());
      cp.protocol.states.push_back(main_name(s) + (in_r ? "_r" : "_o"));
      cp.roles.push_back(role);
    }
  }

  auto inst = [&](std::uint32_t i) { return MainState{StateRole::Kind::Instruction, i}; };
  auto primed = [&](std::uint32_t i) { return MainState{StateRole::Kind::InstructionPrimed, i}; };
  auto counter_state = [&](Counter c) {
    return MainState{c == Counter::X ? StateRole::Kind::CounterX : StateRole::Kind::CounterY};
  };
  auto cc = [&](Counter c, CounterOp op) {
    return MainState{StateRole::Kind::CounterControl, 0, c, op};
  };
  const MainState reservoir{StateRole::Kind::Reservoir};
  const MainState uniq{StateRole::Kind::Uniq};
  const MainState sink{StateRole::Kind::SinkBot};

  std::vector<MainTransition> families;
  auto add = [&](MainState p1, MainState p2, MainState q1, MainState q2, bool eq = true,
                 bool neq = true) {
    families.push_back({p1, p2, q1, q2, eq, neq});
  };

  // violation detection
  for (Counter c : {Counter::X, Counter::Y}) {
    for (CounterOp b : {CounterOp::Idle, CounterOp::Inc, CounterOp::Dec, CounterOp::Done,
                        CounterOp::ZeroTest, CounterOp::EqZero, CounterOp::GtZero}) {
      // counter colour violation: uncontrolled datum stuck in the counter
      add(cc(c, b), counter_state(c), sink, sink, /*eq=*/false, /*neq=*/true);
      // counter control violation: two control agents
      for (CounterOp b2 : {CounterOp::Idle, CounterOp::Inc, CounterOp::Dec, CounterOp::Done,
                           CounterOp::ZeroTest, CounterOp::EqZero, CounterOp::GtZero})
        add(cc(c, b), cc(c, b2), sink, sink);
    }
  }
  // control state violation: two agents anywhere in the control part,
  // primed states included
  std::vector<MainState> control_part;
  for (std::uint32_t i = 1; i <= n; ++i) control_part.push_back(inst(i));
  for (std::uint32_t i = 1; i <= n; ++i) control_part.push_back(primed(i));
  for (const MainState& a : control_part)
    for (const MainState& b : control_part) add(a, b, sink, sink);
  for (const MainState& q : main)  // the sink attracts everyone
    add(sink, q, sink, sink);

  // simulation families
  for (std::uint32_t i = 1; i <= n; ++i) {
    const Instruction& ins = m.instructions[i - 1];
    switch (ins.op) {
      case Instruction::Op::Inc:
        add(inst(i), cc(ins.counter, CounterOp::Idle), primed(i), cc(ins.counter, CounterOp::Inc));
        break;
      case Instruction::Op::Dec:
        add(inst(i), cc(ins.counter, CounterOp::Idle), primed(i), cc(ins.counter, CounterOp::Dec));
        break;
      case Instruction::Op::ZeroTest:
        add(inst(i), cc(ins.counter, CounterOp::Idle), primed(i),
            cc(ins.counter, CounterOp::ZeroTest));
        // both zero-test exits
        add(primed(i), cc(ins.counter, CounterOp::EqZero), inst(ins.target),
            cc(ins.counter, CounterOp::Idle));
        if (i < n)
          add(primed(i), cc(ins.counter, CounterOp::GtZero), inst(i + 1),
              cc(ins.counter, CounterOp::Idle));
        break;
      case Instruction::Op::Halt:
        break;
    }
  }
  for (Counter c : {Counter::X, Counter::Y}) {
    // the counter is moved against the same-datum reservoir of the control agent
    add(cc(c, CounterOp::Inc), reservoir, cc(c, CounterOp::Done), counter_state(c),
        /*eq=*/true, /*neq=*/false);
    add(cc(c, CounterOp::Dec), counter_state(c), cc(c, CounterOp::Done), reservoir,
        /*eq=*/true, /*neq=*/false);
    for (std::uint32_t i = 1; i + 1 <= n; ++i)
      add(cc(c, CounterOp::Done), primed(i), cc(c, CounterOp::Idle), inst(i + 1));
    // taking the =0 branch recruits a fresh-datum control agent from the pool
    add(cc(c, CounterOp::ZeroTest), uniq, reservoir, cc(c, CounterOp::EqZero));
    add(cc(c, CounterOp::ZeroTest), counter_state(c), cc(c, CounterOp::GtZero), counter_state(c));
  }

  // lift to Q_main x {r, o}; a same-datum pair of started-elsewhere agents is
  // always an input violation, overwriting any lifted equality transition
  auto lifted = [&](const MainState& s, bool in_r) { return idx.at({main_name(s), in_r}); };
  for (const MainTransition& f : families) {
    for (bool r1 : {true, false}) {
      for (bool r2 : {true, false}) {
        if (f.eq && !(!r1 && !r2))
          cp.protocol.transitions.push_back(
              {lifted(f.p1, r1), lifted(f.p2, r2), Guard::Eq, lifted(f.q1, r1), lifted(f.q2, r2)});
        if (f.neq)
          cp.protocol.transitions.push_back(
              {lifted(f.p1, r1), lifted(f.p2, r2), Guard::Neq, lifted(f.q1, r1), lifted(f.q2, r2)});
      }
    }
  }
  for (const MainState& p1 : main)
    for (const MainState& p2 : main)
      cp.protocol.transitions.push_back({lifted(p1, false), lifted(p2, false), Guard::Eq,
                                         lifted(sink, false), lifted(sink, false)});

  // I = {(R,r), (U,o), (ccx idle,o), (ccy idle,o), (i1,o)}
  cp.protocol.initial = {lifted(reservoir, true), lifted(uniq, false),
                         lifted(cc(Counter::X, CounterOp::Idle), false),
                         lifted(cc(Counter::Y, CounterOp::Idle), false), lifted(inst(1), false)};
  std::sort(cp.protocol.initial.begin(), cp.protocol.initial.end());

  cp.protocol.output.assign(cp.protocol.states.size(), OutputValue::Bot);
  for (std::uint32_t i = 1; i <= n; ++i) {
    if (m.instructions[i - 1].op != Instruction::Op::Halt) continue;
    for (bool r : {true, false})
      cp.protocol.output[lifted(inst(i), r)] = OutputValue::Top;
  }
  return cp;
}

CanonicalConfiguration initial_config_2cm(const CompiledProtocol& cp, std::uint32_t uniq_data,
                                          std::uint32_t reservoir_per_datum) {
  if (uniq_data < 1) throw std::invalid_argument("at least one uniqueness datum is required");
  const StateId r_state = cp.state(StateRole::Kind::Reservoir, true);
  auto with_reservoir = [&](StateId special) {
    DatumProfile prof;
    prof.add(special, 1);
    prof.add(r_state, static_cast<std::int64_t>(reservoir_per_datum));
    return prof;
  };

  std::vector<DatumProfile> raw;
  raw.push_back(with_reservoir(cp.state(StateRole::Kind::Instruction, false, 1)));
  raw.push_back(with_reservoir(
      cp.state(StateRole::Kind::CounterControl, false, 0, Counter::X, CounterOp::Idle)));
  raw.push_back(with_reservoir(
      cp.state(StateRole::Kind::CounterControl, false, 0, Counter::Y, CounterOp::Idle)));
  for (std::uint32_t k = 0; k < uniq_data; ++k)
    raw.push_back(with_reservoir(cp.state(StateRole::Kind::Uniq, false)));
  return canonicalize(std::move(raw));
}

}  // namespace ppud

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ppud/gre.hpp"
#include "ppud/state_space.hpp"

using namespace ppud;
using namespace ppud::testing;

namespace {

Gre random_gre(std::mt19937& rng, const Protocol& p, int depth) {
  std::uniform_int_distribution<int> kind(0, depth <= 0 ? 0 : 4);
  std::uniform_int_distribution<StateId> state(0, static_cast<StateId>(p.states.size() - 1));
  switch (kind(rng)) {
    case 1:
      return gre_union(random_gre(rng, p, depth - 1), random_gre(rng, p, depth - 1));
    case 2:
      return gre_complement(random_gre(rng, p, depth - 1));
    case 3:
      return gre_post_star(random_gre(rng, p, depth - 1));
    case 4:
      return gre_pre_star(random_gre(rng, p, depth - 1));
    default: {
      std::uniform_int_distribution<int> leaf(0, 2);
      switch (leaf(rng)) {
        case 0:
          return gre_atom(predicate_true());
        case 1:
          return gre_atom(presence(state(rng)));
        default: {
          SimpleIntervalPredicate s;
          s.width = 2;
          s.bounds.push_back({state(rng), 0, 1, std::nullopt});
          s.bounds.push_back({state(rng), 1, 1, 2});
          return gre_atom(IntervalPredicate::atom(std::move(s)));
        }
      }
    }
  }
}

// protocol where a nondeterministically reachable copy of the accepting
// state has the opposite output, so some initial configurations can
// stabilise either way
Protocol broken_pair_witness() {
  Protocol p = pair_witness();
  const StateId q4 = static_cast<StateId>(p.states.size());
  p.states.push_back("q4");
  p.output.push_back(OutputValue::Bot);
  const StateId q2 = *p.state_index("q2");
  p.transitions.push_back({q2, q2, Guard::Neq, q2, q4});  // rival of the q3 move
  for (const char* s : {"q0", "q1", "q2"}) {
    const StateId q = *p.state_index(s);
    p.transitions.push_back({q4, q, Guard::Eq, q4, q4});
    p.transitions.push_back({q4, q, Guard::Neq, q4, q4});
  }
  return p;
}

}  // namespace

TEST_CASE("norm and length of expressions") {
  Gre atom = gre_atom(pair_witness_predicate());
  CHECK(gre_length(*atom) == 0);
  CHECK(gre_norm(*atom) == 2);
  Gre e = gre_union(gre_pre_star(atom), gre_complement(gre_atom(predicate_true())));
  CHECK(gre_length(*e) == 3);
  CHECK(gre_norm(*e) == 2);
}

TEST_CASE("membership sees reachable predicate models") {
  const Protocol& p = pair_witness();
  auto c = cfg(p, {{{"q0", 1}, {"q1", 1}}, {{"q0", 1}, {"q1", 1}}});
  Gre covers_top = gre_pre_star(gre_atom(presence(*p.state_index("q3"))));
  CHECK(member(p, *covers_top, c));
  CHECK_FALSE(member(p, *covers_top, cfg(p, {{{"q0", 1}, {"q1", 1}}})));
}

TEST_CASE("complement flips membership") {
  std::mt19937 rng(47);
  for (int i = 0; i < 60; ++i) {
    Protocol p = random_io_protocol(rng, 3, 6);
    ConcreteRun r = random_run(rng, p, 4, 2, 0);
    auto c = start_configuration(r);
    Gre e = random_gre(rng, p, 2);
    CHECK(member(p, *gre_complement(e), c) == !member(p, *e, c));
  }
}

TEST_CASE("models are contained in their own star closures") {
  std::mt19937 rng(53);
  for (int i = 0; i < 60; ++i) {
    Protocol p = random_io_protocol(rng, 3, 6);
    ConcreteRun r = random_run(rng, p, 4, 2, 0);
    auto c = start_configuration(r);
    Gre e = random_gre(rng, p, 2);
    if (!member(p, *e, c)) continue;
    CHECK(member(p, *gre_post_star(e), c));
    CHECK(member(p, *gre_pre_star(e), c));
  }
}

TEST_CASE("emptiness of trivial atoms") {
  const Protocol& p = pair_witness();
  SearchBounds b{3, 3, true, kDefaultNodeBudget};
  Verdict none = emptiness(p, *gre_atom(predicate_false()), b);
  CHECK(none.kind == Verdict::Kind::Empty);
  Verdict all = emptiness(p, *gre_atom(predicate_true()), b);
  REQUIRE(all.kind == Verdict::Kind::NonEmpty);
  CHECK(all.witness->empty());  // smallest witness first: the empty configuration
}

TEST_CASE("smallest witnesses are found first") {
  const Protocol& p = pair_witness();
  SearchBounds b{3, 3, true, kDefaultNodeBudget};
  Verdict v = emptiness(p, *gre_atom(pair_witness_predicate()), b);
  REQUIRE(v.kind == Verdict::Kind::NonEmpty);
  CHECK(v.witness->agent_count() == 4);  // two data with two agents each
  CHECK(v.witness->datum_count() == 2);
}

TEST_CASE("consensus atoms") {
  const Protocol& p = pair_witness();
  Gre top = build_output_gre(p, OutputValue::Top);
  CHECK(member(p, *top, cfg(p, {{{"q3", 2}}, {{"q3", 1}}})));
  CHECK_FALSE(member(p, *top, cfg(p, {{{"q3", 2}, {"q0", 1}}})));
  Gre bot = build_output_gre(p, OutputValue::Bot);
  CHECK(member(p, *top, canonicalize({})));
  CHECK(member(p, *bot, canonicalize({})));
}

TEST_CASE("stable consensus holds on the all-top configuration") {
  const Protocol& p = pair_witness();
  Gre stable = build_stable_gre(p, OutputValue::Top);
  CHECK(member(p, *stable, cfg(p, {{{"q3", 2}}, {{"q3", 2}}})));
  CHECK_FALSE(member(p, *stable, cfg(p, {{{"q2", 1}}, {{"q2", 1}}})));
}

TEST_CASE("the sample protocol is well-specified at small bounds") {
  const Protocol& p = pair_witness();
  SearchBounds b{3, 3, false, kDefaultNodeBudget};
  Verdict v = emptiness(p, *build_wellspec_gre(p), b);
  CHECK(v.kind == Verdict::Kind::Empty);
}

TEST_CASE("a protocol outside the observation fragment runs the same pipeline") {
  const Protocol& p = parity_leader();
  REQUIRE_FALSE(is_immediate_observation(p));
  SearchBounds b{3, 2, false, kDefaultNodeBudget};
  CHECK(emptiness(p, *build_wellspec_gre(p), b).kind == Verdict::Kind::Empty);
}

TEST_CASE("a rival accepting state breaks well-specification") {
  Protocol p = broken_pair_witness();
  REQUIRE(validate_protocol(p).empty());
  SearchBounds b{3, 2, false, kDefaultNodeBudget};
  Verdict v = emptiness(p, *build_wellspec_gre(p), b);
  REQUIRE(v.kind == Verdict::Kind::NonEmpty);
  // the witness has several fair outcomes
  OutcomeSet o = fair_outcomes(p, *v.witness);
  CHECK_FALSE(o.singleton());
}

TEST_CASE("correctness of the sample protocol against its predicate") {
  const Protocol& p = pair_witness();
  SearchBounds b{3, 2, false, kDefaultNodeBudget};
  CorrectnessVerdict good = check_correctness(p, pair_witness_predicate(), b);
  CHECK(good.correct());

  CorrectnessVerdict bad = check_correctness(p, !pair_witness_predicate(), b);
  CHECK_FALSE(bad.correct());
  CHECK((bad.top_branch.nonempty() || bad.bot_branch.nonempty()));
}

TEST_CASE("a protocol without accepting states computes the false predicate") {
  Protocol p = pair_witness();
  p.output.assign(p.states.size(), OutputValue::Bot);
  SearchBounds b{2, 2, false, kDefaultNodeBudget};
  CHECK(check_correctness(p, predicate_false(), b).correct());
}

TEST_CASE("set reachability of trivial expressions") {
  const Protocol& p = pair_witness();
  SearchBounds b{2, 2, true, kDefaultNodeBudget};
  Gre t = gre_atom(predicate_true());
  Verdict both_true = check_set_reachability(p, t, t, b);
  CHECK(both_true.kind == Verdict::Kind::NonEmpty);
}

TEST_CASE("unreachable targets are reported empty") {
  Protocol p = pair_witness();
  // a state no transition ever fills
  p.states.push_back("island");
  p.output.push_back(OutputValue::Bot);
  SearchBounds b{2, 2, false, kDefaultNodeBudget};
  Gre from = build_initial_gre(p);
  Gre to = gre_atom(presence(*p.state_index("island")));
  Verdict v = check_set_reachability(p, from, to, b);
  CHECK(v.kind == Verdict::Kind::Empty);
}

TEST_CASE("covering the accepting state needs two data") {
  const Protocol& p = pair_witness();
  SearchBounds b{3, 3, false, kDefaultNodeBudget};
  // initial configurations with at most one appearing datum: no second
  // distinct datum anywhere
  SimpleIntervalPredicate two_data;
  two_data.width = 2;
  // both variables must appear somewhere: encode per-state presence pairs
  Gre at_least_two = nullptr;
  for (std::size_t q1 = 0; q1 < p.states.size(); ++q1) {
    for (std::size_t q2 = 0; q2 < p.states.size(); ++q2) {
      SimpleIntervalPredicate s;
      s.width = 2;
      s.bounds.push_back({static_cast<StateId>(q1), 0, 1, std::nullopt});
      s.bounds.push_back({static_cast<StateId>(q2), 1, 1, std::nullopt});
      Gre g = gre_atom(IntervalPredicate::atom(std::move(s)));
      at_least_two = at_least_two ? gre_union(at_least_two, g) : g;
    }
  }
  Gre one_datum = gre_intersect(build_initial_gre(p), gre_complement(at_least_two));
  Gre covers = gre_atom(presence(*p.state_index("q3")));
  Verdict v = check_set_reachability(p, one_datum, covers, b);
  CHECK(v.kind == Verdict::Kind::Empty);
}

TEST_CASE("the full space is always a home space") {
  const Protocol& p = pair_witness();
  SearchBounds b{2, 2, true, kDefaultNodeBudget};
  CHECK(check_home_space(p, gre_atom(predicate_true()), b).kind == Verdict::Kind::Empty);
}

TEST_CASE("an unreachable home space is refuted by an initial witness") {
  Protocol p = pair_witness();
  p.states.push_back("island");
  p.output.push_back(OutputValue::Bot);
  SearchBounds b{2, 2, false, kDefaultNodeBudget};
  Verdict v = check_home_space(p, gre_atom(presence(*p.state_index("island"))), b);
  REQUIRE(v.kind == Verdict::Kind::NonEmpty);
  CHECK(member(p, *build_initial_gre(p), *v.witness));
}

TEST_CASE("duplicated-datum starts always lead back to the losing consensus") {
  const Protocol& p = parity_leader();
  SearchBounds b{2, 2, false, kDefaultNodeBudget};
  // some datum holds two agents initially
  SimpleIntervalPredicate dup;
  dup.width = 1;
  dup.bounds.push_back({*p.state_index("L1"), 0, 2, std::nullopt});
  Gre source = gre_intersect(build_initial_gre(p), gre_atom(IntervalPredicate::atom(dup)));
  Verdict v = check_home_space(p, build_output_gre(p, OutputValue::Bot), b, source);
  CHECK(v.kind == Verdict::Kind::Empty);
}

TEST_CASE("algebraic laws hold pointwise") {
  std::mt19937 rng(59);
  for (int i = 0; i < 40; ++i) {
    Protocol p = random_io_protocol(rng, 3, 6);
    ConcreteRun r = random_run(rng, p, 4, 2, 0);
    auto c = start_configuration(r);
    Gre e = random_gre(rng, p, 2);
    CHECK(member(p, *gre_complement(gre_complement(e)), c) == member(p, *e, c));
    CHECK(member(p, *gre_union(e, e), c) == member(p, *e, c));
  }
}

TEST_CASE("star operators are idempotent on a bounded space") {
  std::mt19937 rng(61);
  for (int i = 0; i < 10; ++i) {
    Protocol p = random_io_protocol(rng, 3, 6);
    Gre e = random_gre(rng, p, 1);
    auto universe =
        enumerate_configurations(enumerate_profiles(p.states.size(), 2), 3, true);
    for (const auto& c : universe) {
      CHECK(member(p, *gre_post_star(gre_post_star(e)), c) ==
            member(p, *gre_post_star(e), c));
      CHECK(member(p, *gre_pre_star(gre_pre_star(e)), c) == member(p, *gre_pre_star(e), c));
    }
  }
}

TEST_CASE("emptiness is monotone in the bounds") {
  std::mt19937 rng(67);
  for (int i = 0; i < 20; ++i) {
    Protocol p = random_io_protocol(rng, 3, 5);
    Gre e = random_gre(rng, p, 2);
    SearchBounds big{3, 2, true, kDefaultNodeBudget};
    SearchBounds small{2, 1, true, kDefaultNodeBudget};
    if (emptiness(p, *e, big).kind == Verdict::Kind::Empty)
      CHECK(emptiness(p, *e, small).kind == Verdict::Kind::Empty);
  }
}

TEST_CASE("budget exhaustion is reported as inconclusive") {
  const Protocol& p = pair_witness();
  // no witness exists, and two-datum signature spaces outgrow the budget
  SearchBounds b{2, 2, false, 5};
  Verdict v = emptiness(p, *build_wellspec_gre(p), b);
  CHECK(v.kind == Verdict::Kind::Inconclusive);
  CHECK_FALSE(v.report.empty());
}

TEST_CASE("a protocol without transitions deadlocks into its start consensus") {
  Protocol p;
  p.states = {"yes", "no"};
  p.initial = {0, 1};
  p.output = {OutputValue::Top, OutputValue::Bot};
  REQUIRE(validate_protocol(p).empty());

  SearchBounds b{2, 2, false, kDefaultNodeBudget};
  Verdict v = emptiness(p, *build_wellspec_gre(p), b);
  REQUIRE(v.kind == Verdict::Kind::NonEmpty);
  // the smallest mixed start is stuck with both outputs visible
  CHECK(v.witness->agent_count() == 2);
  OutcomeSet o = fair_outcomes(p, *v.witness);
  CHECK(o == OutcomeSet{false, false, true});
}

TEST_CASE("emptiness skips the empty configuration on demand") {
  const Protocol& p = pair_witness();
  SearchBounds without{2, 2, false, kDefaultNodeBudget};
  Verdict v = emptiness(p, *gre_atom(predicate_true()), without);
  REQUIRE(v.kind == Verdict::Kind::NonEmpty);
  CHECK_FALSE(v.witness->empty());
  CHECK(v.witness->agent_count() == 1);
}

TEST_CASE("fairness oracle soak at three data") {
  std::mt19937 rng(223);
  for (int round = 0; round < 10; ++round) {
    Protocol p = random_io_protocol(rng, 4, 10);
    Gre bad_top =
        gre_pre_star(gre_complement(gre_pre_star(build_stable_gre(p, OutputValue::Top))));
    Gre bad_bot =
        gre_pre_star(gre_complement(gre_pre_star(build_stable_gre(p, OutputValue::Bot))));
    for (const auto& c : initial_configs(p, 3, 2)) {
      OutcomeSet o = fair_outcomes(p, c);
      CHECK(member(p, *bad_top, c) == (o.stabilises_bot || o.never_stabilises));
      CHECK(member(p, *bad_bot, c) == (o.stabilises_top || o.never_stabilises));
    }
  }
}

TEST_CASE("well-specification matches the fairness oracle per configuration") {
  std::mt19937 rng(71);
  for (int round = 0; round < 15; ++round) {
    Protocol p = random_io_protocol(rng, 3, 8);
    Gre bad_top = gre_pre_star(gre_complement(gre_pre_star(build_stable_gre(p, OutputValue::Top))));
    Gre bad_bot = gre_pre_star(gre_complement(gre_pre_star(build_stable_gre(p, OutputValue::Bot))));
    for (const auto& c : initial_configs(p, 2, 2)) {
      OutcomeSet o = fair_outcomes(p, c);
      const bool some_run_avoids_top = member(p, *bad_top, c);
      const bool some_run_avoids_bot = member(p, *bad_bot, c);
      CHECK(some_run_avoids_top == (o.stabilises_bot || o.never_stabilises));
      CHECK(some_run_avoids_bot == (o.stabilises_top || o.never_stabilises));
    }
  }
}

// Acceptance suite: each case checks one release criterion end to end and
// prints one CRITERION <n> PASS/FAIL line.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "ppud/containers.hpp"
#include "ppud/gre.hpp"
#include "ppud/reductions.hpp"
#include "ppud/run_transform.hpp"

using namespace ppud;
using namespace ppud::testing;

namespace {

struct Criterion {
  int number;
  std::chrono::steady_clock::time_point start;

  explicit Criterion(int n) : number(n), start(std::chrono::steady_clock::now()) {}

  ~Criterion() {
    const bool ok = doctest::detail::g_cs->numAssertsFailedCurrentTest_atomic == 0;
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    std::cout << "CRITERION " << number << (ok ? " PASS" : " FAIL") << " (" << ms << " ms)"
              << std::endl;
  }
};

std::uint32_t single_datum_with_ones(const CanonicalConfiguration& c) {
  // data count when every datum holds exactly one agent, 0 otherwise
  for (const auto& [prof, mult] : c.profiles)
    if (prof.total_agents() != 1) return 0;
  return static_cast<std::uint32_t>(c.datum_count());
}

}  // namespace

TEST_CASE("criterion 1: pair-witness outcomes match the predicate") {
  Criterion cr(1);
  const Protocol& p = pair_witness();
  IntervalPredicate phi = pair_witness_predicate();
  for (const auto& c : initial_configs(p, 3, 2)) {
    OutcomeSet o = fair_outcomes(p, c);
    CHECK(o.singleton());
    const bool expect_top = eval_predicate(phi, c);
    CHECK(o.stabilises_top == expect_top);
    CHECK(o.stabilises_bot == !expect_top);
  }
}

TEST_CASE("criterion 2: reach formula agrees with the fairness oracle") {
  Criterion cr(2);
  std::mt19937 rng(20240501);
  for (int round = 0; round < 50; ++round) {
    Protocol p = random_io_protocol(rng, 4, 12);
    Gre bad_top =
        gre_pre_star(gre_complement(gre_pre_star(build_stable_gre(p, OutputValue::Top))));
    Gre bad_bot =
        gre_pre_star(gre_complement(gre_pre_star(build_stable_gre(p, OutputValue::Bot))));
    for (const auto& c : initial_configs(p, 2, 2)) {
      OutcomeSet o = fair_outcomes(p, c);
      CHECK(member(p, *bad_top, c) == (o.stabilises_bot || o.never_stabilises));
      CHECK(member(p, *bad_bot, c) == (o.stabilises_top || o.never_stabilises));
    }
  }
}

TEST_CASE("criterion 3: parity-leader outcomes") {
  Criterion cr(3);
  const Protocol& p = parity_leader();
  for (const auto& c : initial_configs(p, 3, 2)) {
    OutcomeSet o = fair_outcomes(p, c);
    CHECK(o.singleton());
    const std::uint32_t loners = single_datum_with_ones(c);
    const bool expect_top = loners > 0 && loners % 2 == 0;
    CHECK(o.stabilises_top == expect_top);
  }
}

TEST_CASE("criterion 4: containers and predicates translate both ways") {
  Criterion cr(4);
  for (std::size_t states = 1; states <= 3; ++states) {
    auto universe = enumerate_configurations(enumerate_profiles(states, 3), 3, true);
    for (std::uint32_t n = 1; n <= 2; ++n) {
      for (std::uint32_t m = 1; m <= 2; ++m) {
        // representatives per equivalence class
        std::map<Container, CanonicalConfiguration> classes;
        for (const auto& c : universe) classes.try_emplace(container_of(c, n, m), c);

        std::map<Container, IntervalPredicate> preds;
        for (const auto& [cont, rep] : classes)
          preds.emplace(cont, container_to_predicate(cont, states));

        for (const auto& c : universe) {
          const Container own = container_of(c, n, m);
          for (const auto& [cont, phi] : preds)
            CHECK(eval_predicate(phi, c) == (cont == own));
        }

        // inversion where the container space is enumerable
        if (states <= 2 || n == 1) {
          std::size_t checked = 0;
          for (const auto& [cont, phi] : preds) {
            if (++checked > 6) break;  // a sample of classes per combination
            auto back = predicate_to_containers(phi, states, n, m);
            REQUIRE(back.size() == 1);
            CHECK(back.front() == cont);
          }
        } else {
          // (M+1)^26 containers: the documented budget error is the contract
          CHECK_THROWS_AS(
              predicate_to_containers(preds.begin()->second, states, n, m, 1'000'000),
              BudgetExceeded);
        }
      }
    }
  }
}

TEST_CASE("criterion 5: refinement and bounded-predicate transfer") {
  Criterion cr(5);
  auto universe = enumerate_configurations(enumerate_profiles(3, 3), 3, true);

  // refinement: the finer partition never splits across the coarser one
  for (std::uint32_t n2 = 1; n2 <= 2; ++n2)
    for (std::uint32_t m2 = 1; m2 <= 2; ++m2)
      for (std::uint32_t n1 = 1; n1 <= n2; ++n1)
        for (std::uint32_t m1 = 1; m1 <= m2; ++m1) {
          std::map<Container, Container> fine_to_coarse;
          for (const auto& c : universe) {
            auto [it, inserted] =
                fine_to_coarse.emplace(container_of(c, n2, m2), container_of(c, n1, m1));
            if (!inserted) CHECK(it->second == container_of(c, n1, m1));
          }
        }

  // transfer: equivalent configurations agree on bounded random predicates
  std::mt19937 rng(20240502);
  for (std::uint32_t n = 1; n <= 2; ++n) {
    for (std::uint32_t m = 1; m <= 2; ++m) {
      std::map<Container, CanonicalConfiguration> reps;
      for (const auto& c : universe) reps.try_emplace(container_of(c, n, m), c);
      for (int i = 0; i < 100; ++i) {
        SimpleIntervalPredicate s;
        std::uniform_int_distribution<std::uint32_t> width(0, m);
        std::uniform_int_distribution<std::uint64_t> height(0, n);
        std::uniform_int_distribution<StateId> state(0, 2);
        std::uniform_int_distribution<int> coin(0, 1);
        s.width = width(rng);
        for (std::uint32_t v = 0; v < s.width; ++v) {
          std::uniform_int_distribution<std::size_t> extra(1, 2);
          const std::size_t k = extra(rng);
          for (std::size_t b = 0; b < k; ++b) {
            IntervalBound bound;
            bound.state = state(rng);
            bound.var = v;
            bound.lo = height(rng);
            // finite upper bounds stay below n; at n they can separate
            // configurations the truncation identifies
            if (coin(rng) && bound.lo < n) {
              std::uniform_int_distribution<std::uint64_t> hi(bound.lo, n - 1);
              bound.hi = hi(rng);
            }
            s.bounds.push_back(bound);
          }
        }
        for (const auto& c : universe)
          CHECK(eval_simple(s, c) == eval_simple(s, reps.at(container_of(c, n, m))));
      }
    }
  }
}

TEST_CASE("criterion 6: transformation suite on a random run corpus") {
  Criterion cr(6);
  std::mt19937 rng(20240503);
  int produced = 0;
  while (produced < 500) {
    Protocol p = random_io_protocol(rng, 3, 8);
    ConcreteRun r = random_run(rng, p, 30, 6, 40);
    if (r.agents.size() < 2) continue;
    ++produced;
    RunCheckResult before = check_run(p, r);
    REQUIRE(before.ok);

    const std::size_t q = p.states.size();
    const std::uint32_t qcube = static_cast<std::uint32_t>(q * q * q);

    ConcreteRun core = agents_core(p, r);
    RunCheckResult core_rep = check_run(p, core);
    REQUIRE(core_rep.ok);
    std::map<DatumId, std::uint32_t> per_datum;
    for (const RunAgent& a : core.agents) ++per_datum[a.datum];
    for (const auto& [d, count] : per_datum) CHECK(count <= qcube);

    std::uint32_t k = 0;
    std::map<DatumId, std::uint32_t> input_per_datum;
    for (const RunAgent& a : r.agents) k = std::max(k, ++input_per_datum[a.datum]);
    ConcreteRun shrunk = data_core(p, r, k);
    REQUIRE(check_run(p, shrunk).ok);
    std::set<DatumId> data;
    for (const RunAgent& a : shrunk.agents) data.insert(a.datum);
    BigInt data_bound = 1;
    for (std::size_t i = 0; i < q * q * q + q * q; ++i) {
      data_bound *= (k + 1);
      if (data_bound > 1'000'000) break;
    }
    CHECK(BigInt(data.size()) <= data_bound);

    ConcreteRun normal = normalize_run(p, r);
    RunCheckResult norm_rep = check_run(p, normal);
    REQUIRE(norm_rep.ok);
    CHECK(start_configuration(normal) == start_configuration(r));
    CHECK(norm_rep.end == before.end);

    ObservationStats stats = observation_stats(p, normal);
    for (const auto& [d, count] : stats.observed_agents_per_datum) CHECK(count <= qcube);
    BigInt ext_bound = 1;
    for (std::size_t i = 0; i < q * q * q + q * q; ++i) {
      ext_bound *= (qcube + 1);
      if (ext_bound > 1'000'000) break;
    }
    CHECK(BigInt(stats.externally_observed_data) <= ext_bound);
  }
}

TEST_CASE("criterion 7: the five-agent run shrinks to the published core") {
  Criterion cr(7);
  const Protocol& p = two_state();
  ConcreteRun out = agents_core(p, five_agent_run());
  REQUIRE(check_run(p, out).ok);
  REQUIRE(out.agents.size() == 4);
  REQUIRE(out.steps.size() == 4);
  // the surviving same-datum walker is observed by d in step 2 and by e in
  // the penultimate step
  CHECK(out.steps[0] == RunStep{0, 1, 0});
  CHECK(out.steps[1] == RunStep{1, 3, 1});
  CHECK(out.steps[2] == RunStep{1, 4, 1});
  CHECK(out.steps[3] == RunStep{3, 1, 0});
}

TEST_CASE("criterion 8: expression algebra holds pointwise") {
  Criterion cr(8);
  std::mt19937 rng(20240504);

  std::function<Gre(const Protocol&, int)> random_gre = [&](const Protocol& p,
                                                            int depth) -> Gre {
    std::uniform_int_distribution<int> kind(0, depth <= 0 ? 0 : 4);
    std::uniform_int_distribution<StateId> state(0, static_cast<StateId>(p.states.size() - 1));
    switch (kind(rng)) {
      case 1:
        return gre_union(random_gre(p, depth - 1), random_gre(p, depth - 1));
      case 2:
        return gre_complement(random_gre(p, depth - 1));
      case 3:
        return gre_post_star(random_gre(p, depth - 1));
      case 4:
        return gre_pre_star(random_gre(p, depth - 1));
      default:
        return gre_atom(presence(state(rng)));
    }
  };

  for (int i = 0; i < 100; ++i) {
    Protocol p = random_io_protocol(rng, 4, 10);
    ConcreteRun r = random_run(rng, p, 4, 2, 0);
    auto c = start_configuration(r);
    Gre e = random_gre(p, 2);
    CHECK(member(p, *gre_complement(gre_complement(e)), c) == member(p, *e, c));
    CHECK(member(p, *gre_union(e, e), c) == member(p, *e, c));
    if (member(p, *e, c)) {
      CHECK(member(p, *gre_post_star(e), c));
      CHECK(member(p, *gre_pre_star(e), c));
    }
  }

  // star idempotence, exhaustively over a bounded space
  for (int i = 0; i < 10; ++i) {
    Protocol p = random_io_protocol(rng, 3, 6);
    Gre e = random_gre(p, 1);
    for (const auto& c :
         enumerate_configurations(enumerate_profiles(p.states.size(), 2), 3, true)) {
      CHECK(member(p, *gre_post_star(gre_post_star(e)), c) == member(p, *gre_post_star(e), c));
      CHECK(member(p, *gre_pre_star(gre_pre_star(e)), c) == member(p, *gre_pre_star(e), c));
    }
  }
}

TEST_CASE("criterion 9: counter-machine reduction behaves at both poles") {
  Criterion cr(9);

  // a halting machine reaches its halt state without violations
  {
    auto parsed = parse_cm(load_sample("inc_halt.cm"));
    REQUIRE(parsed.ok());
    CompiledProtocol cp = compile_2cm(*parsed.value);
    REQUIRE(validate_protocol(cp.protocol).empty());
    auto reachable = reach_set(cp.protocol, initial_config_2cm(cp, 1, 1), Direction::Forward);
    const StateId halt_o = cp.state(StateRole::Kind::Instruction, false, 2);
    const StateId halt_r = cp.state(StateRole::Kind::Instruction, true, 2);
    bool witnessed = false;
    for (const auto& c : reachable) {
      bool sink = false, halt = false;
      for (const auto& [prof, mult] : c.profiles) {
        if (prof.count(cp.sink(true)) || prof.count(cp.sink(false))) sink = true;
        if (prof.count(halt_o) || prof.count(halt_r)) halt = true;
      }
      if (halt && !sink) witnessed = true;
    }
    CHECK(witnessed);
  }

  // a looping machine stabilises to bottom from every violation-free start
  {
    auto parsed = parse_cm(load_sample("zero_loop.cm"));
    REQUIRE(parsed.ok());
    CompiledProtocol cp = compile_2cm(*parsed.value);
    const Protocol& p = cp.protocol;

    // per-datum initial profiles: some reservoir agents plus at most one
    // agent on one of the started-elsewhere initial states
    const StateId r_state = cp.state(StateRole::Kind::Reservoir, true);
    std::vector<StateId> specials;
    for (StateId q : p.initial)
      if (q != r_state) specials.push_back(q);

    std::vector<DatumProfile> pool;
    for (std::uint32_t reservoir = 1; reservoir <= 3; ++reservoir) {
      DatumProfile prof;
      prof.add(r_state, reservoir);
      pool.push_back(prof);
    }
    for (StateId special : specials) {
      for (std::uint32_t reservoir = 0; reservoir + 1 <= 3; ++reservoir) {
        DatumProfile prof;
        prof.add(special, 1);
        if (reservoir > 0) prof.add(r_state, reservoir);
        pool.push_back(prof);
      }
    }

    const StateId i1 = cp.state(StateRole::Kind::Instruction, false, 1);
    const StateId ccx =
        cp.state(StateRole::Kind::CounterControl, false, 0, Counter::X, CounterOp::Idle);
    const StateId ccy =
        cp.state(StateRole::Kind::CounterControl, false, 0, Counter::Y, CounterOp::Idle);

    std::size_t swept = 0;
    for (const auto& c : enumerate_configurations(pool, 4, false)) {
      // violation-free: at most one agent in the control seat and each
      // counter-control seat (the profile pool already keeps same-datum
      // outsiders apart)
      std::size_t in_i1 = 0, in_ccx = 0, in_ccy = 0;
      for (const auto& [prof, mult] : c.profiles) {
        in_i1 += static_cast<std::size_t>(prof.count(i1)) * mult;
        in_ccx += static_cast<std::size_t>(prof.count(ccx)) * mult;
        in_ccy += static_cast<std::size_t>(prof.count(ccy)) * mult;
      }
      if (in_i1 > 1 || in_ccx > 1 || in_ccy > 1) continue;
      ++swept;
      OutcomeSet o = fair_outcomes(p, c);
      CHECK(o == OutcomeSet{false, true, false});
    }
    std::cout << "  (swept " << swept << " violation-free initial configurations)" << std::endl;
    CHECK(swept > 500);
  }
}

TEST_CASE("criterion 10: exact bound arithmetic and its obligations") {
  Criterion cr(10);
  // closed forms versus loop-computed values
  for (std::size_t s = 1; s <= 6; ++s) {
    for (std::uint32_t n = 1; n <= 6; ++n) {
      BigInt cube = BigInt(s) * s * s;
      CHECK(bound_f(s, n) == (cube + n) * s);
      for (std::uint32_t m = 1; m <= 6; ++m) {
        BigInt pow_term = 1;
        for (BigInt i = 0; i < cube + BigInt(s) * s; ++i) pow_term *= cube + 1;
        BigInt box_term = 1;
        for (std::size_t i = 0; i < s; ++i) box_term *= n + 1;
        CHECK(bound_g(s, n, m) == (pow_term + m) * box_term);
      }
    }
  }

  // alpha, beta and the witness bound on a concrete expression
  const Protocol& p = pair_witness();
  Gre e = gre_pre_star(gre_complement(gre_atom(pair_witness_predicate())));
  BoundReport rep = bound_report(p, *e, 2, 2);
  CHECK(rep.alpha == BigInt(2) * poly1(4) * poly1(4));
  CHECK(rep.beta == boost::multiprecision::pow(BigInt(2), static_cast<unsigned>(4 * poly12(4))));
  CHECK(rep.witness_agent_bound ==
        rep.alpha * 4 * boost::multiprecision::pow(rep.alpha + 1, 4) * rep.beta);

  // documented inequalities over the sampled grid (f from n = 1; g from
  // n = 2, m = 1 — below that no polynomial instantiation can exist)
  for (std::size_t s = 1; s <= 10; ++s) {
    for (std::uint32_t n = 1; n <= 10; ++n) CHECK(bound_f(s, n) <= BigInt(n) * poly1(s));
    for (std::uint32_t n = 2; n <= 10; ++n)
      for (std::uint32_t m = 1; m <= 10; ++m)
        CHECK(bound_g(s, n, m) <=
              BigInt(m) *
                  boost::multiprecision::pow(BigInt(n), static_cast<unsigned>(poly2(s))));
  }
}

#include "ppud/gre.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>

#include "ppud/state_space.hpp"

namespace ppud {

Gre gre_atom(IntervalPredicate phi) {
  auto n = std::make_shared<GreNode>();
  n->kind = GreNode::Kind::Atom;
  n->atom = std::move(phi);
  return n;
}

namespace {

Gre unary(GreNode::Kind k, Gre a) {
  auto n = std::make_shared<GreNode>();
  n->kind = k;
  n->left = std::move(a);
  return n;
}

}  // namespace

Gre gre_union(Gre a, Gre b) {
  auto n = std::make_shared<GreNode>();
  n->kind = GreNode::Kind::Union;
  n->left = std::move(a);
  n->right = std::move(b);
  return n;
}

Gre gre_complement(Gre a) { return unary(GreNode::Kind::Complement, std::move(a)); }
Gre gre_post_star(Gre a) { return unary(GreNode::Kind::PostStar, std::move(a)); }
Gre gre_pre_star(Gre a) { return unary(GreNode::Kind::PreStar, std::move(a)); }

Gre gre_intersect(Gre a, Gre b) {
  return gre_complement(gre_union(gre_complement(std::move(a)), gre_complement(std::move(b))));
}

std::uint64_t gre_length(const GreNode& e) {
  switch (e.kind) {
    case GreNode::Kind::Atom:
      return 0;
    case GreNode::Kind::Union:
      return 1 + gre_length(*e.left) + gre_length(*e.right);
    default:
      return 1 + gre_length(*e.left);
  }
}

std::uint64_t gre_norm(const GreNode& e) {
  switch (e.kind) {
    case GreNode::Kind::Atom: {
      const PredicateMetrics m = predicate_metrics(e.atom);
      return std::max(m.width, m.height);
    }
    case GreNode::Kind::Union:
      return std::max(gre_norm(*e.left), gre_norm(*e.right));
    default:
      return gre_norm(*e.left);
  }
}

namespace {

bool reach_free(const GreNode& e) {
  switch (e.kind) {
    case GreNode::Kind::Atom:
      return true;
    case GreNode::Kind::PostStar:
    case GreNode::Kind::PreStar:
      return false;
    case GreNode::Kind::Union:
      return reach_free(*e.left) && reach_free(*e.right);
    case GreNode::Kind::Complement:
      return reach_free(*e.left);
  }
  return true;
}

bool eval_reach_free(const GreNode& e, const CanonicalConfiguration& c) {
  switch (e.kind) {
    case GreNode::Kind::Atom:
      return eval_predicate(e.atom, c);
    case GreNode::Kind::Union:
      return eval_reach_free(*e.left, c) || eval_reach_free(*e.right, c);
    case GreNode::Kind::Complement:
      return !eval_reach_free(*e.left, c);
    default:
      throw std::logic_error("reach operator in reach-free evaluation");
  }
}

// set-wise evaluation over one signature space, memoised per node pointer
struct SetEvaluator {
  const StateSpace& space;
  std::map<const GreNode*, std::vector<bool>> memo;

  const std::vector<bool>& eval(const GreNode& e) {
    auto it = memo.find(&e);
    if (it != memo.end()) return it->second;
    std::vector<bool> result;
    switch (e.kind) {
      case GreNode::Kind::Atom: {
        result.resize(space.configs().size());
        for (std::size_t i = 0; i < space.configs().size(); ++i)
          result[i] = eval_predicate(e.atom, space.configs()[i]);
        break;
      }
      case GreNode::Kind::Union: {
        const auto& a = eval(*e.left);
        const auto b = eval(*e.right);  // copy: reference may dangle on rehash
        result.resize(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) result[i] = a[i] || b[i];
        break;
      }
      case GreNode::Kind::Complement: {
        const auto& a = eval(*e.left);
        result.resize(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) result[i] = !a[i];
        break;
      }
      case GreNode::Kind::PostStar:
        result = space.post_star(eval(*e.left));
        break;
      case GreNode::Kind::PreStar:
        result = space.pre_star(eval(*e.left));
        break;
    }
    return memo.emplace(&e, std::move(result)).first->second;
  }
};

}  // namespace

bool member(const Protocol& p, const GreNode& e, const CanonicalConfiguration& c,
            std::size_t node_budget) {
  if (reach_free(e)) return eval_reach_free(e, c);
  StateSpace space = StateSpace::build(p, signature_of(c), node_budget);
  SetEvaluator ev{space, {}};
  const int idx = space.index_of(c);
  return ev.eval(e)[static_cast<std::size_t>(idx)];
}

namespace {

struct SpaceEntry {
  StateSpace space;
  SetEvaluator ev;
  explicit SpaceEntry(StateSpace s) : space(std::move(s)), ev{space, {}} {}
};

}  // namespace

Verdict emptiness(const Protocol& p, const GreNode& e, const SearchBounds& b) {
  Verdict v;
  v.bounds = b;

  std::vector<DatumProfile> pool = enumerate_profiles(p.states.size(), b.max_agents_per_datum);
  std::vector<CanonicalConfiguration> candidates =
      enumerate_configurations(pool, b.max_data, b.include_empty);

  const bool rf = reach_free(e);
  // one evaluator per signature; spaces are shared across candidates
  std::map<Signature, std::unique_ptr<SpaceEntry>> spaces;

  try {
    for (const CanonicalConfiguration& c : candidates) {
      bool in;
      if (rf) {
        in = eval_reach_free(e, c);
      } else {
        Signature sig = signature_of(c);
        auto it = spaces.find(sig);
        if (it == spaces.end()) {
          auto entry = std::make_unique<SpaceEntry>(StateSpace::build(p, sig, b.node_budget));
          it = spaces.emplace(std::move(sig), std::move(entry)).first;
        }
        SpaceEntry& entry = *it->second;
        in = entry.ev.eval(e)[static_cast<std::size_t>(entry.space.index_of(c))];
      }
      if (in) {
        v.kind = Verdict::Kind::NonEmpty;
        v.witness = c;
        // witness soundness: the verdict re-verifies under member()
        if (!member(p, e, c, b.node_budget))
          throw std::logic_error("witness failed re-verification");
        return v;
      }
    }
  } catch (const BudgetExceeded& ex) {
    v.kind = Verdict::Kind::Inconclusive;
    v.report = ex.what();
    return v;
  }

  v.kind = Verdict::Kind::Empty;
  return v;
}

Gre build_output_gre(const Protocol& p, OutputValue b) {
  // the dotted universal as the negated existential violation: some datum has
  // an agent on a state with the other output
  std::optional<IntervalPredicate> violation;
  for (std::size_t q = 0; q < p.states.size(); ++q) {
    if (p.output[q] == b) continue;
    IntervalPredicate here = presence(static_cast<StateId>(q));
    violation = violation ? (*std::move(violation) || std::move(here)) : std::move(here);
  }
  if (!violation) return gre_atom(predicate_true());
  return gre_atom(!*std::move(violation));
}

Gre build_initial_gre(const Protocol& p) {
  std::optional<IntervalPredicate> violation;
  for (std::size_t q = 0; q < p.states.size(); ++q) {
    if (p.is_initial(static_cast<StateId>(q))) continue;
    IntervalPredicate here = presence(static_cast<StateId>(q));
    violation = violation ? (*std::move(violation) || std::move(here)) : std::move(here);
  }
  if (!violation) return gre_atom(predicate_true());
  return gre_atom(!*std::move(violation));
}

Gre build_stable_gre(const Protocol& p, OutputValue b) {
  return gre_complement(gre_pre_star(gre_complement(build_output_gre(p, b))));
}

Gre build_wellspec_gre(const Protocol& p) {
  Gre top = gre_pre_star(gre_complement(gre_pre_star(build_stable_gre(p, OutputValue::Top))));
  Gre bot = gre_pre_star(gre_complement(gre_pre_star(build_stable_gre(p, OutputValue::Bot))));
  return gre_intersect(build_initial_gre(p), gre_intersect(std::move(top), std::move(bot)));
}

CorrectnessVerdict check_correctness(const Protocol& p, const IntervalPredicate& phi,
                                     const SearchBounds& b) {
  CorrectnessVerdict cv;
  const Gre init = build_initial_gre(p);
  for (OutputValue out : {OutputValue::Top, OutputValue::Bot}) {
    IntervalPredicate selected = phi;
    if (out == OutputValue::Bot) selected = !std::move(selected);
    Gre source = gre_intersect(init, gre_atom(std::move(selected)));
    Gre bad = gre_pre_star(gre_complement(gre_pre_star(build_stable_gre(p, out))));
    Verdict verdict = emptiness(p, *gre_intersect(std::move(source), std::move(bad)), b);
    (out == OutputValue::Top ? cv.top_branch : cv.bot_branch) = std::move(verdict);
  }
  return cv;
}

Verdict check_set_reachability(const Protocol& p, const Gre& e1, const Gre& e2,
                               const SearchBounds& b) {
  return emptiness(p, *gre_intersect(e1, gre_pre_star(e2)), b);
}

Verdict check_home_space(const Protocol& p, const Gre& home, const SearchBounds& b,
                         const Gre& source) {
  Gre base = source ? source : build_initial_gre(p);
  return emptiness(
      p, *gre_intersect(gre_post_star(std::move(base)), gre_complement(gre_pre_star(home))), b);
}

}  // namespace ppud

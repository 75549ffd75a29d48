#include "ppud/text.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace ppud {

namespace {

struct Token {
  enum class Kind { Ident, Number, Punct, String, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {
    while (true) {
      advance();
      tokens_.push_back(tok_);
      if (tok_.kind == Token::Kind::End) break;
    }
  }

  const Token& peek() const { return tokens_[std::min(cursor_, tokens_.size() - 1)]; }
  const Token& peek2() const { return tokens_[std::min(cursor_ + 1, tokens_.size() - 1)]; }

  Token take() {
    Token t = peek();
    if (cursor_ + 1 < tokens_.size()) ++cursor_;
    return t;
  }

 private:
  void skip_space() {
    while (pos_ < src_.size()) {
      char ch = src_[pos_];
      if (ch == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (ch == '\n') {
        ++pos_;
        ++line_;
        col_ = 1;
      } else if (std::isspace(static_cast<unsigned char>(ch)) || ch == ';') {
        ++pos_;
        ++col_;
      } else {
        break;
      }
    }
  }

  void advance() {
    skip_space();
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::Kind::End;
      return;
    }
    char ch = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '_'))
        ++pos_, ++col_;
      tok_.kind = Token::Kind::Ident;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        ++pos_, ++col_;
      tok_.kind = Token::Kind::Number;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (ch == '"') {
      ++pos_;
      ++col_;
      std::string text;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\n') {
          ++line_;
          col_ = 1;
        } else {
          ++col_;
        }
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
          ++pos_;
          ++col_;
        }
        text.push_back(src_[pos_++]);
      }
      if (pos_ < src_.size()) ++pos_, ++col_;  // closing quote
      tok_.kind = Token::Kind::String;
      tok_.text = std::move(text);
      return;
    }
    // multi-char punctuation first
    static const char* multi[] = {"->", "!="};
    for (const char* m : multi) {
      const std::size_t len = std::string_view(m).size();
      if (src_.compare(pos_, len, m) == 0) {
        tok_.kind = Token::Kind::Punct;
        tok_.text = m;
        pos_ += len;
        col_ += len;
        return;
      }
    }
    tok_.kind = Token::Kind::Punct;
    tok_.text = std::string(1, ch);
    ++pos_;
    ++col_;
  }

  const std::string& src_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
  Token tok_;
  std::vector<Token> tokens_;
  std::size_t cursor_ = 0;
};

struct Parser {
  Lexer lex;
  std::vector<Diagnostic>& diags;

  explicit Parser(const std::string& src, std::vector<Diagnostic>& d) : lex(src), diags(d) {}

  void error(const Token& t, std::string msg) { diags.push_back({t.line, t.col, std::move(msg)}); }

  bool at_ident(const char* word) {
    return lex.peek().kind == Token::Kind::Ident && lex.peek().text == word;
  }
  bool at_punct(const char* p) {
    return lex.peek().kind == Token::Kind::Punct && lex.peek().text == p;
  }
  bool eat_ident(const char* word) {
    if (!at_ident(word)) return false;
    lex.take();
    return true;
  }
  bool eat_punct(const char* p) {
    if (!at_punct(p)) return false;
    lex.take();
    return true;
  }
  bool expect_punct(const char* p) {
    if (eat_punct(p)) return true;
    error(lex.peek(), std::string("expected '") + p + "', found '" + lex.peek().text + "'");
    return false;
  }
  std::optional<std::string> expect_ident(const char* what) {
    if (lex.peek().kind != Token::Kind::Ident) {
      error(lex.peek(), std::string("expected ") + what + ", found '" + lex.peek().text + "'");
      return std::nullopt;
    }
    return lex.take().text;
  }
  std::optional<std::uint64_t> expect_number(const char* what) {
    if (lex.peek().kind != Token::Kind::Number) {
      error(lex.peek(), std::string("expected ") + what + ", found '" + lex.peek().text + "'");
      return std::nullopt;
    }
    return std::stoull(lex.take().text);
  }
  bool at_end() { return lex.peek().kind == Token::Kind::End; }
};

std::optional<StateId> lookup_state(Parser& ps, const Protocol& p, const Token& tok,
                                    const std::string& name) {
  auto idx = p.state_index(name);
  if (!idx) ps.error(tok, "unknown state '" + name + "'");
  return idx;
}

}  // namespace

ParseResult<Protocol> parse_protocol(const std::string& text) {
  ParseResult<Protocol> res;
  Parser ps(text, res.diagnostics);
  Protocol p;

  if (!ps.eat_ident("states")) {
    ps.error(ps.lex.peek(), "protocol must start with 'states'");
    return res;
  }
  while (ps.lex.peek().kind == Token::Kind::Ident && !ps.at_ident("init")) {
    Token t = ps.lex.take();
    if (p.state_index(t.text))
      ps.error(t, "duplicate state '" + t.text + "'");
    else
      p.states.push_back(t.text);
  }
  if (!ps.eat_ident("init")) {
    ps.error(ps.lex.peek(), "expected 'init' section");
    return res;
  }
  while (ps.lex.peek().kind == Token::Kind::Ident && !ps.at_ident("output")) {
    Token t = ps.lex.take();
    if (auto idx = lookup_state(ps, p, t, t.text)) p.initial.push_back(*idx);
  }
  std::sort(p.initial.begin(), p.initial.end());
  p.initial.erase(std::unique(p.initial.begin(), p.initial.end()), p.initial.end());

  if (!ps.eat_ident("output")) {
    ps.error(ps.lex.peek(), "expected 'output' section");
    return res;
  }
  std::map<StateId, OutputValue> outs;
  while (ps.lex.peek().kind == Token::Kind::Ident && !ps.at_ident("trans")) {
    Token t = ps.lex.take();
    auto idx = lookup_state(ps, p, t, t.text);
    if (!ps.expect_punct("=")) return res;
    Token v = ps.lex.peek();
    if (ps.eat_ident("top")) {
      if (idx) outs[*idx] = OutputValue::Top;
    } else if (ps.eat_ident("bot")) {
      if (idx) outs[*idx] = OutputValue::Bot;
    } else {
      ps.error(v, "expected 'top' or 'bot'");
      return res;
    }
  }
  p.output.assign(p.states.size(), OutputValue::Bot);
  for (std::size_t q = 0; q < p.states.size(); ++q) {
    auto it = outs.find(static_cast<StateId>(q));
    if (it == outs.end())
      ps.error({}, "output map is missing state '" + p.states[q] + "'");
    else
      p.output[q] = it->second;
  }

  if (!ps.eat_ident("trans")) {
    ps.error(ps.lex.peek(), "expected 'trans' section");
    return res;
  }
  while (ps.lex.peek().kind == Token::Kind::Ident) {
    Token first = ps.lex.take();
    auto a = lookup_state(ps, p, first, first.text);
    StateId q1 = -1, q2 = -1, q3 = -1, q4 = -1;
    if (ps.at_punct(",")) {
      // q1 , q2 -> q3 , q4 [guard]
      ps.lex.take();
      Token t2 = ps.lex.peek();
      auto b = ps.expect_ident("state");
      if (!b) return res;
      auto bi = lookup_state(ps, p, t2, *b);
      if (!ps.expect_punct("->")) return res;
      Token t3 = ps.lex.peek();
      auto c = ps.expect_ident("state");
      if (!c) return res;
      auto ci = lookup_state(ps, p, t3, *c);
      if (!ps.expect_punct(",")) return res;
      Token t4 = ps.lex.peek();
      auto d = ps.expect_ident("state");
      if (!d) return res;
      auto di = lookup_state(ps, p, t4, *d);
      if (!(a && bi && ci && di)) return res;
      q1 = *a;
      q2 = *bi;
      q3 = *ci;
      q4 = *di;
    } else if (ps.at_punct("->")) {
      // mover_from -> mover_to obs observed [guard]
      ps.lex.take();
      Token t2 = ps.lex.peek();
      auto to = ps.expect_ident("state");
      if (!to) return res;
      auto toi = lookup_state(ps, p, t2, *to);
      if (!ps.eat_ident("obs")) {
        ps.error(ps.lex.peek(), "expected 'obs'");
        return res;
      }
      Token t3 = ps.lex.peek();
      auto ob = ps.expect_ident("state");
      if (!ob) return res;
      auto obi = lookup_state(ps, p, t3, *ob);
      if (!(a && toi && obi)) return res;
      q1 = *obi;
      q2 = *a;
      q3 = *obi;
      q4 = *toi;
    } else {
      ps.error(ps.lex.peek(), "expected ',' or '->' in transition");
      return res;
    }
    if (!ps.expect_punct("[")) return res;
    Token g = ps.lex.peek();
    bool eq = false, neq = false;
    if (ps.eat_punct("=")) {
      eq = true;
    } else if (ps.eat_punct("!=")) {
      neq = true;
    } else if (ps.eat_punct("*")) {
      eq = neq = true;
    } else {
      ps.error(g, "expected guard '=', '!=' or '*'");
      return res;
    }
    if (!ps.expect_punct("]")) return res;
    if (eq) p.transitions.push_back({q1, q2, Guard::Eq, q3, q4});
    if (neq) p.transitions.push_back({q1, q2, Guard::Neq, q3, q4});
  }
  if (!ps.at_end()) ps.error(ps.lex.peek(), "trailing input after transitions");

  if (res.diagnostics.empty()) res.value = std::move(p);
  return res;
}

ParseResult<CanonicalConfiguration> parse_config(const std::string& text, const Protocol& p) {
  ParseResult<CanonicalConfiguration> res;
  Parser ps(text, res.diagnostics);
  std::vector<DatumProfile> raw;
  std::map<std::string, bool> seen;

  if (ps.eat_ident("empty")) {
    if (!ps.at_end()) ps.error(ps.lex.peek(), "trailing input after 'empty'");
    if (res.diagnostics.empty()) res.value = canonicalize({});
    return res;
  }

  while (ps.at_ident("datum")) {
    ps.lex.take();
    Token nt = ps.lex.peek();
    auto name = ps.expect_ident("datum name");
    if (!name) return res;
    if (seen[*name]) ps.error(nt, "duplicate datum '" + *name + "'");
    seen[*name] = true;
    if (!ps.expect_punct(":")) return res;
    DatumProfile prof;
    while (true) {
      Token st = ps.lex.peek();
      auto sname = ps.expect_ident("state");
      if (!sname) return res;
      auto idx = lookup_state(ps, p, st, *sname);
      if (!ps.expect_punct("=")) return res;
      auto n = ps.expect_number("agent count");
      if (!n) return res;
      if (idx && *n > 0) prof.add(*idx, static_cast<std::int64_t>(*n));
      if (!ps.eat_punct(",")) break;
    }
    raw.push_back(std::move(prof));
  }
  if (!ps.at_end()) ps.error(ps.lex.peek(), "expected 'datum' or end of input");
  if (res.diagnostics.empty()) res.value = canonicalize(std::move(raw));
  return res;
}

namespace {

// simple-pred := "E" var+ "." atom ("&" atom)*
std::optional<SimpleIntervalPredicate> parse_simple(Parser& ps, const Protocol& p) {
  SimpleIntervalPredicate s;
  std::map<std::string, std::uint32_t> vars;
  ps.lex.take();  // "E"
  while (ps.lex.peek().kind == Token::Kind::Ident) {
    Token t = ps.lex.take();
    if (vars.count(t.text)) {
      ps.error(t, "duplicate variable '" + t.text + "'");
      return std::nullopt;
    }
    const auto id = static_cast<std::uint32_t>(vars.size());
    vars[t.text] = id;
  }
  s.width = static_cast<std::uint32_t>(vars.size());
  if (s.width == 0) {
    ps.error(ps.lex.peek(), "dotted existential needs at least one variable");
    return std::nullopt;
  }
  if (!ps.expect_punct(".")) return std::nullopt;

  while (true) {
    if (!ps.expect_punct("#")) return std::nullopt;
    if (!ps.expect_punct("(")) return std::nullopt;
    Token st = ps.lex.peek();
    auto sname = ps.expect_ident("state");
    if (!sname) return std::nullopt;
    auto idx = lookup_state(ps, p, st, *sname);
    if (!ps.expect_punct(",")) return std::nullopt;
    Token vt = ps.lex.peek();
    auto vname = ps.expect_ident("variable");
    if (!vname) return std::nullopt;
    auto vit = vars.find(*vname);
    if (vit == vars.end()) {
      ps.error(vt, "unbound variable '" + *vname + "'");
      return std::nullopt;
    }
    if (!ps.expect_punct(")")) return std::nullopt;
    if (!ps.eat_ident("in")) {
      ps.error(ps.lex.peek(), "expected 'in'");
      return std::nullopt;
    }
    if (!ps.expect_punct("[")) return std::nullopt;
    auto lo = ps.expect_number("lower bound");
    if (!lo) return std::nullopt;
    if (!ps.expect_punct(",")) return std::nullopt;
    std::optional<std::uint64_t> hi;
    if (ps.eat_ident("inf")) {
      hi = std::nullopt;
    } else {
      auto h = ps.expect_number("upper bound or 'inf'");
      if (!h) return std::nullopt;
      hi = *h;
      if (*h < *lo) {
        ps.error(ps.lex.peek(), "empty interval: upper bound below lower bound");
        return std::nullopt;
      }
    }
    if (!ps.expect_punct("]")) return std::nullopt;
    if (idx) s.bounds.push_back({*idx, vit->second, *lo, hi});

    // '&' followed by '#' continues this simple predicate
    if (ps.at_punct("&") && ps.lex.peek2().kind == Token::Kind::Punct &&
        ps.lex.peek2().text == "#") {
      ps.lex.take();
      continue;
    }
    break;
  }
  return s;
}

std::optional<IntervalPredicate> parse_pred_expr(Parser& ps, const Protocol& p);

std::optional<IntervalPredicate> parse_pred_unary(Parser& ps, const Protocol& p) {
  if (ps.eat_punct("!")) {
    auto inner = parse_pred_unary(ps, p);
    if (!inner) return std::nullopt;
    return !*std::move(inner);
  }
  if (ps.eat_punct("(")) {
    auto inner = parse_pred_expr(ps, p);
    if (!inner) return std::nullopt;
    if (!ps.expect_punct(")")) return std::nullopt;
    return inner;
  }
  if (ps.at_ident("true")) {
    ps.lex.take();
    return predicate_true();
  }
  if (ps.at_ident("false")) {
    ps.lex.take();
    return predicate_false();
  }
  if (ps.at_ident("E")) {
    auto s = parse_simple(ps, p);
    if (!s) return std::nullopt;
    return IntervalPredicate::atom(*std::move(s));
  }
  ps.error(ps.lex.peek(), "expected a predicate");
  return std::nullopt;
}

std::optional<IntervalPredicate> parse_pred_and(Parser& ps, const Protocol& p) {
  auto left = parse_pred_unary(ps, p);
  if (!left) return std::nullopt;
  while (ps.eat_punct("&")) {
    auto right = parse_pred_unary(ps, p);
    if (!right) return std::nullopt;
    left = *std::move(left) && *std::move(right);
  }
  return left;
}

std::optional<IntervalPredicate> parse_pred_expr(Parser& ps, const Protocol& p) {
  auto left = parse_pred_and(ps, p);
  if (!left) return std::nullopt;
  while (ps.eat_punct("|")) {
    auto right = parse_pred_and(ps, p);
    if (!right) return std::nullopt;
    left = *std::move(left) || *std::move(right);
  }
  return left;
}

}  // namespace

ParseResult<IntervalPredicate> parse_predicate(const std::string& text, const Protocol& p) {
  ParseResult<IntervalPredicate> res;
  Parser ps(text, res.diagnostics);
  auto phi = parse_pred_expr(ps, p);
  if (phi && !ps.at_end()) ps.error(ps.lex.peek(), "trailing input after predicate");
  if (res.diagnostics.empty() && phi) res.value = *std::move(phi);
  return res;
}

namespace {

std::optional<Gre> parse_gre_expr(Parser& ps, const Protocol& p) {
  if (ps.eat_ident("pred")) {
    if (ps.lex.peek().kind != Token::Kind::String) {
      ps.error(ps.lex.peek(), "expected a quoted predicate");
      return std::nullopt;
    }
    Token t = ps.lex.take();
    auto inner = parse_predicate(t.text, p);
    if (!inner.ok()) {
      for (const Diagnostic& d : inner.diagnostics)
        ps.diags.push_back({t.line, t.col, "in quoted predicate: " + d.message});
      return std::nullopt;
    }
    return gre_atom(*std::move(inner.value));
  }
  auto unary = [&](auto make) -> std::optional<Gre> {
    if (!ps.expect_punct("(")) return std::nullopt;
    auto inner = parse_gre_expr(ps, p);
    if (!inner) return std::nullopt;
    if (!ps.expect_punct(")")) return std::nullopt;
    return make(*std::move(inner));
  };
  if (ps.eat_ident("union")) {
    if (!ps.expect_punct("(")) return std::nullopt;
    auto a = parse_gre_expr(ps, p);
    if (!a) return std::nullopt;
    if (!ps.expect_punct(",")) return std::nullopt;
    auto b = parse_gre_expr(ps, p);
    if (!b) return std::nullopt;
    if (!ps.expect_punct(")")) return std::nullopt;
    return gre_union(*std::move(a), *std::move(b));
  }
  if (ps.eat_ident("compl")) return unary(gre_complement);
  if (ps.at_ident("post")) {
    ps.lex.take();
    if (!ps.expect_punct("*")) return std::nullopt;
    return unary(gre_post_star);
  }
  if (ps.at_ident("pre")) {
    ps.lex.take();
    if (!ps.expect_punct("*")) return std::nullopt;
    return unary(gre_pre_star);
  }
  ps.error(ps.lex.peek(), "expected 'pred', 'union', 'compl', 'post*' or 'pre*'");
  return std::nullopt;
}

}  // namespace

ParseResult<Gre> parse_gre(const std::string& text, const Protocol& p) {
  ParseResult<Gre> res;
  Parser ps(text, res.diagnostics);
  auto e = parse_gre_expr(ps, p);
  if (e && !ps.at_end()) ps.error(ps.lex.peek(), "trailing input after expression");
  if (res.diagnostics.empty() && e) res.value = *std::move(e);
  return res;
}

ParseResult<ConcreteRun> parse_run(const std::string& text, const Protocol& p) {
  ParseResult<ConcreteRun> res;
  Parser ps(text, res.diagnostics);
  ConcreteRun r;
  std::map<std::string, AgentId> agent_ids;
  std::map<std::string, DatumId> datum_ids;

  while (ps.at_ident("agent")) {
    ps.lex.take();
    Token nt = ps.lex.peek();
    auto name = ps.expect_ident("agent name");
    if (!name) return res;
    if (agent_ids.count(*name)) {
      ps.error(nt, "duplicate agent '" + *name + "'");
      return res;
    }
    if (!ps.eat_ident("datum")) {
      ps.error(ps.lex.peek(), "expected 'datum'");
      return res;
    }
    auto dname = ps.expect_ident("datum name");
    if (!dname) return res;
    if (!ps.eat_ident("at")) {
      ps.error(ps.lex.peek(), "expected 'at'");
      return res;
    }
    Token st = ps.lex.peek();
    auto sname = ps.expect_ident("state");
    if (!sname) return res;
    auto idx = lookup_state(ps, p, st, *sname);
    if (!idx) return res;

    const AgentId aid = static_cast<AgentId>(agent_ids.size());
    agent_ids[*name] = aid;
    auto dit = datum_ids.find(*dname);
    if (dit == datum_ids.end())
      dit = datum_ids.emplace(*dname, static_cast<DatumId>(datum_ids.size())).first;
    r.agents.push_back({aid, dit->second, *idx});
    r.agent_names[aid] = *name;
    r.datum_names[dit->second] = *dname;
  }

  while (ps.at_ident("step")) {
    ps.lex.take();
    Token at = ps.lex.peek();
    auto actor = ps.expect_ident("actor agent");
    if (!actor) return res;
    if (!agent_ids.count(*actor)) {
      ps.error(at, "unknown agent '" + *actor + "'");
      return res;
    }
    if (!ps.eat_ident("obs")) {
      ps.error(ps.lex.peek(), "expected 'obs'");
      return res;
    }
    Token ot = ps.lex.peek();
    auto obs = ps.expect_ident("observed agent");
    if (!obs) return res;
    if (!agent_ids.count(*obs)) {
      ps.error(ot, "unknown agent '" + *obs + "'");
      return res;
    }
    if (!ps.eat_ident("via")) {
      ps.error(ps.lex.peek(), "expected 'via'");
      return res;
    }
    Token it = ps.lex.peek();
    auto tidx = ps.expect_number("transition index");
    if (!tidx) return res;
    if (*tidx >= p.transitions.size()) {
      ps.error(it, "transition index out of range");
      return res;
    }
    r.steps.push_back({static_cast<std::uint32_t>(*tidx), agent_ids[*actor], agent_ids[*obs]});
  }
  if (!ps.at_end()) ps.error(ps.lex.peek(), "expected 'agent', 'step' or end of input");
  if (res.diagnostics.empty()) res.value = std::move(r);
  return res;
}

ParseResult<CounterMachine> parse_cm(const std::string& text) {
  ParseResult<CounterMachine> res;
  Parser ps(text, res.diagnostics);
  CounterMachine m;
  std::map<std::string, std::uint32_t> labels;
  std::vector<std::pair<std::size_t, std::string>> pending;  // instruction -> label target
  std::vector<Token> pending_tok;

  while (!ps.at_end()) {
    // optional "label:" prefix
    if (ps.lex.peek().kind == Token::Kind::Ident && ps.lex.peek2().kind == Token::Kind::Punct &&
        ps.lex.peek2().text == ":") {
      Token lt = ps.lex.take();
      ps.lex.take();  // ':'
      if (labels.count(lt.text)) {
        ps.error(lt, "duplicate label '" + lt.text + "'");
        return res;
      }
      labels[lt.text] = static_cast<std::uint32_t>(m.instructions.size() + 1);
    }
    Token op = ps.lex.peek();
    if (ps.eat_ident("halt")) {
      m.instructions.push_back({Instruction::Op::Halt});
      continue;
    }
    Instruction ins;
    if (ps.eat_ident("inc")) {
      ins.op = Instruction::Op::Inc;
    } else if (ps.eat_ident("dec")) {
      ins.op = Instruction::Op::Dec;
    } else if (ps.eat_ident("jz")) {
      ins.op = Instruction::Op::ZeroTest;
    } else {
      ps.error(op, "expected 'inc', 'dec', 'jz' or 'halt'");
      return res;
    }
    Token ct = ps.lex.peek();
    if (ps.eat_ident("x")) {
      ins.counter = Counter::X;
    } else if (ps.eat_ident("y")) {
      ins.counter = Counter::Y;
    } else {
      ps.error(ct, "expected counter 'x' or 'y'");
      return res;
    }
    if (ins.op == Instruction::Op::ZeroTest) {
      Token tt = ps.lex.peek();
      if (tt.kind == Token::Kind::Number) {
        ins.target = static_cast<std::uint32_t>(*ps.expect_number("target"));
      } else if (tt.kind == Token::Kind::Ident) {
        pending.push_back({m.instructions.size(), ps.lex.take().text});
        pending_tok.push_back(tt);
      } else {
        ps.error(tt, "expected a jump target (number or label)");
        return res;
      }
    }
    m.instructions.push_back(ins);
  }

  for (std::size_t k = 0; k < pending.size(); ++k) {
    auto it = labels.find(pending[k].second);
    if (it == labels.end()) {
      ps.error(pending_tok[k], "unknown label '" + pending[k].second + "'");
      return res;
    }
    m.instructions[pending[k].first].target = it->second;
  }
  if (res.diagnostics.empty()) res.value = std::move(m);
  return res;
}

ParseResult<Container> parse_container(const std::string& text, const Protocol& p) {
  ParseResult<Container> res;
  Parser ps(text, res.diagnostics);
  Container cont;
  if (!ps.eat_ident("container")) {
    ps.error(ps.lex.peek(), "expected 'container'");
    return res;
  }
  if (!ps.eat_ident("n")) {
    ps.error(ps.lex.peek(), "expected 'n'");
    return res;
  }
  if (!ps.expect_punct("=")) return res;
  auto n = ps.expect_number("threshold n");
  if (!n) return res;
  if (!ps.eat_ident("M")) {
    ps.error(ps.lex.peek(), "expected 'M'");
    return res;
  }
  if (!ps.expect_punct("=")) return res;
  auto m = ps.expect_number("threshold M");
  if (!m) return res;
  cont.n = static_cast<std::uint32_t>(*n);
  cont.m = static_cast<std::uint32_t>(*m);
  if (cont.n < 1 || cont.m < 1) {
    ps.error(ps.lex.peek(), "container thresholds must be at least 1");
    return res;
  }

  while (ps.at_ident("box")) {
    ps.lex.take();
    NBox b;
    b.threshold = cont.n;
    while (ps.lex.peek().kind == Token::Kind::Ident) {
      Token st = ps.lex.peek();
      auto sname = ps.expect_ident("state");
      if (!sname) return res;
      auto idx = lookup_state(ps, p, st, *sname);
      if (!ps.expect_punct("=")) return res;
      auto v = ps.expect_number("box value");
      if (!v) return res;
      if (*v > cont.n) {
        ps.error(st, "box value above threshold n");
        return res;
      }
      if (idx && *v > 0) b.values.push_back({*idx, static_cast<std::uint32_t>(*v)});
    }
    if (!ps.expect_punct(":")) return res;
    auto cnt = ps.expect_number("datum count");
    if (!cnt) return res;
    if (*cnt > cont.m) {
      ps.error(ps.lex.peek(), "datum count above threshold M");
      return res;
    }
    std::sort(b.values.begin(), b.values.end());
    if (*cnt > 0 && !b.values.empty())
      cont.counts.push_back({std::move(b), static_cast<std::uint32_t>(*cnt)});
  }
  if (!ps.at_end()) ps.error(ps.lex.peek(), "expected 'box' or end of input");
  std::sort(cont.counts.begin(), cont.counts.end());
  if (res.diagnostics.empty()) res.value = std::move(cont);
  return res;
}

// ---------------------------------------------------------------------------
// serialisers

std::string serialize_protocol(const Protocol& p) {
  std::ostringstream os;
  os << "states";
  for (const auto& s : p.states) os << " " << s;
  os << "\ninit";
  for (StateId q : p.initial) os << " " << p.states[q];
  os << "\noutput";
  for (std::size_t q = 0; q < p.states.size(); ++q)
    os << " " << p.states[q] << " = " << (p.output[q] == OutputValue::Top ? "top" : "bot");
  os << "\ntrans\n";
  for (const Transition& t : p.transitions)
    os << "  " << p.states[t.q1] << ", " << p.states[t.q2] << " -> " << p.states[t.q3] << ", "
       << p.states[t.q4] << " [" << (t.guard == Guard::Eq ? "=" : "!=") << "]\n";
  return os.str();
}

std::string serialize_config(const CanonicalConfiguration& c, const Protocol& p) {
  if (c.empty()) return "empty\n";
  std::ostringstream os;
  std::size_t d = 1;
  for (const auto& [prof, mult] : c.profiles) {
    for (std::uint32_t k = 0; k < mult; ++k, ++d) {
      os << "datum d" << d << ":";
      bool first = true;
      for (const auto& [s, cnt] : prof.counts) {
        os << (first ? " " : ", ") << p.states[s] << " = " << cnt;
        first = false;
      }
      os << "\n";
    }
  }
  return os.str();
}

namespace {

void serialize_pred_rec(std::ostringstream& os, const IntervalPredicate& phi, const Protocol& p) {
  switch (phi.kind) {
    case IntervalPredicate::Kind::Leaf: {
      const SimpleIntervalPredicate& s = phi.leaf;
      if (s.width == 0) {
        os << "true";
        return;
      }
      os << "E";
      for (std::uint32_t v = 0; v < s.width; ++v) os << " x" << (v + 1);
      os << " .";
      if (s.bounds.empty()) {
        // the grammar needs at least one constraint; emit a vacuous interval
        os << " #(" << p.states.at(0) << ", x1) in [0, inf]";
        return;
      }
      bool first = true;
      for (const IntervalBound& b : s.bounds) {
        os << (first ? " " : " & ") << "#(" << p.states[b.state] << ", x" << (b.var + 1)
           << ") in [" << b.lo << ", ";
        if (b.hi)
          os << *b.hi;
        else
          os << "inf";
        os << "]";
        first = false;
      }
      return;
    }
    case IntervalPredicate::Kind::Not:
      os << "!(";
      serialize_pred_rec(os, *phi.left, p);
      os << ")";
      return;
    case IntervalPredicate::Kind::And:
      os << "(";
      serialize_pred_rec(os, *phi.left, p);
      os << " & ";
      serialize_pred_rec(os, *phi.right, p);
      os << ")";
      return;
    case IntervalPredicate::Kind::Or:
      os << "(";
      serialize_pred_rec(os, *phi.left, p);
      os << " | ";
      serialize_pred_rec(os, *phi.right, p);
      os << ")";
      return;
  }
}

}  // namespace

std::string serialize_predicate(const IntervalPredicate& phi, const Protocol& p) {
  std::ostringstream os;
  serialize_pred_rec(os, phi, p);
  return os.str();
}

std::string serialize_gre(const GreNode& e, const Protocol& p) {
  std::ostringstream os;
  switch (e.kind) {
    case GreNode::Kind::Atom: {
      std::string inner = serialize_predicate(e.atom, p);
      std::string escaped;
      for (char ch : inner) {
        if (ch == '"' || ch == '\\') escaped.push_back('\\');
        escaped.push_back(ch);
      }
      os << "pred \"" << escaped << "\"";
      break;
    }
    case GreNode::Kind::Union:
      os << "union(" << serialize_gre(*e.left, p) << ", " << serialize_gre(*e.right, p) << ")";
      break;
    case GreNode::Kind::Complement:
      os << "compl(" << serialize_gre(*e.left, p) << ")";
      break;
    case GreNode::Kind::PostStar:
      os << "post*(" << serialize_gre(*e.left, p) << ")";
      break;
    case GreNode::Kind::PreStar:
      os << "pre*(" << serialize_gre(*e.left, p) << ")";
      break;
  }
  return os.str();
}

std::string serialize_run(const ConcreteRun& r, const Protocol& p) {
  std::ostringstream os;
  auto aname = [&](AgentId id) {
    auto it = r.agent_names.find(id);
    return it != r.agent_names.end() ? it->second : "a" + std::to_string(id);
  };
  auto dname = [&](DatumId id) {
    auto it = r.datum_names.find(id);
    return it != r.datum_names.end() ? it->second : "d" + std::to_string(id);
  };
  for (const RunAgent& a : r.agents)
    os << "agent " << aname(a.id) << " datum " << dname(a.datum) << " at " << p.states[a.start]
       << "\n";
  for (const RunStep& s : r.steps)
    os << "step " << aname(s.actor) << " obs " << aname(s.observed) << " via " << s.transition
       << "\n";
  return os.str();
}

std::string serialize_cm(const CounterMachine& m) {
  std::ostringstream os;
  for (const Instruction& ins : m.instructions) {
    switch (ins.op) {
      case Instruction::Op::Inc:
        os << "inc " << (ins.counter == Counter::X ? "x" : "y") << "\n";
        break;
      case Instruction::Op::Dec:
        os << "dec " << (ins.counter == Counter::X ? "x" : "y") << "\n";
        break;
      case Instruction::Op::ZeroTest:
        os << "jz " << (ins.counter == Counter::X ? "x" : "y") << " " << ins.target << "\n";
        break;
      case Instruction::Op::Halt:
        os << "halt\n";
        break;
    }
  }
  return os.str();
}

std::string serialize_container(const Container& cont, const Protocol& p) {
  std::ostringstream os;
  os << "container n = " << cont.n << " M = " << cont.m << "\n";
  for (const auto& [b, count] : cont.counts) {
    os << "box";
    for (const auto& [s, v] : b.values) os << " " << p.states[s] << " = " << v;
    os << " : " << count << "\n";
  }
  return os.str();
}

std::string serialize_trace(const Trace& tr, const Protocol& p) {
  std::ostringstream os;
  for (const auto& [pair, count] : tr.counts)
    os << p.states[pair.first] << " -> " << p.states[pair.second] << " : " << count << "\n";
  return os.str();
}

std::string serialize_split_trace(const SplitTrace& st, const Protocol& p) {
  std::ostringstream os;
  for (const auto& [triple, count] : st.counts)
    os << p.states[std::get<0>(triple)] << " -> " << p.states[std::get<1>(triple)] << " -> "
       << p.states[std::get<2>(triple)] << " : " << count << "\n";
  return os.str();
}

}  // namespace ppud

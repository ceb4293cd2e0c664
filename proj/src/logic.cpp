#include "egt/logic.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace egt {

namespace {

FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

}  // namespace

FormulaPtr f_true() {
  static const FormulaPtr t = make({});
  return t;
}

FormulaPtr f_rat(int player) {
  Formula f;
  f.tag = Formula::Tag::RatAtom;
  f.player = player;
  return make(std::move(f));
}

FormulaPtr f_play(int player, int strat) {
  Formula f;
  f.tag = Formula::Tag::Play;
  f.player = player;
  f.strat = strat;
  return make(std::move(f));
}

FormulaPtr f_not(FormulaPtr child) {
  Formula f;
  f.tag = Formula::Tag::Not;
  f.children = {std::move(child)};
  return make(std::move(f));
}

FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
  Formula f;
  f.tag = Formula::Tag::And;
  f.children = {std::move(a), std::move(b)};
  return make(std::move(f));
}

FormulaPtr f_and_all(std::vector<FormulaPtr> fs) {
  if (fs.empty()) return f_true();
  FormulaPtr acc = fs.back();
  for (int i = static_cast<int>(fs.size()) - 2; i >= 0; --i)
    acc = f_and(fs[i], acc);
  return acc;
}

FormulaPtr f_b(int player, std::vector<FormulaPtr> list) {
  Formula f;
  f.tag = Formula::Tag::B;
  f.player = player;
  f.children = std::move(list);
  return make(std::move(f));
}

FormulaPtr f_pb(int player, FormulaPtr child) {
  Formula f;
  f.tag = Formula::Tag::PB;
  f.player = player;
  f.children = {std::move(child)};
  return make(std::move(f));
}

FormulaPtr f_o(int player, std::vector<FormulaPtr> list, bool prime) {
  Formula f;
  f.tag = Formula::Tag::O;
  f.player = player;
  f.prime = prime;
  f.children = std::move(list);
  return make(std::move(f));
}

FormulaPtr f_diamond(FormulaPtr child) {
  Formula f;
  f.tag = Formula::Tag::Diamond;
  f.children = {std::move(child)};
  return make(std::move(f));
}

FormulaPtr f_bd(int player, Rat delta, FormulaPtr child, FormulaPtr cond) {
  Formula f;
  f.tag = Formula::Tag::Bd;
  f.player = player;
  f.delta = std::move(delta);
  f.children = {std::move(child)};
  if (cond) {
    f.has_condition = true;
    f.children.push_back(std::move(cond));
  }
  return make(std::move(f));
}

FormulaPtr f_pbd(int player, Rat eps, FormulaPtr child, FormulaPtr cond) {
  Formula f;
  f.tag = Formula::Tag::PBd;
  f.player = player;
  f.eps = std::move(eps);
  f.children = {std::move(child)};
  if (cond) {
    f.has_condition = true;
    f.children.push_back(std::move(cond));
  }
  return make(std::move(f));
}

FormulaPtr f_od(int player, Rat delta, Rat eps, std::vector<FormulaPtr> list) {
  Formula f;
  f.tag = Formula::Tag::Od;
  f.player = player;
  f.delta = std::move(delta);
  f.eps = std::move(eps);
  f.children = std::move(list);
  return make(std::move(f));
}

FormulaPtr f_init(FormulaPtr child) {
  Formula f;
  f.tag = Formula::Tag::Init;
  f.children = {std::move(child)};
  return make(std::move(f));
}

FormulaPtr f_g(FormulaPtr child) {
  Formula f;
  f.tag = Formula::Tag::G;
  f.children = {std::move(child)};
  return make(std::move(f));
}

FormulaPtr f_macro(MacroKind kind, int k, int player, bool group, Rat delta,
                   Rat eps, bool prime) {
  // Interned so that repeated references share one node; the evaluator's
  // per-node memoization then makes deep macro chains polynomial.
  using Key = std::tuple<int, int, int, bool, std::string, std::string, bool>;
  static std::map<Key, FormulaPtr> cache;
  static std::mutex mu;
  Key key{static_cast<int>(kind), k, player, group, delta.str(), eps.str(),
          prime};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Formula f;
  f.tag = Formula::Tag::Macro;
  f.macro = kind;
  f.macro_k = k;
  f.player = player;
  f.group = group;
  f.delta = std::move(delta);
  f.eps = std::move(eps);
  f.prime = prime;
  return cache.emplace(key, make(std::move(f))).first->second;
}

namespace {

const char* macro_name(MacroKind kind, bool prime) {
  switch (kind) {
    case MacroKind::RatK: return "RATK";
    case MacroKind::Ek: return "EK";
    case MacroKind::RatZero: return "RATZ";
    case MacroKind::PlayConZero: return "PLAYCON";
    case MacroKind::GratZero: return "GRATZ";
    case MacroKind::GratApprox: return "GRATA";
    case MacroKind::RatEfr: return prime ? "RATEFRP" : "RATEFR";
    case MacroKind::RatEfrPrime: return "RATEFRP";
    case MacroKind::PlayConEfr: return prime ? "PLAYCONEFRP" : "PLAYCONEFR";
  }
  return "?";
}

}  // namespace

std::string formula_to_string(const NormalFormGame& g, const FormulaPtr& f) {
  std::ostringstream os;
  auto rec = [&](auto&& self, const FormulaPtr& node) -> void {
    switch (node->tag) {
      case Formula::Tag::True: os << "true"; break;
      case Formula::Tag::RatAtom: os << "RAT[" << node->player + 1 << "]"; break;
      case Formula::Tag::Play:
        os << "play[" << node->player + 1
           << "]=" << g.strategies[node->player][node->strat];
        break;
      case Formula::Tag::Not:
        os << "!";
        self(self, node->children[0]);
        break;
      case Formula::Tag::And:
        os << "(";
        self(self, node->children[0]);
        os << " & ";
        self(self, node->children[1]);
        os << ")";
        break;
      case Formula::Tag::B:
      case Formula::Tag::O: {
        os << (node->tag == Formula::Tag::B ? "B" : "O") << "["
           << node->player + 1 << "]" << (node->prime ? "'" : "") << "(";
        for (std::size_t i = 0; i < node->children.size(); ++i) {
          if (i) os << ",";
          self(self, node->children[i]);
        }
        os << ")";
        break;
      }
      case Formula::Tag::PB:
        os << "PB[" << node->player + 1 << "](";
        self(self, node->children[0]);
        os << ")";
        break;
      case Formula::Tag::Bd:
      case Formula::Tag::PBd: {
        bool pb = node->tag == Formula::Tag::PBd;
        os << (pb ? "PBd[" : "Bd[") << node->player + 1 << ","
           << (pb ? node->eps.str() : node->delta.str()) << "](";
        self(self, node->children[0]);
        if (node->has_condition) {
          os << "|";
          self(self, node->children[1]);
        }
        os << ")";
        break;
      }
      case Formula::Tag::Od: {
        os << "Od[" << node->player + 1 << "," << node->delta.str() << ","
           << node->eps.str() << "](";
        for (std::size_t i = 0; i < node->children.size(); ++i) {
          if (i) os << ",";
          self(self, node->children[i]);
        }
        os << ")";
        break;
      }
      case Formula::Tag::Diamond:
        os << "DIA(";
        self(self, node->children[0]);
        os << ")";
        break;
      case Formula::Tag::Init:
        os << "INIT(";
        self(self, node->children[0]);
        os << ")";
        break;
      case Formula::Tag::G:
        os << "G(";
        self(self, node->children[0]);
        os << ")";
        break;
      case Formula::Tag::Macro:
        os << macro_name(node->macro, node->prime) << "^" << node->macro_k
           << "[" << (node->group ? "-" : "") << node->player + 1;
        if (node->macro == MacroKind::GratApprox)
          os << ";" << node->delta.str() << "," << node->eps.str();
        os << "]";
        break;
    }
  };
  rec(rec, f);
  return os.str();
}

// --------------------------------------------------------------------------
// Parser

namespace {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n')) {
      if (text[pos] == '\n') { ++line; col = 1; } else ++col;
      ++pos;
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, col);
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) { ++pos; ++col; return true; }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  bool peek_word(const std::string& w) {
    skip_ws();
    if (text.compare(pos, w.size(), w) != 0) return false;
    // keywords must not continue into an identifier
    std::size_t end = pos + w.size();
    if (end < text.size() && (std::isalnum(text[end]) || text[end] == '_'))
      return false;
    return true;
  }

  bool eat_word(const std::string& w) {
    if (!peek_word(w)) return false;
    pos += w.size();
    col += static_cast<int>(w.size());
    return true;
  }

  int read_int() {
    skip_ws();
    std::size_t start = pos;
    if (pos < text.size() && text[pos] == '-') { ++pos; ++col; }
    while (pos < text.size() && std::isdigit(text[pos])) { ++pos; ++col; }
    if (start == pos) fail("expected integer");
    return std::stoi(text.substr(start, pos - start));
  }

  Rat read_rat() {
    int num = read_int();
    if (eat('/')) {
      int den = read_int();
      if (den == 0) fail("zero denominator");
      return Rat(num, den);
    }
    return Rat(num);
  }

  std::string read_label() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && (std::isalnum(text[pos]) || text[pos] == '_')) {
      ++pos;
      ++col;
    }
    if (start == pos) fail("expected label");
    return text.substr(start, pos - start);
  }

  bool done() {
    skip_ws();
    return pos >= text.size();
  }
};

struct Parser {
  Lexer lx;
  const NormalFormGame& g;

  Parser(const std::string& text, const NormalFormGame& game)
      : lx(text), g(game) {}

  int read_player() {
    int line = lx.line, col = lx.col;
    int p = lx.read_int();
    if (p < 1 || p > g.num_players())
      throw ParseError("unknown player " + std::to_string(p), line, col);
    return p - 1;
  }

  std::vector<FormulaPtr> read_list() {
    std::vector<FormulaPtr> list;
    list.push_back(formula());
    while (lx.eat(',')) list.push_back(formula());
    return list;
  }

  // Bare '&' chains are accepted outside parentheses as well.
  FormulaPtr formula() {
    FormulaPtr acc = unit();
    while (lx.eat('&')) acc = f_and(std::move(acc), unit());
    return acc;
  }

  FormulaPtr macro(MacroKind kind, bool prime = false) {
    lx.expect('^');
    int k = lx.read_int();
    if (k < 0) lx.fail("macro level must be >= 0");
    lx.expect('[');
    int p = read_player();
    Rat delta, eps;
    bool have_params = false;
    if (lx.eat(';')) {
      delta = lx.read_rat();
      lx.expect(',');
      eps = lx.read_rat();
      have_params = true;
    }
    lx.expect(']');
    if (kind == MacroKind::GratApprox && !have_params)
      lx.fail("GRATA needs ';delta,eps'");
    return f_macro(kind, k, p, false, delta, eps, prime);
  }

  FormulaPtr unit() {
    if (lx.eat_word("true")) return f_true();
    if (lx.eat_word("RATK")) return macro(MacroKind::RatK);
    if (lx.eat_word("RATZ")) return macro(MacroKind::RatZero);
    if (lx.eat_word("GRATZ")) return macro(MacroKind::GratZero);
    if (lx.eat_word("GRATA")) return macro(MacroKind::GratApprox);
    if (lx.eat_word("PLAYCON")) return macro(MacroKind::PlayConZero);
    if (lx.eat_word("EK")) return macro(MacroKind::Ek);
    if (lx.eat_word("RATEFRP")) return macro(MacroKind::RatEfr, true);
    if (lx.eat_word("RATEFR")) return macro(MacroKind::RatEfr);
    if (lx.eat_word("RAT")) {
      lx.expect('[');
      int p = read_player();
      lx.expect(']');
      return f_rat(p);
    }
    if (lx.eat_word("play")) {
      lx.expect('[');
      int p = read_player();
      lx.expect(']');
      lx.expect('=');
      int line = lx.line, col = lx.col;
      std::string label = lx.read_label();
      int s = g.strategy_index(p, label);
      if (s < 0)
        throw ParseError("unknown strategy '" + label + "' for player " +
                             std::to_string(p + 1),
                         line, col);
      return f_play(p, s);
    }
    if (lx.eat('!')) return f_not(unit());
    if (lx.eat('(')) {
      FormulaPtr a = formula();
      lx.expect(')');
      return a;
    }
    if (lx.eat_word("B")) {
      lx.expect('[');
      int p = read_player();
      lx.expect(']');
      lx.expect('(');
      auto list = read_list();
      lx.expect(')');
      return f_b(p, std::move(list));
    }
    if (lx.eat_word("PB")) {
      lx.expect('[');
      int p = read_player();
      lx.expect(']');
      lx.expect('(');
      FormulaPtr body = formula();
      lx.expect(')');
      return f_pb(p, std::move(body));
    }
    if (lx.eat_word("O")) {
      lx.expect('[');
      int p = read_player();
      lx.expect(']');
      lx.expect('(');
      auto list = read_list();
      lx.expect(')');
      return f_o(p, std::move(list));
    }
    bool is_bd = lx.peek_word("Bd"), is_pbd = lx.peek_word("PBd");
    if (is_bd || is_pbd) {
      lx.eat_word(is_pbd ? "PBd" : "Bd");
      lx.expect('[');
      int p = read_player();
      lx.expect(',');
      Rat r = lx.read_rat();
      lx.expect(']');
      lx.expect('(');
      FormulaPtr body = formula();
      FormulaPtr cond;
      if (lx.eat('|')) cond = formula();
      lx.expect(')');
      return is_pbd ? f_pbd(p, r, std::move(body), std::move(cond))
                    : f_bd(p, r, std::move(body), std::move(cond));
    }
    if (lx.eat_word("Od")) {
      lx.expect('[');
      int p = read_player();
      lx.expect(',');
      Rat d = lx.read_rat();
      lx.expect(',');
      Rat e = lx.read_rat();
      lx.expect(']');
      lx.expect('(');
      auto list = read_list();
      lx.expect(')');
      return f_od(p, std::move(d), std::move(e), std::move(list));
    }
    if (lx.eat_word("DIA")) {
      lx.expect('(');
      FormulaPtr body = formula();
      lx.expect(')');
      return f_diamond(std::move(body));
    }
    if (lx.eat_word("INIT")) {
      lx.expect('(');
      FormulaPtr body = formula();
      lx.expect(')');
      return f_init(std::move(body));
    }
    if (lx.eat_word("G")) {
      lx.expect('(');
      FormulaPtr body = formula();
      lx.expect(')');
      return f_g(std::move(body));
    }
    lx.fail("expected formula");
  }
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, const NormalFormGame& g) {
  Parser p(text, g);
  FormulaPtr f = p.formula();
  if (!p.lx.done()) p.lx.fail("trailing input");
  return f;
}

// --------------------------------------------------------------------------
// Macro expansion

namespace {

FormulaPtr group_of(MacroKind kind, int k, int except_player,
                    const NormalFormGame& g, const Rat& delta, const Rat& eps,
                    bool prime) {
  std::vector<FormulaPtr> parts;
  for (int j = 0; j < g.num_players(); ++j)
    if (j != except_player)
      parts.push_back(f_macro(kind, k, j, false, delta, eps, prime));
  return f_and_all(std::move(parts));
}

FormulaPtr implies(FormulaPtr a, FormulaPtr b) {
  return f_not(f_and(std::move(a), f_not(std::move(b))));
}

FormulaPtr playcon(const NormalFormGame& g, int i, MacroKind rat_kind, int k,
                   bool prime) {
  std::vector<FormulaPtr> parts;
  for (int s = 0; s < g.num_strategies(i); ++s) {
    FormulaPtr play = f_play(i, s);
    FormulaPtr target = f_macro(rat_kind, k, i, false, Rat(), Rat(), prime);
    parts.push_back(implies(play, f_diamond(f_and(play, target))));
  }
  return f_and_all(std::move(parts));
}

}  // namespace

FormulaPtr expand_macro(const Formula& m, const NormalFormGame& g) {
  if (m.tag != Formula::Tag::Macro)
    throw std::invalid_argument("expand_macro: not a macro node");
  if (m.group)
    return group_of(m.macro, m.macro_k, m.player, g, m.delta, m.eps, m.prime);
  const int i = m.player;
  const int k = m.macro_k;
  switch (m.macro) {
    case MacroKind::RatK: {
      if (k == 0) return f_true();
      return f_and(f_rat(i),
                   f_b(i, {f_macro(MacroKind::RatK, k - 1, i, true)}));
    }
    case MacroKind::Ek: {
      // EK^k[i] abbreviates B_i E^k RAT.
      std::vector<FormulaPtr> rats;
      for (int j = 0; j < g.num_players(); ++j) rats.push_back(f_rat(j));
      FormulaPtr body = f_and_all(std::move(rats));
      for (int h = 0; h < k; ++h) {
        std::vector<FormulaPtr> parts;
        for (int j = 0; j < g.num_players(); ++j)
          parts.push_back(f_b(j, {body}));
        body = f_and_all(std::move(parts));
      }
      return f_b(i, {body});
    }
    case MacroKind::RatZero: {
      if (k == 0) return f_true();
      FormulaPtr pc = f_macro(MacroKind::PlayConZero, k - 1, i);
      FormulaPtr o = f_o(i, {f_macro(MacroKind::RatZero, k - 1, i, true)});
      return f_and(f_rat(i), f_and(f_b(i, {pc}), o));
    }
    case MacroKind::PlayConZero:
      return playcon(g, i, MacroKind::RatZero, k, false);
    case MacroKind::GratZero: {
      if (k == 0) return f_true();
      std::vector<FormulaPtr> list;
      for (int h = k - 1; h >= 0; --h)
        list.push_back(f_macro(MacroKind::GratZero, h, i, true));
      return f_and(f_rat(i), f_o(i, std::move(list)));
    }
    case MacroKind::GratApprox: {
      if (k == 0) return f_true();
      std::vector<FormulaPtr> list;
      for (int h = k - 1; h >= 0; --h)
        list.push_back(
            f_macro(MacroKind::GratApprox, h, i, true, m.delta, m.eps));
      return f_and(f_rat(i), f_od(i, m.delta, m.eps, std::move(list)));
    }
    case MacroKind::RatEfr: {
      if (k == 0) return f_true();
      FormulaPtr head = f_init(f_b(i, {f_g(f_rat(i))}));
      FormulaPtr pc = f_macro(MacroKind::PlayConEfr, k - 1, i, false, Rat(),
                              Rat(), m.prime);
      FormulaPtr o = f_init(f_o(
          i, {f_macro(MacroKind::RatEfr, k - 1, i, true, Rat(), Rat(),
                      m.prime)},
          m.prime));
      return f_and(head, f_and(pc, o));
    }
    case MacroKind::RatEfrPrime:
      throw std::logic_error("RatEfrPrime is encoded as RatEfr with prime");
    case MacroKind::PlayConEfr:
      return playcon(g, i, MacroKind::RatEfr, k, m.prime);
  }
  throw std::logic_error("unhandled macro kind");
}

// --------------------------------------------------------------------------
// Diamond oracle

DiamondOracle::DiamondOracle(const NormalFormGame& g)
    : game_(g), nwd_(iterate_deletion(g, DomMode::Weak)) {
  GapReport gap = compute_gap(g);
  gap_ = gap.gap;
  epsilon0_ =
      compute_epsilon0(g, std::max(1, nwd_.fixpoint_round + 1)).epsilon0;
}

void DiamondOracle::set_ncd_rounds(std::vector<StrategySets> rounds) {
  ncd_rounds_ = std::move(rounds);
}

void DiamondOracle::add_search_structure(
    std::shared_ptr<const EpistemicStructure> s) {
  search_family_.push_back(std::move(s));
}

bool DiamondOracle::survives_ncd(int player, int strat, int k) const {
  if (ncd_rounds_.empty())
    throw std::logic_error("no extensive-form trace attached");
  std::size_t idx = std::min<std::size_t>(std::max(k, 0),
                                          ncd_rounds_.size() - 1);
  for (int s : ncd_rounds_[idx][player])
    if (s == strat) return true;
  return false;
}

namespace {

struct FlatQuery {
  bool matched = true;
  bool contradiction = false;
  std::vector<std::pair<int, int>> plays;  // (player, strat)
  std::vector<const Formula*> pos;         // positive macro literals
  std::vector<const Formula*> neg;         // negated macro literals
};

void flatten(const FormulaPtr& f, FlatQuery& q) {
  switch (f->tag) {
    case Formula::Tag::True:
      return;
    case Formula::Tag::And:
      flatten(f->children[0], q);
      flatten(f->children[1], q);
      return;
    case Formula::Tag::Play: {
      for (auto& [p, s] : q.plays)
        if (p == f->player && s != f->strat) q.contradiction = true;
      q.plays.push_back({f->player, f->strat});
      return;
    }
    case Formula::Tag::Macro:
      q.pos.push_back(f.get());
      return;
    case Formula::Tag::Not:
      if (f->children[0]->tag == Formula::Tag::Macro) {
        q.neg.push_back(f->children[0].get());
        return;
      }
      q.matched = false;
      return;
    default:
      q.matched = false;
  }
}

}  // namespace

DiamondAnswer DiamondOracle::match(const FormulaPtr& f) const {
  FlatQuery q;
  flatten(f, q);
  if (!q.matched) return DiamondAnswer::Unknown;
  if (q.contradiction) return DiamondAnswer::Unsat;

  if (q.pos.empty() && q.neg.empty()) return DiamondAnswer::Sat;

  // Single-player survivor patterns: play_i(s) & FAMILY^k[i].
  if (q.pos.size() == 1 && q.neg.empty() && !q.pos[0]->group) {
    const Formula* m = q.pos[0];
    for (auto& [p, s] : q.plays)
      if (p != m->player) return DiamondAnswer::Unknown;
    auto member = [&](int strat) -> DiamondAnswer {
      switch (m->macro) {
        case MacroKind::RatZero:
          return nwd_.survives(m->player, strat, m->macro_k)
                     ? DiamondAnswer::Sat
                     : DiamondAnswer::Unsat;
        case MacroKind::RatEfr:
          if (m->prime)
            return nwd_.survives(m->player, strat, m->macro_k)
                       ? DiamondAnswer::Sat
                       : DiamondAnswer::Unsat;
          if (ncd_rounds_.empty()) return DiamondAnswer::Unknown;
          return survives_ncd(m->player, strat, m->macro_k)
                     ? DiamondAnswer::Sat
                     : DiamondAnswer::Unsat;
        default:
          return DiamondAnswer::Unknown;
      }
    };
    if (q.plays.empty()) {
      // Some survivor always exists (rounds are never empty).
      switch (m->macro) {
        case MacroKind::RatZero:
        case MacroKind::RatEfr:
          return DiamondAnswer::Sat;
        default:
          return DiamondAnswer::Unknown;
      }
    }
    DiamondAnswer ans = DiamondAnswer::Sat;
    for (auto& [p, s] : q.plays) {
      DiamondAnswer a = member(s);
      if (a == DiamondAnswer::Unknown) return a;
      if (a == DiamondAnswer::Unsat) ans = DiamondAnswer::Unsat;
    }
    return ans;
  }

  // Group patterns: plays over -i, a positive group literal of level h (or
  // none, meaning h = 0), negated group literals of levels h+1..top of the
  // same family and the same -i.
  MacroKind family = q.pos.empty() ? q.neg[0]->macro : q.pos[0]->macro;
  if (family == MacroKind::RatK || family == MacroKind::Ek ||
      family == MacroKind::PlayConZero || family == MacroKind::PlayConEfr)
    return DiamondAnswer::Unknown;
  int except = -1;
  int pos_level = 0;
  bool prime = false;
  Rat delta, eps;
  if (!q.pos.empty()) {
    if (q.pos.size() != 1 || !q.pos[0]->group) return DiamondAnswer::Unknown;
    except = q.pos[0]->player;
    pos_level = q.pos[0]->macro_k;
    prime = q.pos[0]->prime;
    delta = q.pos[0]->delta;
    eps = q.pos[0]->eps;
  }
  std::vector<int> neg_levels;
  for (const Formula* m : q.neg) {
    if (!m->group || m->macro != family) return DiamondAnswer::Unknown;
    if (except < 0) {
      except = m->player;
      prime = m->prime;
      delta = m->delta;
      eps = m->eps;
    }
    if (m->player != except || m->prime != prime || m->delta != delta ||
        m->eps != eps)
      return DiamondAnswer::Unknown;
    neg_levels.push_back(m->macro_k);
  }
  if (except < 0) return DiamondAnswer::Unknown;
  // The negated levels must be exactly pos_level+1 .. pos_level+|neg|.
  std::sort(neg_levels.begin(), neg_levels.end());
  for (std::size_t idx = 0; idx < neg_levels.size(); ++idx)
    if (neg_levels[idx] != pos_level + 1 + static_cast<int>(idx))
      return DiamondAnswer::Unknown;
  for (auto& [p, s] : q.plays)
    if (p == except) return DiamondAnswer::Unknown;

  if (family == MacroKind::GratApprox) {
    // Characterized only at the theorem's parameters.
    if (!eps.is_positive() || eps > epsilon0_) return DiamondAnswer::Unknown;
    if (gap_) {
      if (delta != *gap_ * eps / Rat(4)) return DiamondAnswer::Unknown;
    } else if (!delta.is_positive() || delta >= Rat(1, 2)) {
      return DiamondAnswer::Unknown;
    }
  } else if (family != MacroKind::RatZero && family != MacroKind::GratZero &&
             family != MacroKind::RatEfr) {
    return DiamondAnswer::Unknown;
  }

  for (auto& [p, s] : q.plays) {
    bool alive;
    if (family == MacroKind::RatEfr && !prime) {
      if (ncd_rounds_.empty()) return DiamondAnswer::Unknown;
      alive = survives_ncd(p, s, pos_level);
    } else {
      alive = nwd_.survives(p, s, pos_level);
    }
    if (!alive) return DiamondAnswer::Unsat;
  }
  return DiamondAnswer::Sat;
}

DiamondAnswer DiamondOracle::query(const FormulaPtr& f) const {
  DiamondAnswer a = match(f);
  if (a != DiamondAnswer::Unknown) return a;
  // Bounded search over the attached structure family.
  thread_local const DiamondOracle* searching = nullptr;
  if (searching == this) return DiamondAnswer::Unknown;
  searching = this;
  for (const auto& s : search_family_) {
    for (int w = 0; w < s->num_states(); ++w) {
      try {
        if (eval(*s, w, f, *this, RatMode::Lex)) {
          searching = nullptr;
          return DiamondAnswer::Sat;
        }
      } catch (const std::exception&) {
        // undecidable or ill-typed at this state; keep searching
      }
    }
  }
  searching = nullptr;
  return DiamondAnswer::Unknown;
}

// --------------------------------------------------------------------------
// Evaluation

namespace {

struct PtrStateHash {
  std::size_t operator()(const std::pair<const Formula*, int>& k) const {
    return std::hash<const Formula*>()(k.first) * 1000003u +
           static_cast<std::size_t>(k.second);
  }
};

class Evaluator {
 public:
  Evaluator(const EpistemicStructure& s, const DiamondOracle& oracle,
            RatMode mode, EvalTrace* trace)
      : s_(s), oracle_(oracle), mode_(mode), trace_(trace) {}

  bool ev(int state, const FormulaPtr& f) {
    auto key = std::make_pair(f.get(), state);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool value = compute(state, f);
    memo_.emplace(key, value);
    return value;
  }

 private:
  void note(const std::string& line) {
    if (trace_) trace_->lines.push_back(line);
  }

  const OppProfiles& full_opp(int player) {
    if (opp_.empty()) opp_.resize(s_.num_players());
    if (opp_[player].items.empty() && s_.game.num_players() > 1)
      opp_[player] = OppProfiles::enumerate_full(s_.game, player);
    return opp_[player];
  }

  // States where the formula holds.
  const std::vector<char>& event(const FormulaPtr& f) {
    auto it = event_.find(f.get());
    if (it != event_.end()) return it->second;
    std::vector<char> v(s_.num_states());
    for (int w = 0; w < s_.num_states(); ++w) v[w] = ev(w, f) ? 1 : 0;
    return event_.emplace(f.get(), std::move(v)).first->second;
  }

  std::vector<int> event_states(const FormulaPtr& f) {
    const auto& v = event(f);
    std::vector<int> out;
    for (int w = 0; w < s_.num_states(); ++w)
      if (v[w]) out.push_back(w);
    return out;
  }

  const FormulaPtr& expansion(const FormulaPtr& f) {
    auto it = expansion_.find(f.get());
    if (it != expansion_.end()) return it->second;
    return expansion_.emplace(f.get(), expand_macro(*f, s_.game))
        .first->second;
  }

  // Projection of the player's state LPS onto opponent profiles.
  const Lps& opp_projection(int player, int state) {
    auto key = std::make_pair(player, state);
    auto it = proj_.find(key);
    if (it != proj_.end()) return it->second;
    const Lps& lps = s_.beliefs[player][state];
    const OppProfiles& opp = full_opp(player);
    Lps out;
    out.carrier_size = opp.size();
    for (const auto& level : lps.levels) {
      std::vector<Rat> row(opp.size(), Rat::zero());
      for (int w = 0; w < s_.num_states(); ++w) {
        if (level[w].is_zero()) continue;
        int q = opp.index_of(s_.strat[w]);
        row[q] += level[w];
      }
      out.levels.push_back(std::move(row));
    }
    return proj_.emplace(key, std::move(out)).first->second;
  }

  bool rat_holds(int player, int state) {
    const Lps& proj = opp_projection(player, state);
    int mine = s_.strat[state][player];
    const OppProfiles& opp = full_opp(player);
    for (int other = 0; other < s_.game.num_strategies(player); ++other) {
      if (other == mine) continue;
      if (mode_ == RatMode::Prob) {
        Rat eu_mine, eu_other;
        for (int q = 0; q < opp.size(); ++q) {
          if (proj.levels[0][q].is_zero()) continue;
          eu_mine += proj.levels[0][q] *
                     s_.game.payoff(player, combine(opp.items[q], player, mine));
          eu_other += proj.levels[0][q] *
                      s_.game.payoff(player,
                                     combine(opp.items[q], player, other));
        }
        if (eu_mine < eu_other) return false;
      } else {
        if (lex_compare_eu(s_.game, player, mine, other, opp, proj) ==
            Order::Less)
          return false;
      }
    }
    return true;
  }

  Rat level_mass(const std::vector<Rat>& level, const std::vector<char>& ev) {
    Rat total;
    for (int w = 0; w < s_.num_states(); ++w)
      if (ev[w] && !level[w].is_zero()) total += level[w];
    return total;
  }

  // First level giving the event positive mass; -1 when lexicographically null.
  int first_level(const Lps& lps, const std::vector<char>& ev) {
    for (int h = 0; h < lps.length(); ++h)
      if (level_mass(lps.levels[h], ev).is_positive()) return h;
    return -1;
  }

  // mu(target | given)_0, given the level where `given` first gets mass.
  Rat first_cond(const Lps& lps, int level, const std::vector<char>& target,
                 const std::vector<char>& given) {
    Rat num, den;
    for (int w = 0; w < s_.num_states(); ++w) {
      if (!given[w] || lps.levels[level][w].is_zero()) continue;
      den += lps.levels[level][w];
      if (target[w]) num += lps.levels[level][w];
    }
    return num / den;
  }

  std::vector<char> conj_event(const std::vector<const std::vector<char>*>& neg,
                               int upto) {
    std::vector<char> out(s_.num_states(), 1);
    for (int i = 0; i < upto; ++i)
      for (int w = 0; w < s_.num_states(); ++w)
        if ((*neg[i])[w]) out[w] = 0;
    return out;
  }

  std::vector<char> play_event(const std::vector<std::pair<int, int>>& plays) {
    std::vector<char> out(s_.num_states(), 1);
    for (int w = 0; w < s_.num_states(); ++w)
      for (auto& [p, strat] : plays)
        if (s_.strat[w][p] != strat) { out[w] = 0; break; }
    return out;
  }

  static bool empty_event(const std::vector<char>& ev) {
    for (char c : ev)
      if (c) return false;
    return true;
  }

  bool eval_b_list(int state, int player,
                   const std::vector<FormulaPtr>& list) {
    const Lps& lps = s_.beliefs[player][state];
    for (std::size_t h = 0; h < list.size(); ++h) {
      const auto& phi = event(list[h]);
      if (h == 0) {
        if (level_mass(lps.levels[0], phi) != Rat::one()) return false;
        continue;
      }
      std::vector<const std::vector<char>*> negs;
      for (std::size_t g = 0; g < h; ++g) negs.push_back(&event(list[g]));
      std::vector<char> cond = conj_event(negs, static_cast<int>(h));
      // Empty conditioning events make the clause vacuous (the no-deletion
      // degenerate case); a nonempty event the agent deems lexicographically
      // impossible fails the well-definedness guard instead.
      if (empty_event(cond)) {
        note("B: clause " + std::to_string(h + 1) +
             " vacuous (empty conditioning event)");
        continue;
      }
      int lvl = first_level(lps, cond);
      if (lvl < 0) return false;
      if (first_cond(lps, lvl, phi, cond) != Rat::one()) return false;
    }
    return true;
  }

  // Builds the consistency query !phi_1 & ... & !phi_{h-1} & phi_h & psi.
  FormulaPtr clause_query(const std::vector<FormulaPtr>& list, std::size_t h,
                          const FormulaPtr& psi) {
    std::vector<FormulaPtr> parts;
    for (std::size_t g = 0; g + 1 < h; ++g) parts.push_back(f_not(list[g]));
    parts.push_back(list[h - 1]);
    parts.push_back(psi);
    return f_and_all(std::move(parts));
  }

  DiamondAnswer ask(const FormulaPtr& f) { return oracle_.query(f); }

  bool eval_o(int state, const Formula& o) {
    const int i = o.player;
    if (!eval_b_list(state, i, o.children)) return false;
    const Lps& lps = s_.beliefs[i][state];
    const OppProfiles& opp = full_opp(i);
    for (std::size_t h = 1; h <= o.children.size(); ++h) {
      std::vector<char> cond;
      int lvl = 0;
      bool vacuous = false;
      if (h > 1) {
        std::vector<const std::vector<char>*> negs;
        for (std::size_t g = 0; g + 1 < h; ++g)
          negs.push_back(&event(o.children[g]));
        cond = conj_event(negs, static_cast<int>(h) - 1);
        if (empty_event(cond)) {
          note("O: clause " + std::to_string(h) +
               " vacuous (empty conditioning event)");
          vacuous = true;
        } else {
          lvl = first_level(lps, cond);
        }
      }
      if (vacuous) continue;
      for (int q = 0; q < opp.size(); ++q) {
        std::vector<FormulaPtr> atoms;
        std::vector<std::pair<int, int>> plays;
        for (int p = 0; p < s_.num_players(); ++p) {
          if (p == i) continue;
          atoms.push_back(f_play(p, opp.items[q][p]));
          plays.push_back({p, opp.items[q][p]});
        }
        FormulaPtr psi = f_and_all(std::move(atoms));
        DiamondAnswer guard = ask(clause_query(o.children, h, psi));
        if (guard == DiamondAnswer::Unknown)
          throw DiamondUndecided(formula_to_string(s_.game, psi));
        if (guard == DiamondAnswer::Unsat) continue;
        std::vector<char> psi_event = play_event(plays);
        if (h == 1) {
          if (!level_mass(lps.levels[0], psi_event).is_positive())
            return false;
        } else {
          if (lvl < 0) return false;
          if (!first_cond(lps, lvl, psi_event, cond).is_positive())
            return false;
        }
      }
    }
    return true;
  }

  bool eval_od(int state, const Formula& o) {
    const int i = o.player;
    const Lps& lps = s_.beliefs[i][state];
    const std::vector<Rat>& mu = lps.levels[0];
    const OppProfiles& opp = full_opp(i);
    std::vector<char> all(s_.num_states(), 1);
    for (std::size_t h = 1; h <= o.children.size(); ++h) {
      std::vector<char> cond;
      if (h == 1) {
        cond = all;
      } else {
        std::vector<const std::vector<char>*> negs;
        for (std::size_t g = 0; g + 1 < h; ++g)
          negs.push_back(&event(o.children[g]));
        cond = conj_event(negs, static_cast<int>(h) - 1);
      }
      if (h > 1 && empty_event(cond)) {
        note("Od: clause " + std::to_string(h) +
             " vacuous (empty conditioning event)");
        continue;
      }
      Rat cond_mass = level_mass(mu, cond);
      if (h > 1 && !cond_mass.is_positive()) return false;
      // B^delta part: mu(phi_h | cond) >= 1 - delta.
      const auto& phi = event(o.children[h - 1]);
      Rat joint;
      for (int w = 0; w < s_.num_states(); ++w)
        if (cond[w] && phi[w] && !mu[w].is_zero()) joint += mu[w];
      if (joint < (Rat::one() - o.delta) * cond_mass) return false;
      // epsilon coverage of consistent play profiles.
      for (int q = 0; q < opp.size(); ++q) {
        std::vector<FormulaPtr> atoms;
        std::vector<std::pair<int, int>> plays;
        for (int p = 0; p < s_.num_players(); ++p) {
          if (p == i) continue;
          atoms.push_back(f_play(p, opp.items[q][p]));
          plays.push_back({p, opp.items[q][p]});
        }
        FormulaPtr psi = f_and_all(std::move(atoms));
        DiamondAnswer guard = ask(clause_query(o.children, h, psi));
        if (guard == DiamondAnswer::Unknown)
          throw DiamondUndecided(formula_to_string(s_.game, psi));
        if (guard == DiamondAnswer::Unsat) continue;
        std::vector<char> psi_event = play_event(plays);
        Rat psi_mass;
        for (int w = 0; w < s_.num_states(); ++w)
          if (cond[w] && psi_event[w] && !mu[w].is_zero()) psi_mass += mu[w];
        if (psi_mass < o.eps * cond_mass) return false;
      }
    }
    return true;
  }

  bool compute(int state, const FormulaPtr& f) {
    switch (f->tag) {
      case Formula::Tag::True:
        return true;
      case Formula::Tag::RatAtom:
        return rat_holds(f->player, state);
      case Formula::Tag::Play:
        return s_.strat[state][f->player] == f->strat;
      case Formula::Tag::Not:
        return !ev(state, f->children[0]);
      case Formula::Tag::And:
        return ev(state, f->children[0]) && ev(state, f->children[1]);
      case Formula::Tag::B:
        return eval_b_list(state, f->player, f->children);
      case Formula::Tag::PB: {
        const Lps& lps = s_.beliefs[f->player][state];
        return level_mass(lps.levels[0], event(f->children[0])).is_positive();
      }
      case Formula::Tag::O:
        if (f->prime)
          throw std::invalid_argument(
              "O' is defined only for extensive-form structures");
        return eval_o(state, *f);
      case Formula::Tag::Od:
        return eval_od(state, *f);
      case Formula::Tag::Bd: {
        const Lps& lps = s_.beliefs[f->player][state];
        const std::vector<Rat>& mu = lps.levels[0];
        const auto& phi = event(f->children[0]);
        if (!f->has_condition) {
          return level_mass(mu, phi) >= Rat::one() - f->delta;
        }
        const auto& theta = event(f->children[1]);
        Rat tm = level_mass(mu, theta);
        if (!tm.is_positive()) return false;
        Rat joint;
        for (int w = 0; w < s_.num_states(); ++w)
          if (phi[w] && theta[w] && !mu[w].is_zero()) joint += mu[w];
        return joint >= (Rat::one() - f->delta) * tm;
      }
      case Formula::Tag::PBd: {
        const Lps& lps = s_.beliefs[f->player][state];
        const std::vector<Rat>& mu = lps.levels[0];
        const auto& phi = event(f->children[0]);
        if (!f->has_condition) return level_mass(mu, phi) >= f->eps;
        const auto& theta = event(f->children[1]);
        Rat tm = level_mass(mu, theta);
        if (!tm.is_positive()) return false;
        Rat joint;
        for (int w = 0; w < s_.num_states(); ++w)
          if (phi[w] && theta[w] && !mu[w].is_zero()) joint += mu[w];
        return joint >= f->eps * tm;
      }
      case Formula::Tag::Diamond: {
        DiamondAnswer a = ask(f->children[0]);
        if (a == DiamondAnswer::Unknown)
          throw DiamondUndecided(formula_to_string(s_.game, f->children[0]));
        return a == DiamondAnswer::Sat;
      }
      case Formula::Tag::Init:
      case Formula::Tag::G:
        throw std::invalid_argument(
            "init/G are defined only for extensive-form structures");
      case Formula::Tag::Macro:
        return ev(state, expansion(f));
    }
    throw std::logic_error("unhandled formula tag");
  }

  const EpistemicStructure& s_;
  const DiamondOracle& oracle_;
  RatMode mode_;
  EvalTrace* trace_;
  std::unordered_map<std::pair<const Formula*, int>, bool, PtrStateHash> memo_;
  std::map<const Formula*, std::vector<char>> event_;
  std::map<const Formula*, FormulaPtr> expansion_;
  std::map<std::pair<int, int>, Lps> proj_;
  std::vector<OppProfiles> opp_;
};

}  // namespace

bool eval(const EpistemicStructure& s, int state, const FormulaPtr& f,
          const DiamondOracle& oracle, RatMode rat_mode, EvalTrace* trace) {
  if (state < 0 || state >= s.num_states())
    throw std::invalid_argument("state index out of range");
  if (rat_mode == RatMode::Prob && s.max_lps_length() > 1)
    throw std::invalid_argument(
        "rat_mode prob requires length-1 beliefs; use lex");
  Evaluator e(s, oracle, rat_mode, trace);
  return e.ev(state, f);
}

struct EvalSession::Impl {
  const EpistemicStructure& s;
  Evaluator evaluator;
  // Truth values are memoized by node address, so every root formula the
  // session has seen must stay alive for the session's lifetime; otherwise a
  // freed node's address could be reused by an unrelated formula.
  std::vector<FormulaPtr> pinned;
  Impl(const EpistemicStructure& s_, const DiamondOracle& oracle,
       RatMode mode, EvalTrace* trace)
      : s(s_), evaluator(s_, oracle, mode, trace) {}
};

EvalSession::EvalSession(const EpistemicStructure& s,
                         const DiamondOracle& oracle, RatMode rat_mode,
                         EvalTrace* trace) {
  if (rat_mode == RatMode::Prob && s.max_lps_length() > 1)
    throw std::invalid_argument(
        "rat_mode prob requires length-1 beliefs; use lex");
  impl_ = std::make_unique<Impl>(s, oracle, rat_mode, trace);
}

EvalSession::~EvalSession() = default;
EvalSession::EvalSession(EvalSession&&) noexcept = default;

bool EvalSession::ev(int state, const FormulaPtr& f) {
  if (state < 0 || state >= impl_->s.num_states())
    throw std::invalid_argument("state index out of range");
  impl_->pinned.push_back(f);
  return impl_->evaluator.ev(state, f);
}

}  // namespace egt

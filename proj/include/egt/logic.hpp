#ifndef EGT_LOGIC_HPP
#define EGT_LOGIC_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "egt/dominance.hpp"
#include "egt/game.hpp"
#include "egt/structures.hpp"

namespace egt {

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class MacroKind { RatK, Ek, RatZero, PlayConZero, GratZero, GratApprox,
                       RatEfr, RatEfrPrime, PlayConEfr };

// Syntax tree of the modal language.  Macro nodes stay unexpanded in the
// tree (the checker expands them on demand), which keeps the consistency
// oracle's pattern matching syntactic.
struct Formula {
  enum class Tag {
    True, RatAtom, Play, Not, And, B, PB, O, Diamond,
    Bd, PBd, Od, Init, G, Macro
  };
  Tag tag = Tag::True;
  int player = -1;                  // RatAtom/Play/B/PB/O/Bd/PBd/Od
  int strat = -1;                   // Play
  Rat delta, eps;                   // Bd/PBd (delta only), Od, GratApprox
  bool prime = false;               // O / efr macros: the O' variant
  bool has_condition = false;       // Bd/PBd: children = [phi, theta]
  std::vector<FormulaPtr> children; // Not/And/B/O/Od lists etc.

  // Macro fields: kind^k for `player`, or the group "every j != player".
  MacroKind macro = MacroKind::RatK;
  int macro_k = 0;
  bool group = false;
};

FormulaPtr f_true();
FormulaPtr f_rat(int player);
FormulaPtr f_play(int player, int strat);
FormulaPtr f_not(FormulaPtr f);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_and_all(std::vector<FormulaPtr> fs);  // True when empty
FormulaPtr f_b(int player, std::vector<FormulaPtr> list);
FormulaPtr f_pb(int player, FormulaPtr f);
FormulaPtr f_o(int player, std::vector<FormulaPtr> list, bool prime = false);
FormulaPtr f_diamond(FormulaPtr f);
FormulaPtr f_bd(int player, Rat delta, FormulaPtr f,
                FormulaPtr cond = nullptr);
FormulaPtr f_pbd(int player, Rat eps, FormulaPtr f, FormulaPtr cond = nullptr);
FormulaPtr f_od(int player, Rat delta, Rat eps, std::vector<FormulaPtr> list);
FormulaPtr f_init(FormulaPtr f);
FormulaPtr f_g(FormulaPtr f);
FormulaPtr f_macro(MacroKind kind, int k, int player, bool group = false,
                   Rat delta = Rat(), Rat eps = Rat(), bool prime = false);

std::string formula_to_string(const NormalFormGame& g, const FormulaPtr& f);

struct ParseError : std::runtime_error {
  int line, column;
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error(msg + " at " + std::to_string(line) + ":" +
                           std::to_string(column)),
        line(line), column(column) {}
};

// Parses the textual grammar (see README).  Player ids are 1-based in text.
FormulaPtr parse_formula(const std::string& text, const NormalFormGame& g);

// Purely syntactic one-step expansion of a macro node.
FormulaPtr expand_macro(const Formula& macro_node, const NormalFormGame& g);

struct DiamondUndecided : std::runtime_error {
  explicit DiamondUndecided(const std::string& q)
      : std::runtime_error("diamond undecided: " + q) {}
};

enum class DiamondAnswer { Sat, Unsat, Unknown };

// Consistency oracle: characterized families are answered from the deletion
// traces; everything else falls back to a bounded search over a finite
// family of structures, or Unknown.
class DiamondOracle {
 public:
  explicit DiamondOracle(const NormalFormGame& g);

  const NormalFormGame& game() const { return game_; }
  const DeletionTrace& nwd() const { return nwd_; }

  // Extensive-form survivor sets, when the game has a tree (enables the
  // RATEFR patterns).
  void set_ncd_rounds(std::vector<StrategySets> rounds);

  void add_search_structure(std::shared_ptr<const EpistemicStructure> s);

  DiamondAnswer query(const FormulaPtr& f) const;

 private:
  NormalFormGame game_;
  DeletionTrace nwd_;
  std::optional<Rat> gap_;
  Rat epsilon0_;
  std::vector<StrategySets> ncd_rounds_;
  std::vector<std::shared_ptr<const EpistemicStructure>> search_family_;

  bool survives_ncd(int player, int strat, int k) const;
  DiamondAnswer match(const FormulaPtr& f) const;
};

enum class RatMode { Prob, Lex };

// Evaluation trace: one indented line per clause decision when enabled.
struct EvalTrace {
  std::vector<std::string> lines;
};

// Model checker for normal-form structures; throws DiamondUndecided when a
// needed consistency query is unanswerable, std::invalid_argument when
// rat_mode prob meets an LPS of length > 1.
bool eval(const EpistemicStructure& s, int state, const FormulaPtr& f,
          const DiamondOracle& oracle, RatMode rat_mode,
          EvalTrace* trace = nullptr);

// Re-usable checking session: truth values, events, and projections are
// memoized across calls, which matters when checking many formulas at many
// states of one structure.
class EvalSession {
 public:
  EvalSession(const EpistemicStructure& s, const DiamondOracle& oracle,
              RatMode rat_mode, EvalTrace* trace = nullptr);
  ~EvalSession();
  EvalSession(EvalSession&&) noexcept;

  bool ev(int state, const FormulaPtr& f);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace egt

#endif  // EGT_LOGIC_HPP
